"""Input validation helpers shared by the functional API and the estimators."""

from __future__ import annotations

import numpy as np

from .exceptions import MeasureError, ValidationError

NORMALIZATION_TOL = 1e-12


def check_square(a, name="matrix", dtype=None):
    """Return ``a`` as a finite square 2-D ndarray."""
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square 2-D, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def check_vector(x, length=None, name="vector", dtype=None):
    arr = np.asarray(x, dtype=dtype)
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be 1-D, got shape {arr.shape}")
    if length is not None and arr.shape[0] != length:
        raise ValidationError(f"{name} has length {arr.shape[0]}, expected {length}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def check_weights(mu, length=None):
    """Positive finite weight vector (a measure restricted to a prefix)."""
    mu = check_vector(mu, length=length, name="mu", dtype=float)
    if np.any(mu <= 0):
        raise MeasureError("every weight must be strictly positive")
    return mu


def check_probability(weights, tol=NORMALIZATION_TOL):
    """Positive weights summing to one. Never renormalizes."""
    w = check_weights(weights)
    total = float(np.sum(w))
    if abs(total - 1.0) > tol:
        raise MeasureError(f"weights sum to {total!r}, not 1 within {tol:g}")
    return w


def check_index(alpha, J, name="alpha"):
    if not (0 <= int(alpha) < J) or int(alpha) != alpha:
        raise ValidationError(f"{name}={alpha!r} out of range for dimension {J}")
    return int(alpha)


def check_positive(value, name):
    if not value > 0:
        raise ValidationError(f"{name} must be positive, got {value!r}")
    return value


def check_permutation(perm, J=None):
    """Return ``perm`` as an int array describing a bijection of {0..len-1}."""
    p = np.asarray(perm)
    if p.ndim != 1 or (p.size and not np.issubdtype(p.dtype, np.integer)):
        raise ValidationError("permutation must be a 1-D integer sequence")
    p = p.astype(np.int64)
    if J is not None and p.size != J:
        raise ValidationError(f"permutation has length {p.size}, expected {J}")
    if not np.array_equal(np.sort(p), np.arange(p.size)):
        raise ValidationError("permutation is not a bijection")
    return p
