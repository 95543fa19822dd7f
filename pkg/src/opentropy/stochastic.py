"""Semibistochastic matrices, the map b, and the Cesaro projector onto Ker(B - I).

Conventions
-----------
``a_alpha^k`` is the ``alpha``-th column sum of ``B^k``, so ``a_alpha^0 = 1``.
``u_alpha = lim_k a_alpha^k`` and it equals ``(P^T e)_alpha``.
The projector ``P`` is the oblique projection onto ``Ker(B - I)`` along
``Im(B - I)``; it coincides with the Cesaro limit of ``B^k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_index, check_square, check_weights
from .exceptions import (
    NotContractionError,
    NotSemibistochasticError,
    RankAmbiguityError,
    ValidationError,
)
from .operators import DenseMatrix, operator_norm

__all__ = [
    "SBMatrix",
    "ErgodicData",
    "b_map",
    "b_entries",
    "validate_sb",
    "l1_operator_norm",
    "a_seq",
    "a_table",
    "u_limit",
    "u_limits",
    "ergodic_projector",
    "cesaro_average",
    "averaged_operator",
]

SUM_TOL = 1e-12
# singular values within this factor of the threshold make the rank ambiguous
RANK_GRAY = 1e3


@dataclass(frozen=True, eq=False)
class SBMatrix:
    """Non-negative matrix whose row and column sums are at most one."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def J(self):
        return self.entries.shape[0]

    def __matmul__(self, other):
        return validate_sb(self.entries @ np.asarray(other.entries))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def validate_sb(B, tol=SUM_TOL):
    """Return ``B`` as an :class:`SBMatrix` or raise NotSemibistochasticError."""
    a = check_square(np.asarray(getattr(B, "entries", B)), name="B")
    if np.iscomplexobj(a):
        if np.any(a.imag != 0):
            raise NotSemibistochasticError("B has complex entries")
        a = a.real
    a = a.astype(float)
    if np.any(a < 0):
        j, k = np.argwhere(a < 0)[0]
        raise NotSemibistochasticError(f"negative entry B[{j},{k}] = {a[j, k]!r}")
    rows, cols = a.sum(axis=1), a.sum(axis=0)
    if np.any(rows > 1 + tol):
        j = int(np.argmax(rows))
        raise NotSemibistochasticError(f"row {j} sums to {rows[j]!r}")
    if np.any(cols > 1 + tol):
        k = int(np.argmax(cols))
        raise NotSemibistochasticError(f"column {k} sums to {cols[k]!r}")
    return SBMatrix(a)


def l1_operator_norm(B):
    """Max absolute column sum."""
    a = np.asarray(getattr(B, "entries", B))
    return float(np.max(np.sum(np.abs(a), axis=0)))


def b_entries(U):
    """``B_jk = (mu_j / mu_k) |U_jk|^2`` with no admissibility checks."""
    mu = U.mu
    return (mu[:, None] / mu[None, :]) * np.abs(U.entries) ** 2


def b_map(U, require_contraction=True, tol=1e-9):
    """Map a contraction on l2(mu) to its semibistochastic matrix ``b(U)``.

    ``require_contraction=False`` skips the operator-norm test and only
    insists that the image is semibistochastic; some operators of interest
    (the two-band operator among them) have a semibistochastic image
    without being contractions.
    """
    if not isinstance(U, DenseMatrix):
        raise ValidationError("b_map expects a DenseMatrix")
    if require_contraction:
        norm = operator_norm(U)
        if norm > 1 + tol:
            raise NotContractionError(f"operator norm {norm:.12g} exceeds 1")
    return validate_sb(b_entries(U), tol=max(SUM_TOL, 1e-10))


# ---------------------------------------------------------------------------
# a-sequences and their limits
# ---------------------------------------------------------------------------


def _sb_array(B):
    if isinstance(B, SBMatrix):
        return B.entries
    return validate_sb(B).entries


def a_table(B, kmax):
    """Array ``a[k, alpha]`` for ``k = 0..kmax`` (column sums of ``B^k``)."""
    a = _sb_array(B)
    out = np.empty((int(kmax) + 1, a.shape[0]))
    row = np.ones(a.shape[0])
    out[0] = row
    for k in range(1, int(kmax) + 1):
        row = row @ a
        out[k] = row
    return out


def a_seq(B, alpha, kmax):
    """``a_alpha^k`` for ``k = 0..kmax``; entry 0 is the empty-product 1."""
    a = _sb_array(B)
    alpha = check_index(alpha, a.shape[0])
    return a_table(a, kmax)[:, alpha]


def u_limits(B, tol=1e-10, kmin=32, max_doublings=60):
    """Limits ``u_alpha`` of the monotone sequences ``a_alpha^k`` for every alpha.

    Evaluates ``e^T B^k`` at ``k = 2^m`` by repeated squaring and stops once
    two consecutive dyadic terms agree within ``tol`` for all alpha and
    ``k >= max(kmin, J)``. Returns ``(u, info)``.
    """
    a = _sb_array(B)
    J = a.shape[0]
    e = np.ones(J)
    power = a.copy()
    k = 1
    prev = e @ power
    floor = max(int(kmin), J)
    for m in range(1, max_doublings + 1):
        power = power @ power
        k *= 2
        cur = e @ power
        delta = float(np.max(np.abs(prev - cur)))
        if k >= floor and delta < tol:
            return np.clip(cur, 0.0, 1.0), {"k": k, "delta": delta, "converged": True}
        prev = cur
    return np.clip(prev, 0.0, 1.0), {"k": k, "delta": delta, "converged": False}


def u_limit(B, alpha, tol=1e-10, kmin=32):
    a = _sb_array(B)
    alpha = check_index(alpha, a.shape[0])
    u, _ = u_limits(a, tol=tol, kmin=kmin)
    return float(u[alpha])


# ---------------------------------------------------------------------------
# ergodic projector
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ErgodicData:
    """Projector onto ``Ker(B - I)`` and the vectors entering the entropy formula.

    ``u`` holds the limits of the a-sequences, ``uT = P^T e`` and
    ``v = P mu``. Both ``u`` and ``uT`` are kept so their agreement can be
    inspected; the entropy formula uses ``uT``.
    """

    projector: np.ndarray
    u: np.ndarray
    v: np.ndarray
    uT: np.ndarray
    kernel_dim: int
    diagnostics: dict = field(default_factory=dict)


def cesaro_average(B, n):
    """``(1/n) sum_{k<n} B^k`` for ``n`` a power of two, by doubling."""
    a = np.asarray(getattr(B, "entries", B), dtype=float)
    n = int(n)
    if n < 1 or n & (n - 1):
        raise ValidationError("cesaro_average needs n a power of two")
    S = np.eye(a.shape[0])  # sum of B^k, k < m
    power = a.copy()  # B^m
    m = 1
    while m < n:
        S = S + power @ S
        power = power @ power
        m *= 2
    return S / n


def ergodic_projector(B, mu=None, tol=1e-10, cesaro_n=2**20, strict=False):
    """Exact projector onto ``Ker(B - I)`` along ``Im(B - I)``.

    Bases come from one SVD of ``B - I``. Singular values below
    ``tol * max(s_max, 1)`` count as zero; their right singular vectors span
    the kernel ``K`` and their left ones span ``Ker(B^T - I)``, the
    annihilator ``L`` of the image. Then ``P = K (L^T K)^{-1} L^T``.
    The result is cross-checked against a truncated Cesaro average.

    With ``strict=True`` an ambiguous numerical rank raises
    :class:`RankAmbiguityError`; otherwise it is only flagged in
    ``diagnostics``.
    """
    a = _sb_array(B)
    J = a.shape[0]
    mu = np.ones(J) / J if mu is None else check_weights(mu, length=J)
    M = a - np.eye(J)
    left, s, right_h = np.linalg.svd(M)
    smax = float(s[0]) if s.size else 0.0
    # ||B - I|| is of order one for semibistochastic B; flooring the scale at 1
    # keeps a roundoff-sized spectrum (e.g. B = [[1 - 1e-16]]) from defining it
    thresh = tol * max(smax, 1.0)
    rank = int(np.sum(s > thresh))
    gray = [float(x) for x in s if thresh / RANK_GRAY < x < thresh * RANK_GRAY]
    diagnostics = {
        "singular_values_min": float(s[-1]) if s.size else 0.0,
        "threshold": thresh,
        "rank_ambiguous": bool(gray),
        "gray_singular_values": gray,
    }
    if gray and strict:
        raise RankAmbiguityError(f"singular values {gray} lie near the threshold {thresh:g}")
    kdim = J - rank
    if kdim == 0:
        P = np.zeros((J, J))
    elif kdim == J:
        P = np.eye(J)
    else:
        K = right_h[rank:].T
        L = left[:, rank:]
        G = L.T @ K
        P = K @ np.linalg.solve(G, L.T)
        diagnostics["gram_condition"] = float(np.linalg.cond(G))
    u, uinfo = u_limits(a)
    uT = P.sum(axis=0)
    diagnostics["u_converged"] = uinfo["converged"]
    diagnostics["u_vs_PTe"] = float(np.max(np.abs(u - uT)))
    if cesaro_n:
        C = cesaro_average(a, cesaro_n)
        diagnostics["cesaro_n"] = int(cesaro_n)
        diagnostics["cesaro_gap"] = float(np.max(np.abs(C - P)))
    return ErgodicData(
        projector=P,
        u=u,
        v=P @ mu,
        uT=uT,
        kernel_dim=kdim,
        diagnostics=diagnostics,
    )


def averaged_operator(B, alpha, n):
    """``B_{n,alpha} = (1/n) sum_{j<n} a_alpha^{n-1-j} B^j``."""
    a = _sb_array(B)
    alpha = check_index(alpha, a.shape[0])
    n = int(n)
    if n < 1:
        raise ValidationError("n must be at least 1")
    coeff = a_seq(a, alpha, n - 1)[::-1]  # coeff[j] = a^{n-1-j}
    out = np.zeros_like(a)
    power = np.eye(a.shape[0])
    for j in range(n):
        out += coeff[j] * power
        power = power @ a
    return out / n
