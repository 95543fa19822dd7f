"""scikit-learn style wrappers around the functional core.

The estimators hold hyper-parameters in ``__init__`` and learned state in
trailing-underscore attributes, so ``get_params`` / ``set_params`` /
``clone`` work as usual. They add no numerics of their own.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .entropy import entropy_rate, exact_entropy, exact_entropy_sb, truncation_entropy_series
from .operators import DenseMatrix, OperatorSpec
from .stochastic import ergodic_projector, validate_sb

__all__ = ["ErgodicProjector", "OperatorEntropy", "TruncationEntropy"]


class ErgodicProjector(TransformerMixin, BaseEstimator):
    """Learn the projector onto ``Ker(B - I)`` and apply it to vectors.

    Parameters
    ----------
    tol : float
        Relative singular-value threshold for the kernel of ``B - I``.
    cesaro_n : int
        Length of the Cesaro cross-check (power of two); 0 disables it.
    """

    def __init__(self, tol=1e-10, cesaro_n=2**20):
        self.tol = tol
        self.cesaro_n = cesaro_n

    def fit(self, B, y=None, mu=None):
        B = validate_sb(B).entries
        data = ergodic_projector(B, mu, tol=self.tol, cesaro_n=self.cesaro_n)
        self.projector_ = data.projector
        self.kernel_dim_ = data.kernel_dim
        self.u_ = data.u
        self.diagnostics_ = data.diagnostics
        self.n_features_in_ = B.shape[0]
        return self

    def transform(self, X):
        """Apply ``P`` to each row of ``X`` (rows are vectors in l1)."""
        check_is_fitted(self, "projector_")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return X @ self.projector_.T


class OperatorEntropy(BaseEstimator):
    """Entropy of a finite operator.

    Parameters
    ----------
    method : {"exact", "rate"}
        ``"exact"`` uses the closed form; ``"rate"`` fits the growth of the
        partition entropy over ``n = 1..nmax``.
    partition : list of lists, optional
        Partition for ``"rate"``; finest by default.
    nmax : int
    mu : array_like, optional
        Weights, required when ``fit`` receives a plain semibistochastic matrix.
    """

    def __init__(self, method="exact", partition=None, nmax=12, mu=None):
        self.method = method
        self.partition = partition
        self.nmax = nmax
        self.mu = mu

    def fit(self, U, y=None):
        if self.method not in ("exact", "rate"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.method == "exact":
            if isinstance(U, DenseMatrix):
                report = exact_entropy(U)
            else:
                report = exact_entropy_sb(U, self.mu)
        else:
            report = entropy_rate(U, self.partition, self.nmax, mu=self.mu)
        self.report_ = report
        self.entropy_ = report.value
        return self


class TruncationEntropy(BaseEstimator):
    """Series ``h(U_J)`` over truncations of an :class:`OperatorSpec`.

    Parameters
    ----------
    Jmax : int, optional
    kmax : int, optional
        Number of blocks, for block operators sampled at block boundaries.
    eps : float
        Divergence threshold per doubling of ``J``.
    """

    def __init__(self, Jmax=32, kmax=None, eps=1e-3):
        self.Jmax = Jmax
        self.kmax = kmax
        self.eps = eps

    def fit(self, spec, y=None):
        if not isinstance(spec, OperatorSpec):
            raise TypeError("TruncationEntropy.fit expects an OperatorSpec")
        report = truncation_entropy_series(spec, Jmax=self.Jmax, kmax=self.kmax, eps=self.eps)
        self.report_ = report
        self.series_ = np.array(report.trace, dtype=float)
        self.entropy_ = report.value
        self.divergent_ = bool(report.diagnostics["divergent"])
        return self
