"""The mu-norm of an operator and the partition functional it minimizes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_permutation, check_vector, check_weights
from .exceptions import ValidationError
from .measure import Measure
from .operators import DenseMatrix, koopman_matrix

__all__ = [
    "Partition",
    "mu_norm_sq",
    "partition_functional",
    "sandwiched_norm_sq",
    "koopman_product_norm_sq",
]


@dataclass(frozen=True)
class Partition:
    """Ordered disjoint blocks covering ``{0, ..., J-1}``."""

    blocks: tuple

    def __init__(self, blocks, J=None):
        blocks = tuple(tuple(sorted(int(i) for i in b)) for b in blocks)
        if any(len(b) == 0 for b in blocks):
            raise ValidationError("partition blocks must be non-empty")
        flat = [i for b in blocks for i in b]
        n = len(flat) if J is None else int(J)
        if sorted(flat) != list(range(n)):
            raise ValidationError(f"blocks do not partition {{0..{n - 1}}}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def finest(cls, J):
        return cls([[j] for j in range(J)])

    @classmethod
    def whole(cls, J):
        return cls([list(range(J))])

    @classmethod
    def from_labels(cls, labels):
        labels = np.asarray(labels)
        return cls([np.flatnonzero(labels == v).tolist() for v in np.unique(labels)])

    @property
    def J(self):
        return sum(len(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def labels(self):
        out = np.empty(self.J, dtype=np.int64)
        for n, b in enumerate(self.blocks):
            out[list(b)] = n
        return out

    def masks(self):
        """Boolean array of shape ``(len(self), J)``."""
        m = np.zeros((len(self), self.J), dtype=bool)
        for n, b in enumerate(self.blocks):
            m[n, list(b)] = True
        return m

    def refines(self, other):
        """True if every block of ``self`` sits inside a block of ``other``."""
        if self.J != other.J:
            return False
        lab = other.labels()
        return all(len({lab[i] for i in b}) == 1 for b in self.blocks)

    def to_list(self):
        return [list(b) for b in self.blocks]


def _weights_of(W):
    return W.mu


def mu_norm_sq(W):
    """``||W||_mu^2 = sum_{j,k} mu_j |W_jk|^2`` (row index carries the weight)."""
    a = np.abs(W.entries) ** 2
    return float(np.sum(_weights_of(W)[:, None] * a))


def _check_partition(chi, J):
    if not isinstance(chi, Partition):
        chi = Partition(chi)
    if chi.J != J:
        raise ValidationError(f"partition covers {chi.J} indices, operator has {J}")
    return chi


def partition_functional(W, chi):
    """``M_chi(W) = sum_Y mu(Y) ||W 1_Y||^2`` with l2(mu) operator norms."""
    chi = _check_partition(chi, W.J)
    E = W.euclidean()
    total = 0.0
    for block in chi.blocks:
        cols = list(block)
        norm = np.linalg.norm(E[:, cols], 2)
        total += float(np.sum(W.mu[cols])) * norm**2
    return total


def sandwiched_norm_sq(g1, W, g2):
    """``||diag(g1) W diag(g2)||_mu^2`` without forming the product."""
    g1 = check_vector(g1, length=W.J, name="g1", dtype=complex)
    g2 = check_vector(g2, length=W.J, name="g2", dtype=complex)
    a = np.abs(W.entries) ** 2
    return float(np.sum(W.mu[:, None] * np.abs(g1[:, None]) ** 2 * a * np.abs(g2[None, :]) ** 2))


def koopman_product_norm_sq(F, gs, mu):
    """mu-norm squared of ``g_0 U_F g_1 U_F ... U_F g_n`` along orbits of ``F``.

    ``F`` is a permutation of ``{0..J-1}`` preserving ``mu``; ``gs`` is the
    list of diagonals ``g_0, ..., g_n``.
    """
    if isinstance(mu, Measure):
        mu = mu.weights(len(F))
    mu = check_weights(mu)
    F = check_permutation(F, J=mu.size)
    if not np.allclose(mu[F], mu, rtol=1e-12, atol=0.0):
        raise ValidationError("permutation does not preserve the measure")
    gs = [check_vector(g, length=mu.size, name="g", dtype=complex) for g in gs]
    if not gs:
        raise ValidationError("need at least one diagonal")
    orbit = np.arange(mu.size)
    amp = np.abs(gs[0]) ** 2
    for g in gs[1:]:
        orbit = F[orbit]
        amp = amp * np.abs(g[orbit]) ** 2
    return float(np.sum(amp * mu[orbit]))


def koopman_product_matrix(F, gs, mu):
    """Explicit product ``g_0 U_F g_1 ... U_F g_n`` (oracle for the orbit formula)."""
    mu = np.asarray(mu, dtype=float)
    U = koopman_matrix(F, mu)
    out = np.diag(np.asarray(gs[0], dtype=complex))
    for g in gs[1:]:
        out = out @ U @ np.diag(np.asarray(g, dtype=complex))
    return DenseMatrix(out, mu)
