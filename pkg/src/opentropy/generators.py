"""Random instances for property tests and the acceptance suite.

Every function takes a ``numpy.random.Generator`` so results are
reproducible from a seed.
"""

from __future__ import annotations

import numpy as np

from .mu_norm import Partition
from .operators import DenseMatrix

__all__ = [
    "random_weights",
    "block_uniform_weights",
    "random_contraction",
    "random_unitary",
    "random_sb",
    "random_doubly_stochastic",
    "random_partition",
    "random_refinement",
    "measure_preserving_permutation",
    "SB_FAMILIES",
]

SB_FAMILIES = ("generic", "doubly", "permutation", "idempotent", "dead_block")


def random_weights(J, rng):
    w = rng.uniform(0.1, 1.0, size=J)
    return w / w.sum()


def block_uniform_weights(J, rng, max_blocks=3):
    """Weights constant on consecutive blocks; returns ``(mu, labels)``."""
    k = int(rng.integers(1, min(max_blocks, J) + 1))
    cuts = np.sort(rng.choice(np.arange(1, J), size=k - 1, replace=False)) if k > 1 else []
    labels = np.zeros(J, dtype=np.int64)
    for c in cuts:
        labels[c:] += 1
    level = rng.uniform(0.2, 1.0, size=k)[labels]
    return level / level.sum(), labels


def _from_euclidean(E, mu):
    s = np.sqrt(mu)
    return DenseMatrix(E * s[None, :] / s[:, None], mu)


def random_unitary(J, mu, rng):
    Z = rng.normal(size=(J, J)) + 1j * rng.normal(size=(J, J))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))[None, :]
    return _from_euclidean(Q, mu)


def random_contraction(J, mu, rng, sparsity=0.0):
    """Operator on l2(mu) with norm in ``[0.5, 1]``; optional zero pattern."""
    E = rng.normal(size=(J, J)) + 1j * rng.normal(size=(J, J))
    if sparsity:
        E[rng.random((J, J)) < sparsity] = 0.0
    norm = np.linalg.norm(E, 2)
    if norm == 0:
        return _from_euclidean(np.zeros((J, J), dtype=complex), mu)
    E = E / norm * rng.uniform(0.5, 1.0)
    return _from_euclidean(E, mu)


def random_doubly_stochastic(J, rng, terms=None):
    """Convex combination of random permutation matrices."""
    terms = terms or int(rng.integers(1, J + 2))
    c = rng.dirichlet(np.ones(terms))
    B = np.zeros((J, J))
    for w in c:
        B[np.arange(J), rng.permutation(J)] += w
    return B


def _substochastic(J, rng, scale):
    A = rng.random((J, J)) * (rng.random((J, J)) < 0.7)
    s = max(A.sum(axis=0).max(), A.sum(axis=1).max(), 1e-300)
    return A / s * scale


def random_sb(J, rng, family=None):
    """Semibistochastic ``J x J`` matrix from one of :data:`SB_FAMILIES`.

    ``generic``: random sparse pattern scaled to max row/column sum <= 1.
    ``doubly``: Birkhoff mixture of permutations.
    ``permutation``: a permutation matrix.
    ``idempotent``: uniform blocks on a random subset, conjugated by a permutation.
    ``dead_block``: a permutation on a random subset plus a substochastic
    block with spectral radius below one on the rest.
    """
    family = family or SB_FAMILIES[int(rng.integers(len(SB_FAMILIES)))]
    if family == "generic":
        return _substochastic(J, rng, rng.choice([1.0, rng.uniform(0.3, 1.0)]))
    if family == "doubly":
        return random_doubly_stochastic(J, rng)
    if family == "permutation":
        return np.eye(J)[rng.permutation(J)]
    perm = rng.permutation(J)
    B = np.zeros((J, J))
    if family == "idempotent":
        start = 0
        while start < J:
            s = int(rng.integers(1, J - start + 1))
            if rng.random() < 0.7:
                B[start : start + s, start : start + s] = 1.0 / s
            start += s
    elif family == "dead_block":
        L = int(rng.integers(0, J + 1))
        B[:L, :L] = np.eye(L)[rng.permutation(L)]
        if L < J:
            B[L:, L:] = _substochastic(J - L, rng, rng.uniform(0.2, 0.9))
    else:
        raise ValueError(f"unknown family {family!r}")
    return B[np.ix_(perm, perm)]


def random_partition(J, rng, max_blocks=None):
    k = int(rng.integers(1, (max_blocks or J) + 1))
    labels = rng.integers(0, k, size=J)
    return Partition.from_labels(labels)


def random_refinement(chi, rng):
    """Split every block of ``chi`` at random."""
    blocks = []
    for b in chi.blocks:
        b = np.array(b)
        cut = rng.integers(0, 2, size=b.size) if b.size > 1 else np.zeros(1, dtype=int)
        for v in np.unique(cut):
            blocks.append(b[cut == v].tolist())
    return Partition(blocks)


def measure_preserving_permutation(labels, rng):
    """Random permutation that only moves indices within equal labels."""
    labels = np.asarray(labels)
    perm = np.arange(labels.size)
    for v in np.unique(labels):
        idx = np.flatnonzero(labels == v)
        perm[idx] = idx[rng.permutation(idx.size)]
    return perm
