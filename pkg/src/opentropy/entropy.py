"""Operator entropy: path weights over partitions, the closed form for finite
contractions, truncation series and zero-entropy classification.

All logarithms are natural; ``0 log 0 = 0``.

A path ``sigma = (sigma(0), ..., sigma(n))`` visits blocks of a partition.
Its weight is

    I(sigma) = sum over index paths j_0 in X_sigma(0), ..., j_n in X_sigma(n) of
               mu_{j_n} |U_{j_n j_{n-1}} ... U_{j_1 j_0}|^2,

which equals ``sum(B_mask_n ... B_mask_1 (mu restricted to X_sigma(0)))``
with ``B = b(U)``. The dynamic program below propagates one vector per
live path instead of summing over index paths.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .exceptions import BudgetExceededError, ValidationError
from .measure import Measure, dyadic_block_bounds
from .mu_norm import Partition
from .operators import DenseMatrix, adjoint, compose, is_contraction, koopman_matrix, truncate
from .stochastic import SBMatrix, b_map, ergodic_projector, validate_sb

__all__ = [
    "PathWeightTable",
    "EntropyReport",
    "path_weights",
    "enumerate_path_weights",
    "partition_entropy",
    "h1_partition_entropy",
    "exact_entropy",
    "exact_entropy_sb",
    "truncation_entropy_series",
    "entropy_rate",
    "is_zero_entropy",
    "invariance_suite",
    "sb_truncation",
]

PATH_BUDGET = 10_000_000
H1_BUDGET = 100_000
ZERO_TOL = 1e-9
DIVERGENCE_EPS = 1e-3
BLOCK_MATERIALIZE_CAP = 256


def _shannon(w):
    return float(-np.sum(xlogy(w, w)))


@dataclass(frozen=True, eq=False)
class PathWeightTable:
    """Weights ``I(G_sigma)`` of the live paths, in lexicographic order of ``sigma``.

    Paths with zero weight are omitted.
    """

    paths: np.ndarray  # (P, n + 1) block labels
    weights: np.ndarray  # (P,)
    n: int
    n_blocks: int

    def __len__(self):
        return self.weights.size

    def as_dict(self):
        return {tuple(int(s) for s in p): float(w) for p, w in zip(self.paths, self.weights)}

    @property
    def total_mass(self):
        return float(np.sum(self.weights))

    def entropy(self):
        return _shannon(self.weights)


@dataclass(eq=False)
class EntropyReport:
    """Result of an entropy computation.

    ``trace`` holds ``(n, value)`` or ``(J, value)`` pairs; ``value`` may be
    ``inf`` only for a divergent truncation series.
    """

    value: float
    method: str
    trace: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "value": _json_float(self.value),
            "method": self.method,
            "trace": [[int(x), _json_float(y)] for x, y in self.trace],
            "diagnostics": _jsonable(self.diagnostics),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _json_float(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return _json_float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def _transfer(U, mu=None):
    """``(B, mu)`` for a DenseMatrix (via b) or a semibistochastic matrix."""
    if isinstance(U, DenseMatrix):
        return b_map(U, require_contraction=False).entries, U.mu
    B = validate_sb(U).entries
    if mu is None:
        raise ValidationError("a semibistochastic input needs its weights mu")
    if isinstance(mu, Measure):
        mu = mu.weights(B.shape[0])
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (B.shape[0],) or np.any(mu <= 0):
        raise ValidationError("mu must be positive with one weight per row of B")
    return B, mu


def _partition(chi, J):
    if chi is None:
        return Partition.finest(J)
    if not isinstance(chi, Partition):
        chi = Partition(chi)
    if chi.J != J:
        raise ValidationError(f"partition covers {chi.J} indices, operator has {J}")
    return chi


def sb_truncation(spec, J):
    """Semibistochastic matrix of the ``J``-truncation of ``spec``.

    l1 families are used as given; l2 operators go through ``b``.
    """
    W = truncate(spec, J)
    if spec.space == "l1":
        return validate_sb(W.entries.real), W.mu
    return b_map(W, require_contraction=False), W.mu


# ---------------------------------------------------------------------------
# path weights
# ---------------------------------------------------------------------------


def _path_levels(B, mu, chi, nmax, budget):
    """Yield ``(labels, vectors)`` for ``n = 0..nmax``; only live paths are kept."""
    masks = chi.masks().astype(float)
    K = masks.shape[0]
    V = masks * mu[None, :]
    labels = np.arange(K, dtype=np.int64)[:, None]
    yield labels, V
    BT = B.T
    for _ in range(nmax):
        W = V @ BT
        parents, vecs, blocks = [], [], []
        for b in range(K):
            child = W * masks[b][None, :]
            alive = np.flatnonzero(np.any(child != 0.0, axis=1))
            parents.append(alive)
            vecs.append(child[alive])
            blocks.append(np.full(alive.size, b, dtype=np.int64))
        parent = np.concatenate(parents)
        if parent.size > budget:
            raise BudgetExceededError(f"{parent.size} live paths exceed the budget of {budget}")
        order = np.argsort(parent, kind="stable")
        parent = parent[order]
        V = np.concatenate(vecs)[order]
        labels = np.hstack([labels[parent], np.concatenate(blocks)[order][:, None]])
        yield labels, V


def path_weights(U, chi=None, n=1, mu=None, budget=PATH_BUDGET):
    """Weights ``I_U(G_sigma)`` of every path of length ``n`` over ``chi``.

    Parameters
    ----------
    U : DenseMatrix or array_like
        Contraction on l2(mu), or a semibistochastic matrix together with ``mu``.
    chi : Partition or list of lists, optional
        Defaults to the finest partition.
    n : int
        Number of steps, at least 1.
    budget : int
        Maximum number of live paths at any step.

    Returns
    -------
    PathWeightTable
    """
    B, mu = _transfer(U, mu)
    chi = _partition(chi, B.shape[0])
    if int(n) < 1:
        raise ValidationError("n must be at least 1")
    for labels, V in _path_levels(B, mu, chi, int(n), budget):
        pass
    return PathWeightTable(labels, V.sum(axis=1), int(n), len(chi))


def enumerate_path_weights(U, chi=None, n=1, budget=10_000):
    """Literal sum over block paths and index paths. Test oracle only."""
    if not isinstance(U, DenseMatrix):
        raise ValidationError("the literal oracle works on a DenseMatrix")
    chi = _partition(chi, U.J)
    K = len(chi)
    if K ** (n + 1) > budget:
        raise BudgetExceededError(f"{K}^{n + 1} block paths exceed the oracle budget {budget}")
    A = np.abs(U.entries) ** 2
    mu = U.mu
    out = {}
    for sigma in itertools.product(range(K), repeat=n + 1):
        total = 0.0
        for js in itertools.product(*(chi.blocks[s] for s in sigma)):
            term = mu[js[-1]]
            for m in range(1, n + 1):
                term *= A[js[m], js[m - 1]]
            total += term
        if total != 0.0:
            out[sigma] = total
    return out


def partition_entropy(U, chi=None, n=1, mu=None, budget=PATH_BUDGET):
    """``h(U, chi, n) = -sum_sigma I(G_sigma) log I(G_sigma)``."""
    return path_weights(U, chi, n, mu=mu, budget=budget).entropy()


def _masked_products(U, chi, n, budget):
    """Yield ``||X_sigma||_mu^2`` for every path, sharing prefixes."""
    E = np.asarray(U.entries)
    mu = U.mu
    masks = chi.masks()
    count = 0
    stack = [(np.diag(masks[b].astype(complex)), 0) for b in reversed(range(len(chi)))]
    while stack:
        M, depth = stack.pop()
        if depth == n:
            count += 1
            if count > budget:
                raise BudgetExceededError(f"more than {budget} paths in the h1 enumeration")
            yield float(np.sum(mu[:, None] * np.abs(M) ** 2))
            continue
        UM = E @ M
        for b in reversed(range(len(chi))):
            child = UM * masks[b][:, None]
            if np.any(child != 0):
                stack.append((child, depth + 1))


def h1_partition_entropy(U, chi=None, n=1, budget=H1_BUDGET):
    """``-sum_sigma ||X_sigma||_mu^2 log ||X_sigma||_mu^2`` with
    ``X_sigma = 1_{X_sigma(n)} U ... U 1_{X_sigma(0)}``.

    Every path is a genuine matrix product, so the cost grows like
    ``|chi|^(n+1)``; paths whose product vanishes are pruned together with
    all their extensions.
    """
    if not isinstance(U, DenseMatrix):
        raise ValidationError("h1 needs a DenseMatrix")
    if int(n) < 1:
        raise ValidationError("n must be at least 1")
    chi = _partition(chi, U.J)
    w = np.fromiter(_masked_products(U, chi, int(n), budget), dtype=float)
    return _shannon(w)


# ---------------------------------------------------------------------------
# closed form
# ---------------------------------------------------------------------------


def _closed_form(B, mu, tol, cesaro_n):
    erg = ergodic_projector(B, mu, tol=tol, cesaro_n=cesaro_n)
    value = float(-(erg.uT @ xlogy(B, B) @ erg.v)) + 0.0  # no negative zero
    diag = dict(erg.diagnostics)
    diag["kernel_dim"] = erg.kernel_dim
    diag["cesaro_flag"] = bool(diag.get("cesaro_gap", 0.0) > 1e-3)
    return value, erg, diag


def exact_entropy_sb(B, mu, tol=1e-10, cesaro_n=2**20):
    """Entropy of a finite semibistochastic matrix.

    ``h = -sum_jk (P^T e)_j B_jk (P mu)_k log B_jk`` where ``P`` projects onto
    ``Ker(B - I)`` along the closure of ``Im(B - I)``.
    """
    B, mu = _transfer(B if not isinstance(B, SBMatrix) else B.entries, mu)
    value, _, diag = _closed_form(B, mu, tol, cesaro_n)
    return EntropyReport(value, "exact-theorem", [], diag)


def exact_entropy(U, tol=1e-10, cesaro_n=2**20):
    """Entropy of a finite-dimensional contraction through ``b(U)``.

    The contraction test is reported rather than enforced; only the
    semibistochastic property of ``b(U)`` is required.
    """
    if not isinstance(U, DenseMatrix):
        raise ValidationError("exact_entropy expects a DenseMatrix")
    B = b_map(U, require_contraction=False).entries
    value, _, diag = _closed_form(B, U.mu, tol, cesaro_n)
    diag["contraction"] = is_contraction(U)
    return EntropyReport(value, "exact-theorem", [], diag)


# ---------------------------------------------------------------------------
# truncation series
# ---------------------------------------------------------------------------


def _divergence_flag(trace, eps):
    """True when each of the last three doublings of J raised the value by > eps."""
    if len(trace) < 2:
        return False
    xs = np.array([t[0] for t in trace], dtype=float)
    ys = np.array([t[1] for t in trace], dtype=float)
    top = xs[-1]
    picks = []
    for t in range(4):
        idx = np.flatnonzero(xs <= top / 2**t)
        if idx.size == 0:
            return False
        picks.append(ys[idx[-1]])
    # picks run from the largest J down
    return all(hi - lo > eps for hi, lo in zip(picks, picks[1:]))


def _block_series(spec, kmax, tol, cap):
    """Series over block boundaries ``J = A_K`` of a block operator.

    The truncation at ``A_K`` is block diagonal, so its entropy is the sum of
    the block entropies. Small blocks are materialized; a block of size ``s``
    beyond ``cap`` uses the closed form ``mass * log s`` of a uniform block.
    """
    measure = spec.measure
    trace, total, start = [], 0.0, 0
    closed_form_blocks = 0
    for m, s in enumerate(itertools.islice(_block_size_iter(spec), kmax), start=1):
        if s <= cap:
            w = np.array([measure.weight(j) for j in range(start, start + s)])
            block = np.full((s, s), 1.0 / s)
            contrib = exact_entropy_sb(block, w, tol=tol, cesaro_n=0).value
        else:
            mass = _block_mass(measure, start, s)
            contrib = mass * math.log(s)
            closed_form_blocks += 1
        total += contrib
        start += s
        trace.append((start, total))
    return trace, {"closed_form_blocks": closed_form_blocks, "blocks": len(trace)}


def _block_size_iter(spec):
    p = spec.params
    if "sizes" in p:
        yield from (int(s) for s in p["sizes"])
        return
    m = 1
    while True:
        yield int(p["n"]) if p["rule"] == "constant" else 1 << m
        m += 1


def _block_mass(measure, start, s):
    if measure.kind == "condit1":
        m = (start + 2).bit_length() - 1
        if dyadic_block_bounds(m) == (start, start + s):
            return measure.block_mass(m)
    return measure.tail_mass(start) - measure.tail_mass(start + s)


def truncation_entropy_series(
    spec,
    Jmax=None,
    kmax=None,
    eps=DIVERGENCE_EPS,
    tol=1e-10,
    mono_tol=1e-9,
    block_cap=BLOCK_MATERIALIZE_CAP,
):
    """Series ``h(U_J)`` of exact entropies of the finite sections of ``spec``.

    With ``kmax`` and a ``block_Balpha`` spec the series is sampled at the
    first ``kmax`` block boundaries, which may lie far beyond any
    materializable size. Otherwise ``J = 1..Jmax``.

    The report value is the last term. ``diagnostics["divergent"]`` is set
    when each of the last three doublings of ``J`` raised the value by
    more than ``eps``; the value then stays finite and the flag is the
    signal that the limit is infinite.
    """
    diag = {"eps": eps}
    if kmax is not None:
        if spec.kind != "block_Balpha":
            raise ValidationError("kmax applies to block_Balpha specs only")
        trace, extra = _block_series(spec, int(kmax), tol, block_cap)
        diag.update(extra)
    else:
        if Jmax is None or int(Jmax) < 1:
            raise ValidationError("Jmax must be a positive integer")
        trace = []
        for J in range(1, int(Jmax) + 1):
            B, mu = sb_truncation(spec, J)
            value, _, _ = _closed_form(B.entries, mu, tol, 0)
            trace.append((J, value))
    ys = [v for _, v in trace]
    drops = [b - a for a, b in zip(ys, ys[1:]) if b < a - mono_tol]
    diag["monotone"] = not drops
    diag["max_drop"] = float(-min(drops)) if drops else 0.0
    diag["divergent"] = _divergence_flag(trace, eps)
    return EntropyReport(ys[-1], "truncation-limit", trace, diag)


# ---------------------------------------------------------------------------
# rates
# ---------------------------------------------------------------------------


def entropy_rate(U, chi=None, nmax=12, J=None, mu=None, budget=PATH_BUDGET):
    """Rate ``lim h(U, chi, n) / n`` as a least-squares slope.

    The fit uses the last ``ceil(nmax / 2)`` values of ``h(U, chi, n)``,
    ``n = 1..nmax``; all values are kept in ``trace``. ``U`` may be a
    DenseMatrix, a semibistochastic matrix with ``mu``, or an
    ``OperatorSpec`` truncated at ``J``.
    """
    from .operators import OperatorSpec

    if isinstance(U, OperatorSpec):
        if J is None:
            raise ValidationError("a spec needs a truncation size J")
        B, mu = sb_truncation(U, J)
        B = B.entries
    else:
        B, mu = _transfer(U, mu)
    chi = _partition(chi, B.shape[0])
    nmax = int(nmax)
    if nmax < 2:
        raise ValidationError("nmax must be at least 2")
    trace, peak = [], 0
    for n, (labels, V) in enumerate(_path_levels(B, mu, chi, nmax, budget)):
        peak = max(peak, labels.shape[0])
        if n >= 1:
            trace.append((n, _shannon(V.sum(axis=1))))
    tail = trace[-math.ceil(nmax / 2):]
    x = np.array([t[0] for t in tail], dtype=float)
    y = np.array([t[1] for t in tail])
    slope, intercept = np.polyfit(x, y, 1) if x.size > 1 else (float("nan"), float("nan"))
    resid = float(np.max(np.abs(y - (slope * x + intercept)))) if x.size > 1 else 0.0
    diag = {
        "intercept": float(intercept),
        "fit_points": int(x.size),
        "max_residual": resid,
        "peak_paths": int(peak),
        "linear": resid < 1e-6,
    }
    return EntropyReport(float(slope), "partition-rate", trace, diag)


# ---------------------------------------------------------------------------
# zero entropy and invariances
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroEntropyResult:
    zero: bool
    witness: tuple | None
    dead_rows: tuple
    dead_cols: tuple

    def __bool__(self):
        return self.zero


def is_zero_entropy(B, tol=ZERO_TOL):
    """Decide ``h(B) = 0`` from the dead-index sets of the ergodic projector.

    Row ``j`` is dead when coordinate ``j`` vanishes on ``Ker(B^T - I)``,
    i.e. column ``j`` of ``P`` is zero; column ``k`` is dead when
    coordinate ``k`` vanishes on ``Ker(B - I)``, i.e. row ``k`` of ``P`` is
    zero. ``h(B) = 0`` exactly when every entry with live row and live
    column is 0 or 1. All indices, including the first and last, may be
    dead.

    Returns
    -------
    ZeroEntropyResult
        Truthy when the entropy vanishes; ``witness`` is the first
        offending ``(row, col)`` otherwise.
    """
    a = validate_sb(B).entries
    P = ergodic_projector(a, cesaro_n=0).projector
    dead_rows = np.all(np.abs(P) <= tol, axis=0)
    dead_cols = np.all(np.abs(P) <= tol, axis=1)
    live = np.outer(~dead_rows, ~dead_cols)
    bad = live & (np.abs(a) > tol) & (np.abs(a - 1.0) > tol)
    hits = np.argwhere(bad)
    witness = (int(hits[0][0]), int(hits[0][1])) if hits.size else None
    return ZeroEntropyResult(
        zero=witness is None,
        witness=witness,
        dead_rows=tuple(int(i) for i in np.flatnonzero(dead_rows)),
        dead_cols=tuple(int(i) for i in np.flatnonzero(dead_cols)),
    )


def invariance_suite(U, D1, D2, F, tol=1e-9):
    """Check ``h(D1 U D2) = h(U)`` and ``h(U_F^-1 U U_F) = h(U)``.

    ``D1`` and ``D2`` are diagonals of unimodular numbers; ``F`` permutes
    atoms of equal mass.
    """
    d1 = np.asarray(D1, dtype=complex)
    d2 = np.asarray(D2, dtype=complex)
    if d1.shape != (U.J,) or d2.shape != (U.J,):
        raise ValidationError("diagonals must have one entry per index")
    if np.any(np.abs(np.abs(d1) - 1) > 1e-12) or np.any(np.abs(np.abs(d2) - 1) > 1e-12):
        raise ValidationError("diagonal factors must be unimodular")
    perm = np.asarray(F, dtype=np.int64)
    if not np.allclose(U.mu[perm], U.mu, rtol=1e-12, atol=0):
        raise ValidationError("permutation does not preserve the measure")
    UF = U.with_entries(koopman_matrix(perm, U.mu))
    sandwich = compose([U.with_entries(np.diag(d1)), U, U.with_entries(np.diag(d2))])
    conj = compose([adjoint(UF), U, UF])
    h = exact_entropy(U, cesaro_n=0).value
    h_diag = exact_entropy(sandwich, cesaro_n=0).value
    h_conj = exact_entropy(conj, cesaro_n=0).value
    b_equal = bool(
        np.allclose(
            b_map(sandwich, require_contraction=False).entries,
            b_map(U, require_contraction=False).entries,
            rtol=0,
            atol=1e-12,
        )
    )
    return {
        "h": h,
        "h_diagonal": h_diag,
        "h_conjugated": h_conj,
        "diagonal_gap": abs(h_diag - h),
        "conjugation_gap": abs(h_conj - h),
        "b_invariant": b_equal,
        "ok": abs(h_diag - h) < tol and abs(h_conj - h) < tol and b_equal,
    }
