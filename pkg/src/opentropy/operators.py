"""Operator families on l2(N0, mu) and their finite sections ``U_J = p_J U q_J``.

Matrix entries follow the convention ``(W x)_j = sum_k W_jk x_k`` on plain
coordinates, with the weighted inner product ``<x, y> = sum mu_j x_j conj(y_j)``.
In that convention the Euclidean picture is ``diag(sqrt mu) W diag(sqrt mu)^-1``.

Three families (``column_A``, ``hankel_B``, ``block_Balpha``) are defined
directly as matrices on l1 rather than as operators on l2(mu); their
truncations are semibistochastic inputs for the entropy layer and are
flagged by ``OperatorSpec.space == "l1"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_permutation, check_square, check_weights
from .exceptions import SpecError, ValidationError
from .measure import Measure

__all__ = [
    "DenseMatrix",
    "OperatorSpec",
    "truncate",
    "adjoint",
    "compose",
    "is_contraction",
    "operator_norm",
    "koopman_matrix",
    "column_a_width",
    "block_sizes",
    "KINDS",
    "SB_KINDS",
]

L2_KINDS = (
    "dense",
    "diagonal",
    "koopman",
    "shift_right",
    "shift_left",
    "indicator",
    "two_band_D",
    "composed",
)
SB_KINDS = ("column_A", "hankel_B", "block_Balpha")
KINDS = L2_KINDS + SB_KINDS

_EQUAL_MEASURE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """A ``J x J`` complex matrix together with the weights ``mu_0..mu_{J-1}``."""

    entries: np.ndarray
    mu: np.ndarray
    measure: Measure | None = field(default=None, repr=False)

    def __post_init__(self):
        a = check_square(self.entries, name="entries", dtype=complex).copy()
        m = check_weights(self.mu, length=a.shape[0]).copy()
        a.flags.writeable = False
        m.flags.writeable = False
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "mu", m)

    @classmethod
    def from_measure(cls, entries, measure):
        entries = np.asarray(entries)
        return cls(entries, measure.weights(entries.shape[0]), measure)

    @property
    def J(self):
        return self.entries.shape[0]

    @property
    def shape(self):
        return self.entries.shape

    def with_entries(self, entries):
        return DenseMatrix(entries, self.mu, self.measure)

    def euclidean(self):
        """Matrix of the same operator in an orthonormal basis."""
        s = np.sqrt(self.mu)
        return s[:, None] * self.entries / s[None, :]

    def __matmul__(self, other):
        return compose([self, other])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def _check_same_space(Ws):
    J = Ws[0].J
    for W in Ws[1:]:
        if W.J != J:
            raise ValidationError(f"dimension mismatch: {W.J} vs {J}")
        if not np.array_equal(W.mu, Ws[0].mu):
            raise ValidationError("operators act on different measures")


def compose(Ws):
    """Product ``W_0 W_1 ... W_m`` in the given order."""
    Ws = list(Ws)
    if not Ws:
        raise ValidationError("compose needs at least one operator")
    _check_same_space(Ws)
    out = Ws[0].entries
    for W in Ws[1:]:
        out = out @ W.entries
    return Ws[0].with_entries(out)


def adjoint(W):
    """Adjoint in l2(mu): ``W*_jk = (mu_k / mu_j) conj(W_kj)``."""
    mu = W.mu
    return W.with_entries((mu[None, :] / mu[:, None]) * np.conj(W.entries.T))


def operator_norm(W):
    """Operator norm of ``W`` on l2(mu)."""
    return float(np.linalg.norm(W.euclidean(), 2))


def is_contraction(W, tol=1e-9):
    return operator_norm(W) <= 1.0 + tol


# ---------------------------------------------------------------------------
# specs
# ---------------------------------------------------------------------------


def _parse_complex(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise SpecError(f"complex entries are [re, im] pairs, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _dump_complex(z):
    z = _parse_complex(z)
    return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Symbolic description of an operator that can be truncated to any size.

    ``params`` by kind:

    ``dense``: ``entries`` (square matrix; complex numbers as ``[re, im]``)
    ``diagonal``: ``values`` (sequence ``g``; length bounds the truncation)
    ``koopman``: ``perm`` with ``F(j) = perm[j]``; identity beyond its length
    ``shift_right``, ``shift_left``, ``two_band_D``: none
    ``indicator``: ``set`` of indices
    ``column_A``: ``b`` (probability vector; zero beyond its length)
    ``hankel_B``: ``alpha`` (non-negative, sum at most one; zero beyond)
    ``block_Balpha``: ``sizes`` (non-decreasing positive ints) or
    ``rule`` = ``"pow2"`` (sizes ``2**m``) / ``"constant"`` with ``n``
    ``composed``: ``factors``, a list of spec documents, leftmost first
    """

    kind: str
    params: dict
    measure: Measure

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown operator kind {self.kind!r}")
        if not isinstance(self.measure, Measure):
            raise SpecError("spec needs a Measure")
        object.__setattr__(self, "params", dict(self.params))
        _VALIDATORS.get(self.kind, lambda s: None)(self)

    @property
    def space(self):
        return "l1" if self.kind in SB_KINDS else "l2"

    # -- convenience constructors ------------------------------------------
    @classmethod
    def dense(cls, entries, measure):
        rows = [[_dump_complex(z) for z in row] for row in np.asarray(entries, dtype=complex)]
        return cls("dense", {"entries": rows}, measure)

    @classmethod
    def diagonal(cls, values, measure):
        return cls("diagonal", {"values": [_dump_complex(v) for v in values]}, measure)

    @classmethod
    def koopman(cls, perm, measure):
        return cls("koopman", {"perm": [int(p) for p in perm]}, measure)

    @classmethod
    def indicator(cls, indices, measure):
        return cls("indicator", {"set": sorted(int(i) for i in indices)}, measure)

    @classmethod
    def block_balpha(cls, sizes=None, rule=None, n=None, measure=None):
        params = {}
        if sizes is not None:
            params["sizes"] = [int(s) for s in sizes]
        if rule is not None:
            params["rule"] = rule
        if n is not None:
            params["n"] = int(n)
        return cls("block_Balpha", params, measure)

    @classmethod
    def from_dict(cls, doc, measure=None):
        if not isinstance(doc, dict) or "kind" not in doc:
            raise SpecError("operator spec must be an object with a 'kind'")
        if "measure" in doc:
            measure = Measure.from_dict(doc["measure"])
        if measure is None:
            raise SpecError("operator spec has no measure")
        params = {k: v for k, v in doc.items() if k not in ("kind", "measure")}
        return cls(doc["kind"], params, measure)

    def to_dict(self, include_measure=True):
        doc = {"kind": self.kind, **self.params}
        if include_measure:
            doc["measure"] = self.measure.to_dict()
        return doc

    # -- sizes -------------------------------------------------------------
    def max_size(self):
        """Largest materializable ``J`` (``None`` if unbounded)."""
        bound = self.measure.size
        k, p = self.kind, self.params
        if k == "dense":
            n = len(p["entries"])
            bound = n if bound is None else min(bound, n)
        elif k == "diagonal":
            n = len(p["values"])
            bound = n if bound is None else min(bound, n)
        elif k == "block_Balpha" and "sizes" in p:
            n = sum(p["sizes"])
            bound = n if bound is None else min(bound, n)
        elif k == "composed":
            for f in self.factors():
                fb = f.max_size()
                if fb is not None:
                    bound = fb if bound is None else min(bound, fb)
        return bound

    def factors(self):
        return [OperatorSpec.from_dict(f, self.measure) for f in self.params["factors"]]

    def reach(self, J):
        """Size needed so that rows ``< J`` of the infinite matrix are complete."""
        k = self.kind
        if k in ("shift_left", "two_band_D"):
            return J + 1
        if k == "koopman":
            perm = self.params["perm"]
            images = [perm[j] if j < len(perm) else j for j in range(J)]
            return max([J] + [f + 1 for f in images])
        if k == "composed":
            r = J
            for f in self.factors():
                r = max(r, f.reach(r))
            return r
        return J


# -- per-kind validation ------------------------------------------------------


def _validate_koopman(spec):
    perm = check_permutation(spec.params.get("perm", []))
    mu = spec.measure
    for j, f in enumerate(perm):
        a, b = mu.weight(j), mu.weight(f)
        if not math.isclose(a, b, rel_tol=_EQUAL_MEASURE_RTOL, abs_tol=0.0):
            raise SpecError(
                f"Koopman map sends atom {j} (mass {a!r}) to atom {f} (mass {b!r}); "
                "automorphisms only permute atoms of equal mass"
            )


def _validate_diagonal(spec):
    vals = [_parse_complex(v) for v in spec.params.get("values", [])]
    if not vals:
        raise SpecError("diagonal spec needs non-empty 'values'")
    if spec.params.get("contraction") and any(abs(v) > 1.0 + 1e-12 for v in vals):
        raise SpecError("diagonal declared a contraction but has |d_j| > 1")


def _validate_block(spec):
    p = spec.params
    if "sizes" in p:
        sizes = p["sizes"]
        if not sizes or any(int(s) != s or s < 1 for s in sizes):
            raise SpecError("block sizes must be positive integers")
        if any(b < a for a, b in zip(sizes, sizes[1:])):
            raise SpecError("block sizes must be non-decreasing")
    elif p.get("rule") == "constant":
        if int(p.get("n", 0)) < 1:
            raise SpecError("constant block rule needs n >= 1")
    elif p.get("rule") != "pow2":
        raise SpecError("block_Balpha needs 'sizes' or rule 'pow2' / 'constant'")


def _validate_column_a(spec):
    b = np.asarray(spec.params.get("b", []), dtype=float)
    if b.size == 0 or np.any(b < 0) or abs(b.sum() - 1.0) > 1e-12:
        raise SpecError("column_A needs a non-negative 'b' summing to one")


def _validate_hankel(spec):
    a = np.asarray(spec.params.get("alpha", []), dtype=float)
    if a.size == 0 or np.any(a < 0) or a.sum() > 1.0 + 1e-12:
        raise SpecError("hankel_B needs non-negative 'alpha' with sum at most one")


def _validate_composed(spec):
    fs = spec.params.get("factors")
    if not fs:
        raise SpecError("composed spec needs non-empty 'factors'")
    for f in spec.factors():
        if f.space != "l2":
            raise SpecError("only l2 operators can be composed")


def _validate_dense(spec):
    rows = spec.params.get("entries")
    if not rows or any(len(r) != len(rows) for r in rows):
        raise SpecError("dense spec needs a square 'entries' matrix")


def _validate_indicator(spec):
    s = spec.params.get("set")
    if s is None or any(int(i) < 0 for i in s):
        raise SpecError("indicator spec needs a 'set' of non-negative indices")


_VALIDATORS = {
    "koopman": _validate_koopman,
    "diagonal": _validate_diagonal,
    "block_Balpha": _validate_block,
    "column_A": _validate_column_a,
    "hankel_B": _validate_hankel,
    "composed": _validate_composed,
    "dense": _validate_dense,
    "indicator": _validate_indicator,
}


# -- helpers for the l1 families ----------------------------------------------


def column_a_width(b):
    """Number ``N`` of non-zero columns: ``N b_max <= 1 < (N + 1) b_max``."""
    bmax = max(float(x) for x in b)
    return int(math.floor(1.0 / bmax + 1e-12))


def block_sizes(spec, upto):
    """Block sizes ``alpha_1, alpha_2, ...`` until their sum reaches ``upto``."""
    p = spec.params
    out, total, m = [], 0, 1
    while total < upto:
        if "sizes" in p:
            if m > len(p["sizes"]):
                break
            s = int(p["sizes"][m - 1])
        elif p["rule"] == "constant":
            s = int(p["n"])
        else:
            s = 1 << m
        out.append(s)
        total += s
        m += 1
    return out


def koopman_matrix(perm, mu):
    """``(U_F)_jk = sqrt(mu_k / mu_j) delta_{F(j) k}`` on ``{0..J-1}``."""
    perm = np.asarray(perm, dtype=np.int64)
    mu = np.asarray(mu, dtype=float)
    J = mu.size
    U = np.zeros((J, J), dtype=complex)
    for j in range(J):
        f = int(perm[j]) if j < perm.size else j
        if f < J:
            U[j, f] = math.sqrt(mu[f] / mu[j])
    return U


# -- truncation ---------------------------------------------------------------


def _materialize(spec, J):
    k, p = spec.kind, spec.params
    if k == "dense":
        full = np.array([[_parse_complex(z) for z in row] for row in p["entries"]])
        return full[:J, :J]
    if k == "diagonal":
        vals = np.array([_parse_complex(v) for v in p["values"][:J]])
        return np.diag(vals)
    if k == "indicator":
        d = np.zeros(J)
        idx = [i for i in p["set"] if i < J]
        d[idx] = 1.0
        return np.diag(d).astype(complex)
    if k == "koopman":
        return koopman_matrix(p["perm"], spec.measure.weights(J))
    if k == "shift_right":
        return np.eye(J, k=-1, dtype=complex)
    if k == "shift_left":
        return np.eye(J, k=1, dtype=complex)
    if k == "two_band_D":
        mu = spec.measure.weights(J)
        U = np.eye(J, dtype=complex) * math.sqrt(0.5)
        for j in range(J - 1):
            U[j, j + 1] = math.sqrt(mu[j + 1] / mu[j] * 0.5)
        return U
    if k == "column_A":
        b = np.zeros(J)
        src = np.asarray(p["b"], dtype=float)[:J]
        b[: src.size] = src
        A = np.zeros((J, J))
        A[:, : min(column_a_width(p["b"]), J)] = b[:, None]
        return A
    if k == "hankel_B":
        alpha = np.asarray(p["alpha"], dtype=float)
        idx = np.add.outer(np.arange(J), np.arange(J))
        out = np.zeros((J, J))
        ok = idx < alpha.size
        out[ok] = alpha[idx[ok]]
        return out
    if k == "block_Balpha":
        out = np.zeros((J, J))
        start = 0
        for s in block_sizes(spec, J):
            stop = min(start + s, J)
            out[start:stop, start:stop] = 1.0 / s
            start += s
        return out
    if k == "composed":
        R = spec.reach(J)
        prod = np.eye(R, dtype=complex)
        for f in spec.factors():
            prod = prod @ _materialize(f, R)
        return prod[:J, :J]
    raise SpecError(f"cannot materialize kind {k!r}")  # pragma: no cover


def truncate(spec, J):
    """Finite section ``U_J = p_J U q_J`` as a :class:`DenseMatrix`."""
    J = int(J)
    if J < 1:
        raise SpecError("J must be at least 1")
    bound = spec.max_size()
    if bound is not None and J > bound:
        raise SpecError(f"{spec.kind} spec can produce at most {bound} rows, asked for {J}")
    if spec.kind == "composed":
        R = spec.reach(J)
        if bound is not None and R > bound:
            raise SpecError(f"composed spec needs {R} intermediate indices, only {bound} available")
    entries = _materialize(spec, J)
    return DenseMatrix(entries, spec.measure.weights(J), spec.measure)
