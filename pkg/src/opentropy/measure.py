"""Atomic probability measures on the non-negative integers and weighted l2 / l1.

A :class:`Measure` assigns a strictly positive weight to each atom ``j``.
Finite measures store their weights explicitly; infinite families
(geometric, and the dyadic-block family used by the block operator
examples) produce weights on demand and report the tail mass
``1 - sum_{j<J} mu_j`` from a closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from ._validation import NORMALIZATION_TOL, check_probability, check_vector, check_weights
from .exceptions import MeasureError, ValidationError

__all__ = [
    "Measure",
    "WeightedVector",
    "inner_l2mu",
    "norm_l2mu",
    "norm_l1",
    "norm_l1mu",
    "entropy_of_measure",
    "dyadic_block_bounds",
]

CONDIT1_VARIANTS = ("proof", "literal")


def dyadic_block_bounds(m):
    """Index range ``[start, stop)`` of dyadic block ``m >= 1`` (size ``2**m``)."""
    if m < 1:
        raise ValidationError("dyadic blocks are numbered from 1")
    return (1 << m) - 2, (1 << (m + 1)) - 2


def _dyadic_block_of(s):
    return (s + 2).bit_length() - 1


@dataclass(frozen=True, eq=False)
class Measure:
    """Positive weights ``mu_j`` on atoms ``j = 0, 1, ...`` summing to one.

    Use the constructors :meth:`explicit`, :meth:`uniform`, :meth:`geometric`
    and :meth:`condit1` rather than instantiating directly.
    """

    kind: str
    values: np.ndarray | None = field(default=None, repr=False)
    ratio: float | None = None
    variant: str | None = None

    # -- constructors -----------------------------------------------------
    @classmethod
    def explicit(cls, weights, tol=NORMALIZATION_TOL):
        w = check_probability(np.asarray(weights, dtype=float), tol=tol).copy()
        w.flags.writeable = False
        return cls(kind="explicit", values=w)

    @classmethod
    def uniform(cls, J):
        return cls.explicit(np.full(int(J), 1.0 / int(J)), tol=1e-12)

    @classmethod
    def geometric(cls, ratio):
        r = float(ratio)
        if not 0.0 < r < 1.0:
            raise MeasureError(f"geometric ratio must lie in (0, 1), got {ratio!r}")
        return cls(kind="geometric", ratio=r)

    @classmethod
    def condit1(cls, variant="proof"):
        """Dyadic-block measure paired with block sizes ``2**m``.

        Block ``m >= 1`` occupies ``[2**m - 2, 2**(m+1) - 2)``. Its first atom
        carries half of the block mass and the remaining ``2**m - 1`` atoms
        share the other half equally.

        ``variant="proof"``: both halves equal ``C / (2 m**1.5)`` and
        ``C = 1 / zeta(3/2)``, so block ``m`` has mass ``C / m**1.5``.
        ``variant="literal"``: halves ``C / (2 m**1.5)`` and ``C / (2 m**2)``
        with ``C = 2 / (zeta(3/2) + zeta(2))``.
        """
        if variant not in CONDIT1_VARIANTS:
            raise MeasureError(f"unknown condit1 variant {variant!r}")
        return cls(kind="condit1", variant=variant)

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict) or "kind" not in doc:
            raise MeasureError("measure spec must be an object with a 'kind'")
        kind = doc["kind"]
        if kind == "explicit":
            return cls.explicit(doc["weights"])
        if kind == "uniform":
            return cls.uniform(doc["size"])
        if kind == "geometric":
            return cls.geometric(doc["ratio"])
        if kind == "condit1":
            return cls.condit1(doc.get("variant", "proof"))
        raise MeasureError(f"unknown measure kind {kind!r}")

    def to_dict(self):
        if self.kind == "explicit":
            return {"kind": "explicit", "weights": [float(v) for v in self.values]}
        if self.kind == "geometric":
            return {"kind": "geometric", "ratio": self.ratio}
        return {"kind": "condit1", "variant": self.variant}

    def __eq__(self, other):
        return isinstance(other, Measure) and self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(self.to_dict()))

    # -- structure --------------------------------------------------------
    @property
    def size(self):
        """Number of atoms, or ``None`` for an infinite family."""
        return len(self.values) if self.kind == "explicit" else None

    @property
    def condit1_constant(self):
        if self.kind != "condit1":
            raise MeasureError("only condit1 measures carry a normalizing constant")
        if self.variant == "proof":
            return 1.0 / float(zeta(1.5))
        return 2.0 / (float(zeta(1.5)) + float(zeta(2.0)))

    def block_mass(self, m):
        """Mass of dyadic block ``m`` (condit1 only)."""
        C = self.condit1_constant
        lead = C / (2.0 * m**1.5)
        rest = lead if self.variant == "proof" else C / (2.0 * m**2)
        return lead + rest

    def weight(self, j):
        j = int(j)
        if j < 0:
            raise ValidationError("atom index must be non-negative")
        if self.kind == "explicit":
            if j >= len(self.values):
                raise MeasureError(f"atom {j} beyond finite measure of size {len(self.values)}")
            return float(self.values[j])
        if self.kind == "geometric":
            return (1.0 - self.ratio) * self.ratio**j
        m = _dyadic_block_of(j)
        start, stop = dyadic_block_bounds(m)
        C = self.condit1_constant
        if j == start:
            return C / (2.0 * m**1.5)
        rest = C / (2.0 * m**1.5) if self.variant == "proof" else C / (2.0 * m**2)
        return rest / (stop - start - 1)

    def weights(self, J):
        """First ``J`` weights as a read-only float array."""
        J = int(J)
        if J < 0:
            raise ValidationError("J must be non-negative")
        if self.kind == "explicit":
            if J > len(self.values):
                raise MeasureError(
                    f"requested {J} weights from a finite measure of size {len(self.values)}"
                )
            out = np.array(self.values[:J])
        elif self.kind == "geometric":
            out = (1.0 - self.ratio) * self.ratio ** np.arange(J, dtype=float)
        else:
            out = np.array([self.weight(j) for j in range(J)])
        out.flags.writeable = False
        return out

    def prefix_mass(self, J):
        """``M_J = sum_{j<J} mu_j``."""
        if self.kind == "geometric":
            return 1.0 - self.ratio ** int(J)
        return 1.0 - self.tail_mass(J) if self.kind == "condit1" else float(np.sum(self.weights(J)))

    def tail_mass(self, J):
        """``1 - M_J``; closed form for the infinite families."""
        J = int(J)
        if self.kind == "geometric":
            return self.ratio**J
        if self.kind == "explicit":
            return float(np.sum(self.values[J:])) if J <= len(self.values) else 0.0
        m = _dyadic_block_of(J)
        start, stop = dyadic_block_bounds(m)
        done = 0.0
        if J > start:
            done = self.weight(start) + (J - start - 1) * self.weight(stop - 1)
        C = self.condit1_constant
        if self.variant == "proof":
            later = C * float(zeta(1.5, m + 1))
        else:
            later = C / 2.0 * (float(zeta(1.5, m + 1)) + float(zeta(2.0, m + 1)))
        return (self.block_mass(m) - done) + later

    def entropy(self, J=None):
        """``-sum_{j<J} mu_j log mu_j`` (natural log)."""
        if J is None:
            if self.size is None:
                raise MeasureError("an infinite measure needs an explicit truncation J")
            J = self.size
        return entropy_of_measure(self, J)


def entropy_of_measure(mu, J):
    """Shannon entropy of the first ``J`` atoms, in nats."""
    if isinstance(mu, Measure):
        w = mu.weights(J)
    else:
        w = check_weights(mu)
        if J > w.size:
            raise MeasureError(f"J={J} exceeds the {w.size} available weights")
        w = w[:J]
    return float(-np.sum(w * np.log(w)))


@dataclass(frozen=True, eq=False)
class WeightedVector:
    """A complex vector paired with the weights of the inner product."""

    entries: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        e = check_vector(self.entries, name="entries", dtype=complex)
        m = check_vector(self.mu, name="mu", dtype=float)
        if e.shape != m.shape:
            raise ValidationError(f"entries length {e.size} does not match measure length {m.size}")
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "mu", m)

    def __len__(self):
        return self.entries.size


def _same_space(x, y):
    if len(x) != len(y):
        raise ValidationError(f"length mismatch: {len(x)} vs {len(y)}")
    if not np.array_equal(x.mu, y.mu):
        raise ValidationError("vectors live on different measures")


def inner_l2mu(x, y):
    """``<x, y> = sum_j mu_j x_j conj(y_j)``."""
    _same_space(x, y)
    return complex(np.sum(x.mu * x.entries * np.conj(y.entries)))


def norm_l2mu(x):
    return math.sqrt(max(inner_l2mu(x, x).real, 0.0))


def norm_l1(x):
    return float(np.sum(np.abs(np.asarray(x))))


def norm_l1mu(x):
    return float(np.sum(x.mu * np.abs(x.entries)))
