"""Parameter sets (a, b, c) for wanderer ensembles.

A parameter set consists of four weakly decreasing, nonnegative, summable
sequences ``a_plus, a_minus, b_plus, b_minus`` (stored as finite tuples; the
tail is implicitly zero) and two reals ``c_plus, c_minus``.  Three classes:

- ``general``: any valid parameter set,
- ``finite``:  ``c_minus == 0`` (the minus-side sequences are finite lists
  by construction),
- ``positive``: finite, and additionally ``c_plus == 0`` and both minus-side
  sequences vanish.

The positive class is the one amenable to direct sampling; ``normalize_to_pos``
maps any finite-class set to a positive-class set together with a time shift
``Delta`` and the value shift ``c_plus``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field


class NonMonotone(ValueError):
    """A parameter sequence increases somewhere."""


class Negative(ValueError):
    """A parameter entry is negative."""


class NotFiniteClass(ValueError):
    """Operation requires a finite-class parameter set."""


def _check_sequence(name: str, seq: tuple[float, ...]) -> tuple[float, ...]:
    seq = tuple(float(v) for v in seq)
    for v in seq:
        if not math.isfinite(v):
            raise ValueError(f"{name}: entries must be finite, got {v}")
        if v < 0:
            raise Negative(f"{name}: entries must be nonnegative, got {v}")
    for i in range(1, len(seq)):
        if seq[i] > seq[i - 1]:
            raise NonMonotone(f"{name}: sequence must be weakly decreasing")
    return seq


@dataclass(frozen=True)
class SupportInfo:
    """Largest index with a strictly positive entry in each sequence (0 if none)."""

    J_a_plus: int
    J_a_minus: int
    J_b_plus: int
    J_b_minus: int


@dataclass(frozen=True)
class DomainEdges:
    """Admissible anchor edges for the kernel contours.

    ``underline_a`` in [0, inf]: the z-contour must cross the real axis
    strictly below it.  ``underline_b`` in [-inf, 0]: the w-contour must
    cross strictly above it.
    """

    underline_a: float
    underline_b: float


@dataclass(frozen=True)
class ParamSet:
    a_plus: tuple[float, ...] = ()
    a_minus: tuple[float, ...] = ()
    b_plus: tuple[float, ...] = ()
    b_minus: tuple[float, ...] = ()
    c_plus: float = 0.0
    c_minus: float = 0.0
    klass: str = field(init=False, default="general")

    def __post_init__(self):
        object.__setattr__(self, "a_plus", _check_sequence("a_plus", self.a_plus))
        object.__setattr__(self, "a_minus", _check_sequence("a_minus", self.a_minus))
        object.__setattr__(self, "b_plus", _check_sequence("b_plus", self.b_plus))
        object.__setattr__(self, "b_minus", _check_sequence("b_minus", self.b_minus))
        object.__setattr__(self, "c_plus", float(self.c_plus))
        object.__setattr__(self, "c_minus", float(self.c_minus))
        if self.c_plus < 0 or self.c_minus < 0:
            raise Negative("c_plus and c_minus must be nonnegative")
        s = self.support_indices()
        if self.c_minus == 0.0:
            if self.c_plus == 0.0 and s.J_a_minus == 0 and s.J_b_minus == 0:
                object.__setattr__(self, "klass", "positive")
            else:
                object.__setattr__(self, "klass", "finite")

    # -- classification -------------------------------------------------

    def support_indices(self) -> SupportInfo:
        def j(seq):
            out = 0
            for i, v in enumerate(seq):
                if v > 0:
                    out = i + 1
            return out

        return SupportInfo(j(self.a_plus), j(self.a_minus), j(self.b_plus), j(self.b_minus))

    def is_positive_class(self) -> bool:
        return self.klass == "positive"

    def is_finite_class(self) -> bool:
        return self.klass in ("finite", "positive")

    # -- leading entries (0 for empty sequences) ------------------------

    @property
    def a1_plus(self) -> float:
        return self.a_plus[0] if self.a_plus else 0.0

    @property
    def a1_minus(self) -> float:
        return self.a_minus[0] if self.a_minus else 0.0

    @property
    def b1_plus(self) -> float:
        return self.b_plus[0] if self.b_plus else 0.0

    @property
    def b1_minus(self) -> float:
        return self.b_minus[0] if self.b_minus else 0.0

    def domain_edges(self) -> DomainEdges:
        if self.a1_minus + self.b1_minus > 0 or self.c_minus != 0.0:
            ua = 0.0
        elif self.a1_plus == 0.0:
            ua = math.inf
        else:
            ua = 1.0 / self.a1_plus
        if self.a1_minus + self.b1_minus > 0 or self.c_minus != 0.0:
            ub = 0.0
        elif self.b1_plus == 0.0:
            ub = -math.inf
        else:
            ub = -1.0 / self.b1_plus
        return DomainEdges(ua, ub)

    def reflected(self) -> "ParamSet":
        """Parameter set of the time-reflected ensemble (a and b swap roles)."""
        return ParamSet(
            a_plus=self.b_plus,
            a_minus=self.b_minus,
            b_plus=self.a_plus,
            b_minus=self.a_minus,
            c_plus=self.c_plus,
            c_minus=self.c_minus,
        )

    def translated(self, v: float) -> "ParamSet":
        """Parameter set appearing in the shift identity (c_plus gains v)."""
        return ParamSet(
            a_plus=self.a_plus,
            a_minus=self.a_minus,
            b_plus=self.b_plus,
            b_minus=self.b_minus,
            c_plus=self.c_plus + v,
            c_minus=self.c_minus,
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "a_plus": list(self.a_plus),
            "a_minus": list(self.a_minus),
            "b_plus": list(self.b_plus),
            "b_minus": list(self.b_minus),
            "c_plus": self.c_plus,
            "c_minus": self.c_minus,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @staticmethod
    def from_dict(d: dict) -> "ParamSet":
        return ParamSet(
            a_plus=tuple(d.get("a_plus", ())),
            a_minus=tuple(d.get("a_minus", ())),
            b_plus=tuple(d.get("b_plus", ())),
            b_minus=tuple(d.get("b_minus", ())),
            c_plus=d.get("c_plus", 0.0),
            c_minus=d.get("c_minus", 0.0),
        )

    @staticmethod
    def from_json(s: str) -> "ParamSet":
        return ParamSet.from_dict(json.loads(s))


def validate(a_plus=(), a_minus=(), b_plus=(), b_minus=(), c_plus=0.0, c_minus=0.0) -> ParamSet:
    """Build a validated ParamSet (sequences weakly decreasing, nonnegative)."""
    return ParamSet(tuple(a_plus), tuple(a_minus), tuple(b_plus), tuple(b_minus), c_plus, c_minus)


def support_indices(p: ParamSet) -> SupportInfo:
    return p.support_indices()


def domain_edges(p: ParamSet) -> DomainEdges:
    return p.domain_edges()


def _merged_decreasing(plus: tuple[float, ...], minus: tuple[float, ...]) -> tuple[float, ...]:
    """Decreasing merge of {plus_i} with {1/minus_i} (zeros dropped)."""
    vals = [v for v in plus if v > 0] + [1.0 / v for v in minus if v > 0]
    return tuple(sorted(vals, reverse=True))


def normalize_to_pos(p: ParamSet) -> tuple[ParamSet, float]:
    """Map a finite-class parameter set to the positive class.

    Returns ``(p_pos, Delta)`` such that the ensemble of ``p`` at time ``t``
    has the law of the ensemble of ``p_pos`` at time ``t - Delta``, shifted
    up by ``p.c_plus``.  The minus-side entries are folded into the plus
    side as reciprocals; when the two minus-side supports differ in length,
    a Mobius reparametrization with shift ``Delta`` balances the counts by
    inserting ``|J_a_minus - J_b_minus|`` entries equal to ``1/|Delta|``.
    """
    if not p.is_finite_class():
        raise NotFiniteClass("normalize_to_pos requires c_minus == 0")
    s = p.support_indices()
    a_hat = _merged_decreasing(p.a_plus, p.a_minus)
    b_hat = _merged_decreasing(p.b_plus, p.b_minus)
    h = s.J_a_minus - s.J_b_minus
    if h == 0:
        out = ParamSet(a_plus=a_hat, b_plus=b_hat)
        return out, 0.0
    if h > 0:
        # need 1 - Delta * a_hat_1 > 0
        delta = 0.5 * min(1.0 / a_hat[0] if a_hat else math.inf, 1.0)
        a_new = tuple(v / (1.0 - delta * v) for v in a_hat)
        b_new = tuple(v / (1.0 + delta * v) for v in b_hat) + (1.0 / delta,) * h
    else:
        # need 1 + Delta * b_hat_1 > 0 with Delta < 0
        delta = -0.5 * min(1.0 / b_hat[0] if b_hat else math.inf, 1.0)
        a_new = tuple(v / (1.0 - delta * v) for v in a_hat) + (-1.0 / delta,) * (-h)
        b_new = tuple(v / (1.0 + delta * v) for v in b_hat)
    a_new = tuple(sorted((v for v in a_new if v > 0), reverse=True))
    b_new = tuple(sorted((v for v in b_new if v > 0), reverse=True))
    out = ParamSet(a_plus=a_new, b_plus=b_new)
    return out, delta
