"""Step functions: finite linear combinations of cell indicators.

A :class:`StepFunction` is always kept in canonical form (disjoint cells,
nonzero coefficients, a fixed ordering, adjacent equal pieces merged), so
two step functions that agree off a null set compare equal with ``==`` as
soon as their difference lives on measure-zero cells only; see
:func:`ae_equal`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .spaces import DomainError, Interval, MeasureSpace

__all__ = [
    "StepFunction",
    "MonotonicityError",
    "LevelSet",
    "VanishingVerdict",
    "canonicalize",
    "integrate_step",
    "add",
    "scale",
    "minimum",
    "maximum",
    "ae_equal",
    "markov_level_bound",
    "vanishing_check",
    "med",
]


class MonotonicityError(ValueError):
    """A sequence claimed to be monotone is not; carries the offending index and cell."""

    def __init__(self, message: str, index: int | None = None, witness=None):
        super().__init__(message)
        self.index = index
        self.witness = witness


class StepFunction:
    __slots__ = ("space", "terms", "_hash", "_integral")

    def __init__(self, space: MeasureSpace, terms: Iterable = (), *, _canonical: bool = False):
        self.space = space
        self.terms = tuple(terms) if _canonical else space.canonical_terms(terms)
        self._hash = None
        self._integral = None

    # construction -----------------------------------------------------

    @classmethod
    def zero(cls, space) -> StepFunction:
        return cls(space, (), _canonical=True)

    @classmethod
    def indicator(cls, space, *cells, coeff=1) -> StepFunction:
        return cls(space, [(c, coeff) for c in cells])

    @classmethod
    def interval(cls, lo, hi, coeff=1, space=None) -> StepFunction:
        """``coeff * chi_[lo, hi)`` on the real line."""
        from .spaces import IntervalLine

        return cls(space or IntervalLine(), [(Interval(lo, hi), coeff)])

    def _new(self, terms) -> StepFunction:
        return StepFunction(self.space, terms, _canonical=True)

    # evaluation ------------------------------------------------------

    def __call__(self, point) -> Fraction:
        return self.space.value(self.terms, point)

    def integral(self) -> Fraction:
        if self._integral is None:
            self._integral = sum((c * self.space.measure(cell) for cell, c in self.terms), Fraction(0))
        return self._integral

    @property
    def cells(self) -> tuple:
        return tuple(cell for cell, _ in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # vector lattice ----------------------------------------------------

    def _same(self, other: StepFunction):
        if not isinstance(other, StepFunction):
            raise TypeError(f"expected a StepFunction, got {type(other).__name__}")
        if other.space != self.space:
            raise DomainError(f"step functions live on different spaces: {self.space} vs {other.space}")

    def __add__(self, other: StepFunction) -> StepFunction:
        self._same(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        return StepFunction(self.space, self.terms + other.terms)

    def __neg__(self) -> StepFunction:
        return self._new((cell, -c) for cell, c in self.terms)

    def __sub__(self, other: StepFunction) -> StepFunction:
        return self + (-other)

    def __mul__(self, c) -> StepFunction:
        if isinstance(c, StepFunction):
            return self.pointwise(lambda a, b: a * b, c)
        c = Fraction(c)
        if c == 0:
            return StepFunction.zero(self.space)
        # scaling by c != 0 preserves the equality pattern, hence canonicity
        return self._new((cell, c * v) for cell, v in self.terms)

    __rmul__ = __mul__

    def pointwise(self, op: Callable, *others: StepFunction) -> StepFunction:
        for o in others:
            self._same(o)
        terms = self.space.combine([self.terms] + [o.terms for o in others], op)
        return self._new(terms)

    def minimum(self, other) -> StepFunction:
        return self.pointwise(min, other)

    def maximum(self, other) -> StepFunction:
        return self.pointwise(max, other)

    def positive_part(self) -> StepFunction:
        return self._new((cell, c) for cell, c in self.terms if c > 0)

    def negative_part(self) -> StepFunction:
        return self._new((cell, -c) for cell, c in self.terms if c < 0)

    def __abs__(self) -> StepFunction:
        return self.pointwise(abs)

    # order, a.e. -------------------------------------------------------

    def null_part_only(self) -> bool:
        """True if every term sits on a measure-zero cell, i.e. the function is 0 a.e."""
        return all(self.space.measure(cell) == 0 for cell, _ in self.terms)

    def nonneg_ae(self) -> bool:
        return all(c > 0 or self.space.measure(cell) == 0 for cell, c in self.terms)

    def negative_witness(self):
        """A positive-measure cell on which the function is negative, or None."""
        for cell, c in self.terms:
            if c < 0 and self.space.measure(cell) > 0:
                return cell
        return None

    def le_ae(self, other: StepFunction) -> bool:
        return (other - self).nonneg_ae()

    def ae_equal(self, other: StepFunction) -> bool:
        return (self - other).null_part_only()

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.space == other.space and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self):
        return f"StepFunction({self.space.name}, {self})"

    def __str__(self):
        body = ", ".join(f"{cell}: {c}" for cell, c in self.terms)
        return "step { " + body + " }" if body else "step { }"


# ---------------------------------------------------------------------------
# functional API


def canonicalize(raw: Iterable, space: MeasureSpace) -> StepFunction:
    return StepFunction(space, raw)


def integrate_step(phi: StepFunction) -> Fraction:
    return phi.integral()


def add(phi: StepFunction, psi: StepFunction) -> StepFunction:
    return phi + psi


def scale(c, phi: StepFunction) -> StepFunction:
    return c * phi


def minimum(phi: StepFunction, psi: StepFunction) -> StepFunction:
    return phi.minimum(psi)


def maximum(phi: StepFunction, psi: StepFunction) -> StepFunction:
    return phi.maximum(psi)


def ae_equal(phi: StepFunction, psi: StepFunction) -> bool:
    return phi.ae_equal(psi)


def med(lo: StepFunction, mid: StepFunction, hi: StepFunction) -> StepFunction:
    """Pointwise middle value; requires ``lo <= hi`` a.e."""
    if not lo.le_ae(hi):
        raise DomainError("med needs lo <= hi a.e.")
    return lo.pointwise(lambda a, b, c: max(a, min(b, c)), mid, hi)


@dataclass(frozen=True)
class LevelSet:
    cells: tuple
    total: Fraction
    bound: Fraction


def markov_level_bound(phi: StepFunction, t) -> LevelSet:
    """Cells where ``phi > t`` and their total measure, at most ``integral(phi) / t``."""
    t = Fraction(t)
    if t <= 0:
        raise DomainError("threshold must be positive")
    if not phi.nonneg_ae():
        raise DomainError(f"markov bound needs phi >= 0 a.e.; negative on {phi.negative_witness()}")
    cells = tuple(cell for cell, c in phi.terms if c > t)
    total = sum((phi.space.measure(c) for c in cells), Fraction(0))
    bound = phi.integral() / t
    assert total <= bound, "level-set measure exceeds integral / t"
    return LevelSet(cells, total, bound)


@dataclass
class VanishingVerdict:
    integrals: list[Fraction] = field(default_factory=list)
    start: int = 1
    monotone: bool = True
    first_below: int | None = None

    @property
    def integrals_nonincreasing(self) -> bool:
        return all(a >= b for a, b in zip(self.integrals, self.integrals[1:]))


def vanishing_check(
    seq: Callable[[int], StepFunction],
    eps,
    horizon: int,
    start: int = 1,
    stop_below: bool = True,
) -> VanishingVerdict:
    """Finite-horizon check of a decreasing-to-zero step sequence.

    Verifies ``seq(n+1) <= seq(n)`` a.e. exactly and records the first index
    whose integral is below ``eps``.  With ``stop_below`` the scan ends
    there.  Raises :class:`MonotonicityError` with a witness cell when the
    sequence increases somewhere on positive measure.
    """
    eps = Fraction(eps)
    verdict = VanishingVerdict(start=start)
    prev = None
    for n in range(start, horizon + 1):
        cur = seq(n)
        if not cur.nonneg_ae():
            raise MonotonicityError(f"term {n} is negative on positive measure", n, cur.negative_witness())
        if prev is not None:
            w = (prev - cur).negative_witness()
            if w is not None:
                raise MonotonicityError(f"term {n} exceeds term {n - 1} on {w}", n, w)
        val = cur.integral()
        verdict.integrals.append(val)
        if verdict.first_below is None and val < eps:
            verdict.first_below = n
            if stop_below:
                break
        prev = cur
    return verdict
