"""Product measures and Fubini-Tonelli.

For a step function on ``X x Y`` the inner integral ``x -> int f(x, y) dy``
is itself a step function on ``X`` (constant on each x-block of the
canonical form), so both iterated integrals are exact rationals and can be
compared with the double integral with zero tolerance.  Monotone and signed
functions on the product are handled termwise on their step streams.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .monotone import INFINITE, STABILIZED, R1Function, integral_r1
from .numeric import ExtendedRational, UNDEFINED, ext, ext_add
from .signed import DefinednessError, R2Function, as_r2
from .spaces import CountingSpace, DomainError, FiniteSet, NullCover, ProductSpace, Rectangle
from .step import StepFunction

__all__ = [
    "FubiniMismatch",
    "FubiniReport",
    "section_step",
    "inner_integral_x",
    "inner_integral_y",
    "transpose",
    "fubini_step",
    "fubini_r1",
    "fubini_r2",
    "fubini_pair",
    "SectionEvidence",
    "section_null_cover",
    "CountingCounterexample",
    "counting_counterexample",
]

EXACT = "exact-equal"
CONSISTENT = "evidence-consistent"
UNDEFINED_VERDICT = "undefined"
COUNTEREXAMPLE = "counterexample-documented"


class FubiniMismatch(AssertionError):
    """Double and iterated integrals of a step function disagree: an implementation bug."""


@dataclass
class FubiniReport:
    double: object  # ExtendedRational, IntegralEstimate or None
    iterated_xy: object
    iterated_yx: object
    verdict: str
    ladders: dict = field(default_factory=dict, repr=False)
    inner_x: StepFunction | None = field(default=None, repr=False)
    inner_y: StepFunction | None = field(default=None, repr=False)
    note: str = ""

    def transposed(self) -> FubiniReport:
        lad = dict(self.ladders)
        if "xy" in lad or "yx" in lad:
            lad["xy"], lad["yx"] = self.ladders.get("yx"), self.ladders.get("xy")
        return FubiniReport(self.double, self.iterated_yx, self.iterated_xy, self.verdict, lad,
                            self.inner_y, self.inner_x, self.note)


def _product(phi: StepFunction) -> ProductSpace:
    if not isinstance(phi.space, ProductSpace):
        raise DomainError(f"{phi.space} is not a product space")
    return phi.space


def section_step(phi: StepFunction, x) -> StepFunction:
    """``y -> phi(x, y)``."""
    space = _product(phi)
    return StepFunction(space.right, space.section_terms(phi.terms, x))


def inner_integral_x(phi: StepFunction) -> StepFunction:
    """``x -> int phi(x, y) dy`` as a step function on ``X``."""
    space = _product(phi)
    raw = []
    for xcell, sec in space.x_blocks(phi.terms):
        raw.append((xcell, StepFunction(space.right, sec).integral()))
    return StepFunction(space.left, raw)


def inner_integral_y(phi: StepFunction) -> StepFunction:
    """``y -> int phi(x, y) dx`` as a step function on ``Y``."""
    space = _product(phi)
    return StepFunction(space.right, [(cell.right, c * space.left.measure(cell.left)) for cell, c in phi.terms])


def transpose(phi: StepFunction) -> StepFunction:
    """``(y, x) -> phi(x, y)`` on ``Y x X``."""
    space = _product(phi)
    flipped = ProductSpace(space.right, space.left)
    return StepFunction(flipped, [(Rectangle(cell.right, cell.left), c) for cell, c in phi.terms])


def fubini_step(phi: StepFunction) -> FubiniReport:
    """Double integral and both iterated integrals, exact; raises on any mismatch."""
    ix, iy = inner_integral_x(phi), inner_integral_y(phi)
    double, xy, yx = phi.integral(), ix.integral(), iy.integral()
    if not double == xy == yx:
        raise FubiniMismatch(f"double {double}, iterated xy {xy}, iterated yx {yx} for {phi}")
    return FubiniReport(ext(double), ext(xy), ext(yx), EXACT, inner_x=ix, inner_y=iy)


def fubini_r1(f: R1Function, horizon: int = 50, **estimate_kw) -> FubiniReport:
    """Termwise Fubini on the defining stream; the three ladders must coincide at every index."""
    _product(f.term(0))
    double, xy, yx = [], [], []
    for k in range(horizon + 1):
        rep = fubini_step(f.term(k))
        double.append(rep.double.finite)
        xy.append(rep.iterated_xy.finite)
        yx.append(rep.iterated_yx.finite)
    est = integral_r1(f, horizon, **estimate_kw)
    ladders = {"double": double, "xy": xy, "yx": yx}
    if est.status == STABILIZED:
        return FubiniReport(est.value, est.value, est.value, EXACT, ladders)
    value = est.exact if est.exact is not None else (est.value if est.status == INFINITE else est)
    return FubiniReport(value, value, value, CONSISTENT, ladders,
                        note=f"ladders agree on indices 0..{horizon}; status {est.status}")


def _value(v):
    return v if isinstance(v, ExtendedRational) else None


def fubini_pair(f1: R1Function, f2: R1Function, horizon: int = 50, **estimate_kw) -> FubiniReport:
    """Fubini for ``f1 - f2``; an undefined verdict when neither side is certified finite."""
    try:
        f = R2Function(f1, f2)
    except DefinednessError as e:
        a, b = fubini_r1(f1, horizon, **estimate_kw), fubini_r1(f2, horizon, **estimate_kw)
        lad = {k: [p - q for p, q in zip(a.ladders[k], b.ladders[k])] for k in a.ladders}
        return FubiniReport(UNDEFINED, UNDEFINED, UNDEFINED, UNDEFINED_VERDICT, lad, note=str(e))
    return fubini_r2(f, horizon, **estimate_kw)


def fubini_r2(f, horizon: int = 50, **estimate_kw) -> FubiniReport:
    """Difference of the two monotone reports, with extended-sum semantics."""
    f = as_r2(f)
    if f.is_step_backed:
        return fubini_step(f.step())
    a, b = fubini_r1(f.pos, horizon, **estimate_kw), fubini_r1(f.neg, horizon, **estimate_kw)
    lad = {k: [p - q for p, q in zip(a.ladders[k], b.ladders[k])] for k in a.ladders}
    try:
        value = f.integral()
    except ValueError:
        value = None
    if value is None:
        pa, pb = _value(a.double), _value(b.double)
        if pa is not None and pb is not None:
            value = ext_add(pa, -pb)
    if value is None or value is UNDEFINED:
        return FubiniReport(None, None, None, CONSISTENT, lad, note="integral not determined; ladders agree")
    verdict = EXACT if a.verdict == EXACT and b.verdict == EXACT else CONSISTENT
    return FubiniReport(value, value, value, verdict, lad)


# ---------------------------------------------------------------------------
# sections of null sets


@dataclass
class SectionEvidence:
    rows: dict  # x -> list of partial section totals
    tonelli: list  # (k, product partial total, integral over x of section totals)

    @property
    def consistent(self) -> bool:
        return all(a == b for _, a, b in self.tonelli)


def section_null_cover(E: NullCover, xs, horizon: int = 20) -> SectionEvidence:
    """Sectioned covers ``{Q : P x Q in batch, x in P}`` with their partial totals.

    The function ``x -> sum_{j<=k} nu(section_j(x))`` is a step function on
    ``X`` whose integral equals the product partial total exactly; its
    integrals stay below the declared total, so the section totals are
    finite off a null set of ``x``.
    """
    space = E.space
    if not isinstance(space, ProductSpace):
        raise DomainError("section covers need a product space")
    rows = {x: [] for x in xs}
    tonelli = []
    acc = StepFunction.zero(space.left)
    for k in range(horizon):
        cells = E.batch(k)
        acc = acc + StepFunction(space.left, [(c.left, space.right.measure(c.right)) for c in cells])
        tonelli.append((k, E.partial_total(k), acc.integral()))
        for x in xs:
            sec = sum((space.right.measure(c.right) for c in cells if space.left.contains(c.left, x)), Fraction(0))
            prev = rows[x][-1] if rows[x] else Fraction(0)
            rows[x].append(prev + sec)
    return SectionEvidence(rows, tonelli)


# ---------------------------------------------------------------------------
# the counting-measure counterexample


@dataclass
class CountingCounterexample:
    window: int
    iterated_xy: Fraction
    iterated_yx: Fraction
    inner_x: dict  # x -> int f(x, y) dy over all of Z
    inner_y: dict
    positive_part: list  # integral of f+ on windows 0..N
    negative_part: list
    absolute: list
    verdict: str = COUNTEREXAMPLE


def _counterexample_terms(n: int):
    """Cells of ``f = chi{x = y+1} - chi{x = y-1}`` inside ``[-n, n]^2``."""
    pos = [(x, x - 1) for x in range(-n + 1, n + 1)]
    neg = [(x, x + 1) for x in range(-n, n)]
    return pos, neg


def counting_counterexample(window: int) -> CountingCounterexample:
    """Iterated integrals vanish, yet both parts grow without bound.

    ``f(x, y) = 1`` if ``x = y + 1``, ``-1`` if ``x = y - 1``, on ``Z x Z``
    with counting measures.  Every section has exactly one ``+1`` and one
    ``-1``, so each inner integral is 0; on the square window ``[-N, N]^2``
    the positive part has ``2N`` points, as does the negative part, so the
    double integral would be ``inf - inf``.
    """
    if window < 0:
        raise ValueError("window must be >= 0")
    Z = CountingSpace(ground=lambda e: isinstance(e, int), label="Z")
    P = ProductSpace(Z, Z)

    def full_section(x):
        # y -> f(x, y) on all of Z: +1 at y = x - 1, -1 at y = x + 1
        return StepFunction(Z, [(FiniteSet((x - 1,)), 1), (FiniteSet((x + 1,)), -1)])

    def full_section_y(y):
        return StepFunction(Z, [(FiniteSet((y + 1,)), 1), (FiniteSet((y - 1,)), -1)])

    inner_x = {x: full_section(x).integral() for x in range(-window, window + 1)}
    inner_y = {y: full_section_y(y).integral() for y in range(-window, window + 1)}
    positive, negative, absolute = [], [], []
    for n in range(window + 1):
        pos, neg = _counterexample_terms(n)
        fp = StepFunction(P, [(Rectangle(FiniteSet((x,)), FiniteSet((y,))), 1) for x, y in pos])
        fm = StepFunction(P, [(Rectangle(FiniteSet((x,)), FiniteSet((y,))), 1) for x, y in neg])
        positive.append(fp.integral())
        negative.append(fm.integral())
        absolute.append((fp + fm).integral())
    return CountingCounterexample(
        window,
        sum(inner_x.values(), Fraction(0)),
        sum(inner_y.values(), Fraction(0)),
        inner_x,
        inner_y,
        positive,
        negative,
        absolute,
    )
