"""Measurable functions and sets, and the measure they induce.

A :class:`MeasurableFunction` is a witness stream of step functions that the
caller declares to converge a.e.; convergence itself is not decidable, so
only its consequences are checked.  When the limit is known in closed form
(``target``) or the stream is constant from some index (``stable_from``),
integrals become exact.

A :class:`MeasurableSet` carries an indicator in the signed class.  Finite
unions of cells are kept as plain step functions, which keeps all the set
algebra exact.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from . import monotone as r1
from . import signed as r2
from .monotone import R1Function, integral_r1
from .numeric import INF, ExtendedRational, ext
from .signed import (
    BeppoLeviReport,
    DominatedReport,
    DominationError,
    FatouReport,
    L1Certificate,
    R2Function,
    UnresolvedIntegral,
    as_r2,
    dominated_check,
    fatou_check,
    generalized_beppo_levi,
    l1_check,
)
from .spaces import DomainError, MeasureSpace, NullCover
from .step import MonotonicityError, StepFunction, med

__all__ = [
    "MeasurableFunction",
    "MeasurableSet",
    "NullEvidence",
    "measure_of",
    "difference",
    "union",
    "intersection",
    "dominated_to_l1",
    "nonneg_to_r2",
    "h_transform",
    "h_inverse",
    "limit_of_measurable",
    "fatou_general",
    "FatouGeneralReport",
    "null_iff_measure_zero",
]


class MeasurableFunction:
    """An a.e.-convergent (by declaration) stream ``n -> phi_n``, ``n >= 1``."""

    def __init__(
        self,
        space: MeasureSpace,
        witness: Callable[[int], StepFunction],
        description: str = "",
        *,
        target=None,
        stable_from: int | None = None,
    ):
        self.space = space
        self.description = description
        self._gen = witness
        self._cache: dict[int, StepFunction] = {}
        self._lock = threading.Lock()
        if target is not None and not isinstance(target, (StepFunction, R2Function)):
            target = as_r2(target)
        if target is not None and target.space != space:
            raise DomainError("declared limit lives on another space")
        self.target = target
        self.stable_from = stable_from

    @classmethod
    def from_step(cls, phi: StepFunction, description: str = "") -> MeasurableFunction:
        return cls(phi.space, lambda n: phi, description or str(phi), target=phi, stable_from=1)

    def term(self, n: int) -> StepFunction:
        if n < 1:
            raise IndexError("witness indices start at 1")
        with self._lock:
            if n not in self._cache:
                phi = self._gen(n)
                if phi.space != self.space:
                    raise DomainError(f"witness term {n} lives on {phi.space}")
                self._cache[n] = phi
            return self._cache[n]

    def limit_step(self) -> StepFunction | None:
        """The limit as a step function, when it is one and is known."""
        if isinstance(self.target, StepFunction):
            return self.target
        if isinstance(self.target, R2Function) and self.target.is_step_backed:
            return self.target.step()
        if self.stable_from is not None:
            return self.term(self.stable_from)
        return None

    def limit_r2(self) -> R2Function | None:
        s = self.limit_step()
        if s is not None:
            return R2Function.from_step(s)
        return self.target if isinstance(self.target, R2Function) else None

    def sample(self, points: Sequence, horizon: int, skip: NullCover | None = None, start: int = 0) -> dict:
        """Witness values at sample points, ``{point: [phi_1(p), ..., phi_H(p)]}``.

        Points lying in a batch ``>= start`` of ``skip`` are left out: off a
        null set is all that convergence promises.
        """
        out = {}
        for p in points:
            if skip is not None and skip.covers(p, start, search=64) is not None:
                continue
            out[p] = [self.term(n)(p) for n in range(1, horizon + 1)]
        return out

    # Combinators: termwise on witnesses, limits combined when known.

    def _combine(self, other, op, label) -> MeasurableFunction:
        if isinstance(other, MeasurableFunction):
            gen = lambda n: op(self.term(n), other.term(n))
            a, b = self.limit_step(), other.limit_step()
            stable = None
            if self.stable_from is not None and other.stable_from is not None:
                stable = max(self.stable_from, other.stable_from)
            target = op(a, b) if (a is not None and b is not None) else None
            return MeasurableFunction(self.space, gen, f"({self.description} {label} {other.description})",
                                      target=target, stable_from=stable)
        raise TypeError("expected a MeasurableFunction")

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, "+")

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, "-")

    def __mul__(self, other):
        if isinstance(other, MeasurableFunction):
            return self._combine(other, lambda a, b: a * b, "*")
        c = Fraction(other)
        lim = self.limit_step()
        return MeasurableFunction(self.space, lambda n: c * self.term(n), f"{c}*{self.description}",
                                  target=None if lim is None else c * lim, stable_from=self.stable_from)

    __rmul__ = __mul__

    def quotient(self, other: MeasurableFunction) -> MeasurableFunction:
        """``f / g`` where ``g != 0``, set to 0 where the witness of ``g`` vanishes."""
        div = lambda a, b: a.pointwise(lambda x, y: x / y if y else Fraction(0), b)
        return self._combine(other, div, "/")

    def minimum(self, other):
        return self._combine(other, lambda a, b: a.minimum(b), "min")

    def maximum(self, other):
        return self._combine(other, lambda a, b: a.maximum(b), "max")

    def __abs__(self):
        lim = self.limit_step()
        return MeasurableFunction(self.space, lambda n: abs(self.term(n)), f"|{self.description}|",
                                  target=None if lim is None else abs(lim), stable_from=self.stable_from)

    def __repr__(self):
        return f"MeasurableFunction({self.description or '?'})"


# ---------------------------------------------------------------------------
# sets


def _is_indicator(phi: StepFunction) -> bool:
    return all(c == 1 for _, c in phi.terms)


class MeasurableSet:
    """A set with indicator in the signed class.

    ``step`` is set for finite unions of cells; ``cover`` for null sets given
    by a :class:`NullCover`; ``generators`` lists finite-measure pieces whose
    union contains the set (sigma-finiteness).
    """

    def __init__(self, space, indicator: R2Function, *, step=None, cover=None, generators=None,
                 ladder=None, name=""):
        self.space = space
        self.indicator = indicator
        self.step = step
        self.cover = cover
        self._generators = generators
        self.ladder = ladder
        self.name = name

    @classmethod
    def from_cells(cls, space, cells, name: str = "") -> MeasurableSet:
        raw = StepFunction(space, [(c, 1) for c in cells])
        return cls.from_step(raw.pointwise(lambda v: Fraction(1) if v > 0 else Fraction(0)), name)

    @classmethod
    def from_step(cls, phi: StepFunction, name: str = "") -> MeasurableSet:
        if not _is_indicator(phi):
            raise DomainError(f"{phi} is not an indicator: coefficients must be 1")
        return cls(phi.space, R2Function.from_step(phi), step=phi, name=name or str(phi))

    @classmethod
    def empty(cls, space) -> MeasurableSet:
        return cls.from_step(StepFunction.zero(space), name="empty")

    @classmethod
    def from_null_cover(cls, cover: NullCover, name: str = "") -> MeasurableSet:
        """A set contained in every tail of ``cover``: a.e. empty."""
        zero = StepFunction.zero(cover.space)
        return cls(cover.space, R2Function.from_step(zero), step=zero, cover=cover,
                   generators=lambda k: cover.batch(k), name=name or cover.name)

    @classmethod
    def from_stream(cls, space, pieces: Callable[[int], Sequence], declared=None, name: str = "") -> MeasurableSet:
        """Union of the finite cell families ``pieces(0), pieces(1), ...``."""
        cache: dict[int, StepFunction] = {}

        def term(k):
            if k not in cache:
                prev = term(k - 1) if k else StepFunction.zero(space)
                new = StepFunction(space, [(c, 1) for c in pieces(k)])
                cache[k] = prev.maximum(new.pointwise(lambda v: Fraction(1) if v > 0 else Fraction(0)))
            return cache[k]

        f = R1Function(term, space, limit=declared, name=name)
        return cls(space, R2Function.from_r1(f), generators=pieces, name=name)

    @property
    def is_step_backed(self) -> bool:
        return self.step is not None

    def generators(self, k: int) -> tuple:
        """Finite-measure cells whose union over ``k`` covers the set."""
        if self._generators is not None:
            return tuple(self._generators(k))
        if self.step is not None:
            return self.step.cells if k == 0 else ()
        raise UnresolvedIntegral(f"{self.name}: no generating cells recorded")

    def __contains__(self, point):
        if self.step is None:
            raise UnresolvedIntegral("membership is only decided for finite unions of cells")
        return self.step(point) == 1

    def __repr__(self):
        return f"MeasurableSet({self.name or '?'})"


def measure_of(A: MeasurableSet, budget: int = 100):
    """``mu(A)`` exactly when known, else an :class:`IntegralEstimate` of the ladder."""
    try:
        return A.indicator.integral()
    except UnresolvedIntegral:
        f = A.indicator
        if f.neg.stable_from is not None and f.neg.value() == 0:
            return integral_r1(f.pos, budget)
        raise


def _set_result(space, indicator: R2Function, name: str) -> MeasurableSet:
    if indicator.is_step_backed:
        return MeasurableSet.from_step(indicator.step(), name)
    return MeasurableSet(space, indicator, name=name)


def difference(A: MeasurableSet, B: MeasurableSet) -> MeasurableSet:
    """``A \\ B`` through ``chi_A - chi_A chi_B`` (``chi_A chi_B = min``)."""
    if A.space != B.space:
        raise DomainError("sets live on different spaces")
    name = f"({A.name} \\ {B.name})"
    if A.step is not None and B.step is not None:
        return MeasurableSet.from_step(A.step - A.step.minimum(B.step), name)
    ind = r2.add(A.indicator, r2.negate(r2.minimum(A.indicator, B.indicator)))
    return _set_result(A.space, ind, name)


def union(sets: Callable[[int], MeasurableSet], count: int | None = None, *, declared=None,
          name: str = "union") -> MeasurableSet:
    """Union of ``sets(1), sets(2), ...`` (finitely many when ``count`` is given).

    Members need a step-backed indicator or one in the monotone class.  The
    result's indicator is the monotone stream of finite unions.
    """
    first = sets(1)
    space = first.space

    def piece(n) -> R1Function:
        A = sets(n)
        if A.space != space:
            raise DomainError("sets live on different spaces")
        f = A.indicator
        if not (f.neg.stable_from is not None and f.neg.value() == 0):
            raise UnresolvedIntegral(f"member {n} of the union has no monotone indicator")
        return f.pos

    if count is not None and all(sets(n).step is not None for n in range(1, count + 1)):
        acc = StepFunction.zero(space)
        for n in range(1, count + 1):
            acc = acc.maximum(sets(n).step)
        return MeasurableSet.from_step(acc, name)

    cache: dict[int, R1Function] = {}

    def partial_union(n):
        if n not in cache:
            n_eff = n if count is None else min(n, count)
            cache[n] = piece(1) if n_eff == 1 else r1.maximum(partial_union(n_eff - 1), piece(n_eff))
        return cache[n]

    diag = r1.sup_of_r1_stream(partial_union, space, limit=declared, name=name)
    gens = lambda k: sets(k + 1).generators(0) if count is None or k < count else ()
    return MeasurableSet(space, R2Function.from_r1(diag), generators=gens, name=name)


def intersection(sets: Callable[[int], MeasurableSet], count: int | None = None, *, declared=None,
                 horizon: int = 32, name: str = "intersection") -> MeasurableSet:
    """``n A_n = A_1 \\ u_n (A_1 \\ A_n)``.

    For step-backed members the ladder ``mu(A_1 n ... n A_n)`` is recorded
    (non-increasing, exact).  ``declared`` is the measure of the
    intersection when it is not reached in finitely many steps.
    """
    A1 = sets(1)
    space = A1.space
    ladder = []
    if all(sets(n).step is not None for n in range(1, (count or horizon) + 1)):
        acc = A1.step
        for n in range(1, (count or horizon) + 1):
            acc = acc.minimum(sets(n).step)
            ladder.append(acc.integral())
        if count is not None:
            return MeasurableSet.from_step(acc, name)
    cut = union(lambda n: difference(A1, sets(n)), count,
                declared=None if declared is None else A1.indicator.integral() - ext(declared),
                name=f"{A1.name} minus members")
    ind = r2.add(A1.indicator, r2.negate(cut.indicator))
    if declared is not None:
        ind.declared = ext(declared)
    return MeasurableSet(space, ind, generators=A1.generators, ladder=ladder, name=name)


# ---------------------------------------------------------------------------
# from measurable functions to the signed class


def dominated_to_l1(f: MeasurableFunction, g, horizon: int = 20) -> tuple[L1Certificate, DominatedReport]:
    """L1 certificate for a measurable ``f`` with ``|f| <= g``, ``g`` step-backed.

    The truncations ``med(-g, phi_n, g)`` are step functions dominated by
    ``g``; they converge to ``f`` and the dominated convergence report
    records their integrals.  The limit itself must be known (``target``
    or ``stable_from``) to be certified.
    """
    gs = as_r2(g).step()
    if gs is None:
        raise UnresolvedIntegral("the dominating function must be step-backed")
    if not gs.nonneg_ae():
        raise DomainError("the dominating function must be >= 0")
    trunc = lambda n: med(-gs, f.term(n), gs)
    limit = f.limit_r2()
    if limit is None:
        raise UnresolvedIntegral(f"{f.description}: the limit is neither declared nor reached by the witness")
    lim_step = limit.step()
    if lim_step is not None:
        w = (gs - abs(lim_step)).negative_witness()
        if w is not None:
            raise DominationError(f"|f| exceeds g on {w}", None, w)
    cert = l1_check(limit)
    report = dominated_check(trunc, gs, horizon, declared=cert.integral())
    return cert, report


def nonneg_to_r2(
    f: MeasurableFunction,
    exhaustion: Callable[[int], Sequence],
    horizon: int = 20,
    declared=None,
) -> tuple[R2Function, BeppoLeviReport]:
    """``f >= 0`` vanishing off ``u A_n`` as a signed-class element.

    Truncations ``f_n = min(f, n chi_{A_n})`` are fed to the monotone
    convergence harness.  When the witness of ``f`` is itself monotone the
    truncation of its ``n``-th term is used, so no closed-form limit is
    needed.  ``A_n`` must be non-decreasing (checked on the horizon).
    """
    space = f.space
    chis = {}

    def chi(n):
        if n not in chis:
            raw = StepFunction(space, [(c, 1) for c in exhaustion(n)])
            chis[n] = raw.pointwise(lambda v: Fraction(1) if v > 0 else Fraction(0))
        return chis[n]

    for n in range(1, horizon):
        w = (chi(n + 1) - chi(n)).negative_witness()
        if w is not None:
            raise MonotonicityError(f"exhaustion set {n + 1} misses part of set {n}: {w}", n + 1, w)

    lim = f.limit_step()
    if lim is not None:
        if not lim.nonneg_ae():
            raise DomainError(f"f is negative on {lim.negative_witness()}")
        trunc = lambda n: lim.minimum(n * chi(n))
    else:
        for n in range(1, horizon):
            w = (f.term(n + 1) - f.term(n)).negative_witness()
            if w is not None:
                raise UnresolvedIntegral(
                    f"{f.description}: limit unknown and the witness is not monotone (term {n + 1} on {w})"
                )
        if not f.term(1).nonneg_ae():
            raise DomainError("witness starts below zero")
        trunc = lambda n: f.term(n).minimum(n * chi(n))

    limit, report = generalized_beppo_levi(lambda n: R2Function.from_step(trunc(n)), horizon, declared=declared)
    if lim is not None:
        # the truncations reach lim exactly once A_n contains its support and n bounds it
        top = max((c for _, c in lim.terms), default=Fraction(0))
        for n in range(1, horizon + 1):
            if n >= top and trunc(n) == lim:
                return R2Function.from_step(lim, name=f.description), report
    if declared is None:
        est = integral_r1(R1Function(lambda k: trunc(k + 1), space), budget=horizon, probe_rounds=0)
        if est.exact is not None:
            limit = R2Function(limit.pos, limit.neg, declared=est.exact, name=f.description)
    return limit, report


def h_transform(g: StepFunction, phi: StepFunction) -> StepFunction:
    """``g phi / (g + |phi|)``, cell by cell; needs ``phi = 0`` where ``g = 0``."""
    _guard(g, phi)
    return g.pointwise(lambda a, b: a * b / (a + abs(b)) if a + abs(b) else Fraction(0), phi)


def h_inverse(g: StepFunction, h: StepFunction) -> StepFunction:
    """``g h / (g - |h|)``; needs ``|h| < g`` where ``g > 0`` and ``h = 0`` elsewhere."""
    _guard(g, h)

    def back(a, b):
        if a == 0:
            return Fraction(0)
        if abs(b) >= a:
            raise DomainError(f"|h| = {abs(b)} reaches g = {a}; the inverse transform divides by zero")
        return a * b / (a - abs(b))

    return g.pointwise(back, h)


def _guard(g: StepFunction, phi: StepFunction):
    if not g.nonneg_ae():
        raise DomainError("g must be >= 0")
    bad = g.pointwise(lambda a, b: Fraction(1) if a == 0 and b != 0 else Fraction(0), phi)
    if bad.terms:
        raise DomainError(f"function is nonzero where g vanishes: {bad.cells[0]}")


def limit_of_measurable(fs: Callable[[int], MeasurableFunction], g, description: str = "limit"):
    """Measurability witness for ``lim f_n`` through the bounded transform.

    ``h_n = g f_n / (g + |f_n|)`` satisfies ``|h_n| <= g``; the witness of
    the limit is the back-transform of the diagonal ``h_k`` built from the
    best known step form of ``f_k``.  Returns the limit together with the
    transformed stream ``k -> h_k``.
    """
    gs = as_r2(g).step()
    if gs is None:
        raise UnresolvedIntegral("g must be step-backed")

    def best(k):
        f = fs(k)
        s = f.limit_step()
        return s if s is not None else f.term(k)

    def h(k):
        out = h_transform(gs, best(k))
        w = (gs - abs(out)).negative_witness()
        if w is not None:
            raise AssertionError(f"|h_{k}| exceeds g on {w}")
        return out

    lim = MeasurableFunction(gs.space, lambda k: h_inverse(gs, h(k)), description)
    return lim, h


@dataclass
class FatouGeneralReport:
    fatou: FatouReport
    limit_integral: ExtendedRational | None
    branch: str  # "finite" or "infinite"
    consistent: bool


def fatou_general(fs: Callable[[int], MeasurableFunction], horizon: int, limit=None,
                  declared_liminf=None) -> FatouGeneralReport:
    """``int lim f_n <= liminf int f_n`` for nonnegative measurable ``f_n``.

    Members are taken through their step limits.  The right side is taken
    as infinite when declared so or when the integrals increase strictly at
    every index of the horizon; then the inequality holds trivially.
    """

    def member(n):
        s = fs(n).limit_step()
        if s is None:
            raise UnresolvedIntegral(f"member {n} has no known step limit")
        return s

    rep = fatou_check(member, horizon)
    ints = rep.integrals
    infinite = (declared_liminf is not None and ext(declared_liminf) == INF) or (
        declared_liminf is None and len(ints) > 1 and all(a < b for a, b in zip(ints, ints[1:]))
    )
    lim_int = None
    if limit is not None:
        lim = limit.limit_step() if isinstance(limit, MeasurableFunction) else as_r2(limit).step()
        if lim is None:
            raise UnresolvedIntegral("the declared limit has no step form")
        lim_int = ext(lim.integral())
    if infinite:
        return FatouGeneralReport(rep, lim_int, "infinite", True)
    right = rep.tail_inf[-1] if declared_liminf is None else ext(declared_liminf)
    consistent = lim_int is None or lim_int <= right
    return FatouGeneralReport(rep, lim_int, "finite", consistent and rep.inequalities_hold)


# ---------------------------------------------------------------------------
# null sets


@dataclass
class NullEvidence:
    is_null: bool
    measure: ExtendedRational | None
    rows: list = field(default_factory=list)  # (eps, K, tail bound, indicator partials)
    cover: NullCover | None = None
    reason: str = ""


def null_iff_measure_zero(obj, eps_list=(Fraction(1, 10),), window: int = 4) -> NullEvidence:
    """Both directions of "null set iff measurable of measure zero".

    From a cover: for each ``eps`` the tail from ``K = certify(eps)`` covers
    the set; the indicators of its finite pieces have integrals below eps.
    From a step-backed set of measure zero: its cells repeated forever form
    a cover of total zero.
    """
    if isinstance(obj, NullCover):
        cover, measure = obj, ext(0)
    elif isinstance(obj, MeasurableSet):
        if obj.cover is not None:
            cover, measure = obj.cover, ext(0)
        elif obj.step is not None:
            measure = ext(obj.step.integral())
            if measure != 0:
                return NullEvidence(False, measure, reason=f"measure is {measure}, not 0")
            cover = NullCover.repeating(obj.space, obj.step.cells, name=obj.name)
        else:
            m = obj.indicator.integral_or_none()
            if m is not None and m != 0:
                return NullEvidence(False, m, reason=f"measure is {m}, not 0")
            raise UnresolvedIntegral("covers are built from step-backed sets or explicit covers")
    else:
        raise TypeError("expected a NullCover or a MeasurableSet")

    ev = NullEvidence(True, measure, cover=cover)
    for eps in eps_list:
        eps = Fraction(eps)
        k = cover.certify(eps)
        tail = cover.tail(k)
        partials, acc = [], StepFunction.zero(cover.space)
        for j in range(k, k + window):
            acc = acc.maximum(StepFunction(cover.space, [(c, 1) for c in cover.batch(j)])
                              .pointwise(lambda v: Fraction(1) if v > 0 else Fraction(0)))
            partials.append(acc.integral())
        if tail >= eps or any(p > tail for p in partials):
            ev.is_null = False
            ev.reason = f"tail bound {tail} is not below {eps}"
        ev.rows.append((eps, k, tail, partials))
    return ev
