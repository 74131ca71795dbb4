"""Differences of monotone-class functions with a well-defined integral, and L1.

An :class:`R2Function` is a pair ``pos - neg`` of :class:`R1Function` such
that at least one side certainly has a finite integral.  That condition is
checked once, when the object is built; :class:`DefinednessError` is raised
otherwise.  L1 membership is the stronger condition that both sides are
finite.

The module also carries the executable form of the monotone convergence
theorem for this class (:func:`generalized_beppo_levi`), and finite-horizon
evidence producers for Fatou's lemma and dominated convergence.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

from . import monotone as r1
from .monotone import R1Function
from .numeric import NEG_INF, ExtendedRational, ext, ext_add
from .spaces import DomainError
from .step import MonotonicityError, StepFunction

__all__ = [
    "DefinednessError",
    "UnresolvedIntegral",
    "NotIntegrable",
    "BeppoLeviRejected",
    "DominationError",
    "Definedness",
    "R2Function",
    "L1Certificate",
    "as_r2",
    "r2_make",
    "r2_normalize_nonneg",
    "negate",
    "scale",
    "add",
    "minimum",
    "maximum",
    "generalized_beppo_levi",
    "BeppoLeviReport",
    "l1_check",
    "norm_l1",
    "fatou_check",
    "FatouReport",
    "dominated_check",
    "DominatedReport",
]


class DefinednessError(ValueError):
    """Neither side of a difference is certified finite: the integral may be inf - inf."""


class UnresolvedIntegral(ValueError):
    """The integral exists but its exact value is not determined by the data at hand."""


class NotIntegrable(ValueError):
    pass


class DominationError(ValueError):
    def __init__(self, message, index=None, witness=None):
        super().__init__(message)
        self.index = index
        self.witness = witness


class BeppoLeviRejected(ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def _side_evidence(f: R1Function) -> str | None:
    if f.stable_from is not None:
        return f"stabilized at term {f.stable_from}"
    if f.limit is not None and f.limit.is_finite:
        return f"declared limit {f.limit}"
    if f.upper_bound is not None and not (f.limit is not None and f.limit.is_infinite):
        return f"partials bounded by {f.upper_bound}"
    return None


@dataclass(frozen=True)
class Definedness:
    finite_side: str  # "pos", "neg" or "both"
    evidence: dict


class R2Function:
    """``pos - neg`` with at least one side of finite integral."""

    def __init__(self, pos: R1Function, neg: R1Function, *, declared=None, name: str = ""):
        if pos.space != neg.space:
            raise DomainError("both sides must live on the same space")
        self.pos, self.neg, self.space = pos, neg, pos.space
        self.name = name
        ev = {side: _side_evidence(f) for side, f in (("pos", pos), ("neg", neg))}
        ev = {k: v for k, v in ev.items() if v is not None}
        if not ev:
            raise DefinednessError(
                f"neither side of {name or 'the difference'} is certified finite; "
                f"the integral could be inf - inf"
            )
        side = "both" if len(ev) == 2 else next(iter(ev))
        self.definedness = Definedness(side, ev)
        self.declared = None if declared is None else ext(declared)
        if self.declared is not None:
            try:
                v = self._resolve()
            except UnresolvedIntegral:
                v = None
            if v is not None and v != self.declared:
                raise ValueError(f"declared integral {self.declared} contradicts computed {v}")

    # construction ------------------------------------------------------

    @classmethod
    def from_step(cls, phi: StepFunction, name: str = "") -> R2Function:
        return cls(R1Function.constant(phi), R1Function.zero(phi.space), name=name)

    @classmethod
    def from_r1(cls, f: R1Function) -> R2Function:
        return cls(f, R1Function.zero(f.space), name=f.name)

    @classmethod
    def zero(cls, space) -> R2Function:
        return cls.from_step(StepFunction.zero(space), name="0")

    # integral -----------------------------------------------------------

    def _resolve(self) -> ExtendedRational:
        pv, nv = self.pos.value(), self.neg.value()
        if pv is not None and pv.is_infinite and self.neg.is_finite():
            return pv
        if nv is not None and nv.is_infinite and self.pos.is_finite():
            return -nv
        if pv is not None and nv is not None:
            out = ext_add(pv, -nv)
            assert out, "definedness certificate violated"
            return out
        raise UnresolvedIntegral(f"integral of {self.name or 'R2 function'} is not determined")

    def integral(self, budget: int | None = None) -> ExtendedRational:
        """The integral when it is determined.

        With a ``budget``, sides without a known value are examined through
        their first ``budget`` terms (see :func:`integral_r1`); a certified
        stabilization or divergence is recorded on the side.
        """
        try:
            return self._resolve()
        except UnresolvedIntegral:
            if self.declared is not None:
                return self.declared
            if not budget:
                raise
        for side in (self.pos, self.neg):
            if side.value() is None:
                est = r1.integral_r1(side, budget)
                if est.status == r1.INFINITE:
                    side.declare(est.value)
        return self._resolve()

    def integral_or_none(self, budget: int | None = None) -> ExtendedRational | None:
        try:
            return self.integral(budget)
        except UnresolvedIntegral:
            return None

    def ladder(self, k: int) -> Fraction:
        """Integral of the ``k``-th step approximant ``pos_k - neg_k``."""
        return self.pos.partial(k) - self.neg.partial(k)

    def term(self, k: int) -> StepFunction:
        return self.pos.term(k) - self.neg.term(k)

    @property
    def is_step_backed(self) -> bool:
        return self.pos.stable_from is not None and self.neg.stable_from is not None

    def step(self) -> StepFunction | None:
        """The step function this equals, when both sides are eventually constant."""
        if not self.is_step_backed:
            return None
        return self.term(max(self.pos.stable_from, self.neg.stable_from))

    def __repr__(self):
        return f"R2Function({self.name or '?'}, finite side={self.definedness.finite_side})"


Signed = Union[R2Function, StepFunction, "L1Certificate"]


def as_r2(f: Signed) -> R2Function:
    if isinstance(f, R2Function):
        return f
    if isinstance(f, StepFunction):
        return R2Function.from_step(f)
    if isinstance(f, L1Certificate):
        return f.wrapped
    if isinstance(f, R1Function):
        return R2Function.from_r1(f)
    raise TypeError(f"cannot view {type(f).__name__} as an R2 function")


def r2_make(f1: R1Function, f2: R1Function, declared=None, name: str = "") -> R2Function:
    return R2Function(f1, f2, declared=declared, name=name)


def _shift(f: R1Function, phi: StepFunction, start: int = 0, name: str = "") -> R1Function:
    """``f - phi`` as a stream starting at ``f``'s term ``start``."""
    c = phi.integral()
    v = f.value()
    stable = None if f.stable_from is None else max(0, f.stable_from - start)
    return R1Function(
        lambda k: f.term(start + k) - phi,
        f.space,
        limit=None if v is None else v - c,
        stable_from=stable,
        upper_bound=None if f.upper_bound is None else f.upper_bound - c,
        name=name or f"({f.name}-shift)",
    )


def r2_normalize_nonneg(f: R2Function) -> R2Function:
    """Same function with both sides >= 0.

    Subtracts ``m = min(pos_0, neg_0)`` from both sides.  Since
    ``pos_k >= pos_0 >= m`` (and likewise for ``neg``) every term of both
    shifted streams is nonnegative.
    """
    m = f.pos.term(0).minimum(f.neg.term(0))
    return R2Function(_shift(f.pos, m), _shift(f.neg, m), declared=f.declared, name=f.name)


# ---------------------------------------------------------------------------
# vector lattice operations


def negate(f: Signed) -> R2Function:
    f = as_r2(f)
    return R2Function(f.neg, f.pos, declared=None if f.declared is None else -f.declared, name=f"-{f.name}")


def scale(c, f: Signed) -> R2Function:
    f = as_r2(f)
    c = Fraction(c)
    if c == 0:
        return R2Function.zero(f.space)
    if c < 0:
        return scale(-c, negate(f))
    declared = None if f.declared is None else c * f.declared
    return R2Function(r1.scale_nonneg(c, f.pos), r1.scale_nonneg(c, f.neg), declared=declared, name=f"{c}*{f.name}")


def add(f: Signed, g: Signed) -> R2Function:
    f, g = as_r2(f), as_r2(g)
    if f.is_step_backed and g.is_step_backed:
        return R2Function.from_step(f.step() + g.step())
    try:
        return R2Function(r1.add(f.pos, g.pos), r1.add(f.neg, g.neg), name=f"({f.name}+{g.name})")
    except DefinednessError as e:
        raise DefinednessError(f"sum of {f.name} and {g.name} is undefined: {e}") from None


def maximum(f: Signed, g: Signed) -> R2Function:
    """``max(f, g)`` through an explicit R1 decomposition.

    With ``f = f1 - f2`` and ``g = g1 - g2``:

    * ``(f1 + g1) - min(g1 + f2, f1 + g2)``; the negative side is bounded
      by ``f1 + g2`` and by ``g1 + f2``, the positive side by ``f1 + g1``;
    * ``max(f1 + g2, g1 + f2) - (f2 + g2)`` when both negative sides are finite.

    One of the two always has a certified finite side.
    """
    f, g = as_r2(f), as_r2(g)
    if f.is_step_backed and g.is_step_backed:
        return R2Function.from_step(f.step().maximum(g.step()))
    name = f"max({f.name},{g.name})"
    if f.neg.is_finite() and g.neg.is_finite():
        return R2Function(
            r1.maximum(r1.add(f.pos, g.neg), r1.add(g.pos, f.neg)), r1.add(f.neg, g.neg), name=name
        )
    return R2Function(r1.add(f.pos, g.pos), r1.minimum(r1.add(g.pos, f.neg), r1.add(f.pos, g.neg)), name=name)


def minimum(f: Signed, g: Signed) -> R2Function:
    f, g = as_r2(f), as_r2(g)
    if f.is_step_backed and g.is_step_backed:
        return R2Function.from_step(f.step().minimum(g.step()))
    out = negate(maximum(negate(f), negate(g)))
    out.name = f"min({f.name},{g.name})"
    return out


# ---------------------------------------------------------------------------
# monotone convergence


def _gallop(f: R1Function, target: Fraction, gap: Fraction) -> int:
    """Smallest ``k`` with ``target - partial(k) < gap``, by exponential then binary search."""

    def ok(k):
        return target - f.peek(k).integral() < gap

    if ok(0):
        return 0
    # partials within C/k of the target reach the gap by k ~ C/gap; allow C up to 2^40
    cap = 1 << (40 + math.ceil(1 / gap).bit_length())
    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > cap:
            raise UnresolvedIntegral(f"{f.name}: partials never approach the declared limit {target}")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class BeppoLeviReport:
    start: int
    horizon: int
    ladder: list = field(default_factory=list)  # integral of f_n, n = start..horizon (None if unresolved)
    h_integrals: list = field(default_factory=list)  # integral of the accumulated h_n
    minorant_index: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    pairs_verified: int = 0
    pairs_declared: int = 0
    declared: ExtendedRational | None = None
    rejected_prefix: list = field(default_factory=list)

    @property
    def h_bound_ok(self) -> bool:
        return all(v <= 1 for v in self.h_integrals)

    @property
    def ladder_nondecreasing(self) -> bool:
        vals = [v for v in self.ladder if v is not None]
        return all(a <= b for a, b in zip(vals, vals[1:]))

    @property
    def final_gap(self) -> ExtendedRational | None:
        if self.declared is None or not self.ladder or self.ladder[-1] is None:
            return None
        return self.declared - self.ladder[-1]


class _Renormalized:
    """Lazily built accumulated pairs ``(G_j, H_j)`` of the monotone convergence construction.

    Member ``j`` (``j >= 1``) uses ``f = fs(start + j - 1)``: its negative side
    ``h`` is cut by a step minorant ``phi`` from its own stream with
    ``int h - int phi < 2^-j``; then ``H_j = sum_{i<=j} (h_i - phi_i)`` and
    ``G_j = H_{j-1} + (g_j - phi_j)`` so that ``f = G_j - H_j``.
    """

    def __init__(self, fs, start):
        self.fs, self.start = fs, start
        self._lock = threading.RLock()
        self.H: list[R1Function] = []
        self.G: list[R1Function] = []
        self.minorant_index: list[int] = []
        self.gaps: list[Fraction] = []
        self.h_values: list[Fraction] = []

    def member(self, j: int) -> tuple[R1Function, R1Function]:
        with self._lock:
            while len(self.H) < j:
                self._grow()
            return self.G[j - 1], self.H[j - 1]

    def _grow(self):
        j = len(self.H) + 1
        f = self.fs(self.start + j - 1)
        h, g = f.neg, f.pos
        v = h.value()
        if v is None or v.is_infinite:
            raise UnresolvedIntegral(
                f"member {self.start + j - 1}: the negative side needs an exact finite integral "
                f"to pick a step minorant within 2^-{j}"
            )
        v = v.finite
        bound = Fraction(1, 2**j)
        k = h.stable_from if h.stable_from is not None else _gallop(h, v, bound)
        phi = h.peek(k)
        gap = v - phi.integral()
        if gap < 0 or gap >= bound:
            raise ValueError(f"member {self.start + j - 1}: minorant gap {gap} outside [0, 2^-{j})")
        h_cut, g_cut = _shift(h, phi, k, name=f"h{j}"), _shift(g, phi, k, name=f"g{j}")
        prev = self.H[-1] if self.H else None
        H = h_cut if prev is None else r1.add(prev, h_cut)
        G = g_cut if prev is None else r1.add(prev, g_cut)
        total = (self.h_values[-1] if self.h_values else Fraction(0)) + gap
        if total > 1:
            raise AssertionError(f"accumulated negative side {total} exceeds 1")
        H.upper_bound = total
        self.H.append(H)
        self.G.append(G)
        self.minorant_index.append(k)
        self.gaps.append(gap)
        self.h_values.append(total)


def _certified_minus_inf(f: R2Function) -> bool:
    return f.neg.is_infinite() and f.pos.is_finite()


def generalized_beppo_levi(
    fs: Callable[[int], Signed],
    horizon: int,
    declared=None,
    verify_pairs: bool = True,
    renormalize: int | None = 64,
) -> tuple[R2Function, BeppoLeviReport]:
    """Monotone convergence for a non-decreasing sequence ``f_1 <= f_2 <= ...``.

    Needs some ``f_n`` with integral > -inf within the horizon; otherwise the
    sequence is rejected with :class:`BeppoLeviRejected`.  Returns the limit
    ``g - h`` (``h`` built with integral <= 1) and a report carrying the
    integral ladder of the ``f_n`` and of the accumulated ``h_n``.

    The renormalized pairs are built eagerly for the first ``renormalize``
    members (all of them when None) and lazily beyond, on demand of the
    limit's streams.
    """
    cache: dict[int, R2Function] = {}

    def member(n):
        if n not in cache:
            cache[n] = as_r2(fs(n))
        return cache[n]

    declared = None if declared is None else ext(declared)
    report = BeppoLeviReport(start=0, horizon=horizon, declared=declared)
    start = None
    for n in range(1, horizon + 1):
        f = member(n)
        if f.neg.is_finite():
            start = n
            break
        report.rejected_prefix.append(NEG_INF if _certified_minus_inf(f) else None)
    if start is None:
        raise BeppoLeviRejected(
            f"no member among the first {horizon} has an integral > -inf; monotone convergence "
            f"of the integrals is not available without it",
            report,
        )
    report.start = start

    prev = None
    for n in range(start, horizon + 1):
        f = member(n)
        val = f.integral_or_none()
        report.ladder.append(val)
        if declared is not None and val is not None and val > declared:
            raise ValueError(f"integral of member {n} ({val}) exceeds the declared limit {declared}")
        if prev is not None and verify_pairs:
            if prev.is_step_backed and f.is_step_backed:
                w = (f.step() - prev.step()).negative_witness()
                if w is not None:
                    raise MonotonicityError(f"member {n} drops below member {n - 1} on {w}", n, w)
                report.pairs_verified += 1
            else:
                pv = report.ladder[-2]
                if pv is not None and val is not None and val < pv:
                    raise MonotonicityError(f"integral of member {n} drops below member {n - 1}", n)
                report.pairs_declared += 1
        prev = f

    ren = _Renormalized(member, start)
    eager = horizon - start + 1 if renormalize is None else min(renormalize, horizon - start + 1)
    for j in range(1, eager + 1):
        ren.member(j)
    report.h_integrals = list(ren.h_values)
    report.minorant_index = list(ren.minorant_index)
    report.gaps = list(ren.gaps)

    space = member(start).space
    h = r1.sup_of_r1_stream(lambda j: ren.member(j)[1], space, upper_bound=1, name="h")
    g = r1.sup_of_r1_stream(lambda j: ren.member(j)[0], space, termwise_check=False, name="g")
    limit = R2Function(g, h, declared=declared, name="beppo-levi limit")
    return limit, report


# ---------------------------------------------------------------------------
# L1


@dataclass(frozen=True)
class L1Certificate:
    wrapped: R2Function
    pos_evidence: str
    neg_evidence: str

    @property
    def space(self):
        return self.wrapped.space

    def integral(self) -> Fraction:
        return self.wrapped.integral().finite

    def step(self):
        return self.wrapped.step()


def l1_check(f: Signed) -> L1Certificate:
    f = as_r2(f)
    ev = f.definedness.evidence
    if f.definedness.finite_side != "both":
        missing = "neg" if "pos" in ev else "pos"
        raise NotIntegrable(f"{f.name or 'function'}: the {missing} side is not certified finite")
    return L1Certificate(f, ev["pos"], ev["neg"])


def norm_l1(f: L1Certificate | Signed, declared=None) -> Fraction:
    """``integral |f|``; a declared value is accepted only when it cannot be computed."""
    cert = f if isinstance(f, L1Certificate) else l1_check(f)
    g = cert.wrapped
    absf = maximum(g, negate(g))
    try:
        return absf.integral().finite
    except UnresolvedIntegral:
        if declared is None:
            raise
        declared = Fraction(declared)
        if declared < 0 or declared < abs(g.integral().finite):
            raise ValueError(f"declared norm {declared} is below |integral f|")
        return declared


# ---------------------------------------------------------------------------
# Fatou and dominated convergence, finite horizon


@dataclass
class FatouReport:
    horizon: int
    integrals: list  # integral of f_n, n = 1..H
    rows: list  # rows[n-1] = [integral h_{n,m} for m = n..H]
    lower: list  # integral h_{n,H}
    tail_inf: list  # min_{n<=k<=H} integral f_k
    violations: list = field(default_factory=list)

    @property
    def inequalities_hold(self) -> bool:
        return not self.violations

    def at(self, n: int) -> tuple:
        """``(integral h_{n,H}, min_{k>=n} integral f_k)``: left and right of the inequality."""
        return self.lower[n - 1], self.tail_inf[n - 1]


def _step_of(f: R2Function, what: str, n: int) -> StepFunction:
    s = f.step()
    if s is None:
        raise UnresolvedIntegral(f"{what} {n} is not step-backed; the finite-horizon checker is exact on step functions")
    return s


def fatou_check(fs: Callable[[int], Signed], horizon: int) -> FatouReport:
    """Ladders ``h_{n,m} = min(f_n, ..., f_m)`` with their exact inequalities.

    Checked at every index: ``f_n >= 0``; ``h_{n,m+1} <= h_{n,m}`` a.e.;
    ``h_{n,H} <= h_{n+1,H}`` a.e.; ``0 <= int h_{n,H} <= min_{n<=k<=H} int f_k``.
    """
    steps = []
    for n in range(1, horizon + 1):
        s = _step_of(as_r2(fs(n)), "member", n)
        w = s.negative_witness()
        if w is not None:
            raise DomainError(f"member {n} is negative on {w}")
        steps.append(s)
    ints = [s.integral() for s in steps]
    tail_inf = [min(ints[i:]) for i in range(horizon)]
    rows, lower, finals, violations = [], [], [], []
    for i in range(horizon):
        h = steps[i]
        row = [h.integral()]
        for m in range(i + 1, horizon):
            nxt = h.minimum(steps[m])
            if not nxt.le_ae(h):
                violations.append(("row not decreasing", i + 1, m + 1))
            h = nxt
            row.append(h.integral())
        rows.append(row)
        lower.append(row[-1])
        finals.append(h)
        if row[-1] < 0 or row[-1] > tail_inf[i]:
            violations.append(("integral bound", i + 1))
        if any(a < b for a, b in zip(row, row[1:])):
            violations.append(("row integrals increase", i + 1))
    for i in range(horizon - 1):
        if not finals[i].le_ae(finals[i + 1]):
            violations.append(("ladder not increasing", i + 1))
    return FatouReport(horizon, ints, rows, lower, tail_inf, violations)


@dataclass
class DominatedReport:
    horizon: int
    integrals: list
    g_integral: Fraction
    minus: FatouReport  # applied to g - f_n
    plus: FatouReport  # applied to g + f_n
    tail_sup: list
    tail_inf: list
    declared: ExtendedRational | None = None
    violations: list = field(default_factory=list)

    @property
    def inequalities_hold(self) -> bool:
        return not self.violations and self.minus.inequalities_hold and self.plus.inequalities_hold

    @property
    def final_gap(self):
        if self.declared is None:
            return None
        return abs(self.declared - self.integrals[-1])


def dominated_check(fs: Callable[[int], Signed], g: Signed, horizon: int, declared=None) -> DominatedReport:
    """Dominated convergence evidence: Fatou on ``g - f_n`` and ``g + f_n``.

    ``|f_n| <= g`` is verified exactly for every member.  Besides the two
    Fatou reports, the exact identities ``int(g -+ f_n) = int g -+ int f_n``
    and the bounds ``-int g <= int f_n <= int g`` are checked.
    """
    gs = _step_of(as_r2(g), "dominator", 0)
    steps = []
    for n in range(1, horizon + 1):
        s = _step_of(as_r2(fs(n)), "member", n)
        w = (gs - abs(s)).negative_witness()
        if w is not None:
            raise DominationError(f"|f_{n}| exceeds g on {w}", n, w)
        steps.append(s)
    gi = gs.integral()
    minus = fatou_check(lambda n: gs - steps[n - 1], horizon)
    plus = fatou_check(lambda n: gs + steps[n - 1], horizon)
    ints = [s.integral() for s in steps]
    violations = []
    for i, v in enumerate(ints):
        if minus.integrals[i] != gi - v or plus.integrals[i] != gi + v:
            violations.append(("linearity", i + 1))
        if not -gi <= v <= gi:
            violations.append(("domination of integrals", i + 1))
    tail_sup = [max(ints[i:]) for i in range(horizon)]
    tail_inf = [min(ints[i:]) for i in range(horizon)]
    return DominatedReport(
        horizon, ints, gi, minus, plus, tail_sup, tail_inf,
        declared=None if declared is None else ext(declared), violations=violations,
    )
