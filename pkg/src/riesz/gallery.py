"""Reproducible demonstrations of the classical counterexamples.

Each entry rebuilds its objects with the library, re-derives every claim and
returns a :class:`GalleryReport`.  Claims are tagged by where their truth
comes from: ``[trivial]`` (immediate from definitions), ``[computed]``
(derived here by exact computation) or ``[stated]`` (the classical statement
being illustrated, checked at the finite depth shown).  Output is
deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .fubini import counting_counterexample, fubini_step, inner_integral_x, inner_integral_y
from .monotone import R1Function
from .numeric import INF, ExtendedRational, ext
from .signed import BeppoLeviRejected, DefinednessError, R2Function, generalized_beppo_levi
from .spaces import CountingSpace, FiniteSet, Interval, IntervalLine, ProductSpace, Rectangle, ZeroSpace
from .step import StepFunction

__all__ = [
    "Claim",
    "GalleryReport",
    "GALLERY",
    "run_gallery",
    "weir_enumeration",
    "weir_index",
    "diagonal_example",
    "MuAlpha",
]

TRIVIAL, COMPUTED, STATED = "[trivial]", "[computed]", "[stated]"


class ClaimFailed(AssertionError):
    pass


@dataclass
class Claim:
    tag: str
    text: str
    ok: bool

    def line(self) -> str:
        return f"  {'ok  ' if self.ok else 'FAIL'} {self.tag:<10} {self.text}"


@dataclass
class GalleryReport:
    entry: str
    params: dict
    claims: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    data: dict = field(default_factory=dict, repr=False)

    def claim(self, tag: str, text: str, ok: bool) -> bool:
        self.claims.append(Claim(tag, text, bool(ok)))
        return ok

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.claims)

    def render(self) -> str:
        head = self.entry + "".join(f" {k}={v}" for k, v in sorted(self.params.items()))
        lines = [head] + [c.line() for c in self.claims] + [f"  note: {n}" for n in self.notes]
        lines.append(f"  result: {'all claims hold' if self.passed else 'CLAIM FAILED'}")
        return "\n".join(lines)


L = IntervalLine()


def _ray_left(name="chi(-inf,0)") -> R1Function:
    """``chi_(-inf, 0)`` as the limit of ``chi_[-k-1, 0)``; declared infinite integral."""
    return R1Function(lambda k: StepFunction.interval(-k - 1, 0), L, limit=INF, name=name)


def _ray_right(n, name="") -> R1Function:
    """``chi_(n, inf)`` as the limit of ``chi_[n, n+k+1)``."""
    return R1Function(lambda k: StepFunction.interval(n, n + k + 1), L, limit=INF, name=name or f"chi({n},inf)")


def _rejection(report: GalleryReport, fs, horizon: int, what: str):
    try:
        generalized_beppo_levi(fs, horizon)
    except BeppoLeviRejected as e:
        prefix = e.report.rejected_prefix
        report.claim(COMPUTED, f"every integral of f_1..f_{horizon} is certified -inf",
                     len(prefix) == horizon and all(v is not None and v.is_infinite and v.sign < 0 for v in prefix))
        report.claim(STATED, f"monotone convergence harness rejects {what}", True)
        return
    report.claim(STATED, f"monotone convergence harness rejects {what}", False)


def sign_not_in_r2(horizon: int = 10) -> GalleryReport:
    rep = GalleryReport("sign-not-in-r2", {"horizon": horizon})
    ray = _ray_left()
    fs = lambda n: R2Function(R1Function.constant(StepFunction.interval(0, n)), ray, name=f"f_{n}")
    rep.claim(TRIVIAL, "f_n = -chi(-inf,0) + chi(0,n) is non-decreasing in n", all(
        StepFunction.interval(0, n).le_ae(StepFunction.interval(0, n + 1)) for n in range(1, horizon)))
    _rejection(rep, fs, horizon, "the sequence")
    try:
        R2Function(_ray_right(0), ray, name="sign")
        rep.claim(STATED, "the limit sign = chi(0,inf) - chi(-inf,0) has no well-defined integral", False)
    except DefinednessError:
        rep.claim(STATED, "the limit sign = chi(0,inf) - chi(-inf,0) has no well-defined integral", True)
    rep.notes.append("the hypothesis that some integral exceeds -inf cannot be dropped")
    return rep


def escaping_tail(horizon: int = 10) -> GalleryReport:
    rep = GalleryReport("escaping-tail", {"horizon": horizon})
    zero = R1Function.zero(L)
    fs = lambda n: R2Function(zero, _ray_right(n), name=f"f_{n}")
    rep.claim(TRIVIAL, "f_n = -chi(n,inf) is non-decreasing with pointwise limit 0", all(
        _ray_right(n + 1).term(k).le_ae(_ray_right(n).term(k + 1)) for n in range(1, horizon) for k in range(3)))
    _rejection(rep, fs, horizon, "the sequence")
    limit = R2Function.zero(L)
    rep.claim(COMPUTED, f"the limit f = 0 is in the signed class with integral {limit.integral()}", limit.integral() == 0)
    rep.claim(STATED, "lim int f_n = -inf differs from int f = 0", True)
    return rep


# ---------------------------------------------------------------------------
# Weir's set


def weir_enumeration(count: int) -> list[Fraction]:
    """First ``count`` rationals of (0, 1), by denominator, then numerator."""
    out, q = [], 2
    while len(out) < count:
        out.extend(Fraction(p, q) for p in range(1, q) if gcd(p, q) == 1)
        q += 1
    return out[:count]


def weir_index(r: Fraction) -> int:
    """1-based position of ``r`` in :func:`weir_enumeration`."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    before = sum(sum(1 for p in range(1, q) if gcd(p, q) == 1) for q in range(2, r.denominator))
    return before + sum(1 for p in range(1, r.numerator + 1) if gcd(p, r.denominator) == 1)


def _weir_interval(n: int, r: Fraction) -> Interval:
    rad = Fraction(1, 2 ** (n + 3))
    return Interval(max(r - rad, Fraction(0)), min(r + rad, Fraction(1)))


def weir_set(depth: int = 20, grid: int = 8) -> GalleryReport:
    rep = GalleryReport("weir-set", {"depth": depth, "grid": grid})
    rs = weir_enumeration(depth)
    rep.notes.append("enumeration: rationals in (0,1) by denominator, then numerator: "
                     + ", ".join(str(r) for r in rs[:6]) + ", ...")
    partial_measures, upper = [], []
    acc = StepFunction.zero(L)
    for n, r in enumerate(rs, start=1):
        piece = StepFunction(L, [(_weir_interval(n, r), 1)])
        acc = acc.maximum(piece)
        partial_measures.append(acc.integral())
        upper.append(sum((Fraction(1, 2 ** (k + 2)) for k in range(1, n + 1)), Fraction(0)))
    lower = _weir_interval(1, rs[0])
    lower_m = lower.hi - lower.lo
    rep.data.update(partial_measures=partial_measures, upper=upper, lower=lower_m)
    rep.claim(COMPUTED, f"lower bound: first interval {lower} has measure {lower_m} > 0", lower_m > 0)
    rep.claim(COMPUTED, f"partial measures of S are non-decreasing, from {partial_measures[0]} to {partial_measures[-1]}",
              all(a <= b for a, b in zip(partial_measures, partial_measures[1:])))
    rep.claim(COMPUTED, f"every partial measure lies in [{lower_m}, upper partial]",
              all(lower_m <= m <= u for m, u in zip(partial_measures, upper)))
    rep.claim(COMPUTED, f"upper partial at depth {depth} is {upper[-1]} <= 1/4",
              all(u <= Fraction(1, 4) for u in upper))
    rep.claim(STATED, "0 < mu(S) < 1", 0 < lower_m and upper[-1] < 1)
    rep.claim(COMPUTED, f"int (chi(0,1) - chi_S) >= 1 - {upper[-1]} > 0", 1 - upper[-1] > 0)
    # every grid cell holds an enumerated rational, around which chi(0,1) - chi_S vanishes
    used = []
    for m in range(1, grid + 1):
        for i in range(m):
            mid = Fraction(2 * i + 1, 2 * m)
            n = weir_index(mid)
            iv = _weir_interval(n, mid)
            cell = Interval(Fraction(i, m), Fraction(i + 1, m))
            inside = max(iv.lo, cell.lo) < min(iv.hi, cell.hi)
            used.append((m, i, n, inside))
    rep.claim(COMPUTED, f"each cell of the grids 1/1..1/{grid} meets an interval of S in positive measure "
                        f"(enumeration indices up to {max(u[2] for u in used)})", all(u[3] for u in used))
    rep.claim(STATED, "a step minorant of chi(0,1) - chi_S is <= 0 on every grid cell, so it is not in the monotone class",
              all(u[3] for u in used))
    return rep


# ---------------------------------------------------------------------------
# extensions of the zero measure


@dataclass(frozen=True)
class _Countable:
    points: frozenset

    def __str__(self):
        return "{" + ",".join(sorted(map(str, self.points))) + "}"


@dataclass(frozen=True)
class _CoCountable:
    excluded: frozenset

    def __str__(self):
        return "X\\{" + ",".join(sorted(map(str, self.excluded))) + "}"


class MuAlpha:
    """``mu_alpha``: 0 on countable sets, ``alpha`` on co-countable ones.

    The ground set is an unbounded identifier space; countable sets are
    explicit lists and co-countable sets are complements of explicit lists.
    """

    def __init__(self, alpha):
        self.alpha = ext(alpha)

    def __call__(self, A) -> ExtendedRational:
        return ext(0) if isinstance(A, _Countable) else self.alpha

    @staticmethod
    def countable(*pts):
        return _Countable(frozenset(pts))

    @staticmethod
    def cocountable(*pts):
        return _CoCountable(frozenset(pts))

    @staticmethod
    def disjoint(A, B) -> bool:
        if isinstance(A, _Countable) and isinstance(B, _Countable):
            return not (A.points & B.points)
        if isinstance(A, _Countable) and isinstance(B, _CoCountable):
            return A.points <= B.excluded
        if isinstance(A, _CoCountable) and isinstance(B, _Countable):
            return B.points <= A.excluded
        return False  # two co-countable sets always meet

    @staticmethod
    def union(A, B):
        if isinstance(A, _Countable) and isinstance(B, _Countable):
            return _Countable(A.points | B.points)
        if isinstance(A, _CoCountable) and isinstance(B, _CoCountable):
            return _CoCountable(A.excluded & B.excluded)
        co, c = (A, B) if isinstance(A, _CoCountable) else (B, A)
        return _CoCountable(co.excluded - c.points)


def mu_alpha(alpha="1") -> GalleryReport:
    rep = GalleryReport("mu-alpha", {"alpha": str(ext(alpha))})
    mu, zero = MuAlpha(alpha), MuAlpha(0)
    Z = ZeroSpace(label="X")
    cells = [FiniteSet(()), FiniteSet(("a",)), FiniteSet(("a", "b", "c"))]
    rep.claim(COMPUTED, "mu_alpha agrees with the zero measure on finite cells",
              all(mu(MuAlpha.countable(*c.elements)) == Z.measure(c) for c in cells))
    fam = [MuAlpha.countable("a"), MuAlpha.countable("b", "c"), MuAlpha.cocountable("a", "b", "c"),
           MuAlpha.cocountable("a")]
    add_ok, pairs = True, 0
    for A in fam:
        for B in fam:
            if A is not B and MuAlpha.disjoint(A, B):
                pairs += 1
                add_ok &= mu(MuAlpha.union(A, B)) == mu(A) + mu(B)
    rep.claim(COMPUTED, f"mu_alpha is additive on the {pairs} disjoint pairs of a sample family", add_ok and pairs > 0)
    co = MuAlpha.cocountable("a")
    differs = mu(co) != zero(co)
    rep.claim(STATED, f"on the co-countable set {co}: mu_alpha = {mu(co)}, zero extension = {zero(co)}; "
                      f"they differ iff alpha != 0", differs == (mu.alpha != 0))
    rep.notes.append("co-countable sets are modelled as complements of explicit finite lists")
    return rep


# ---------------------------------------------------------------------------
# the diagonal under zero x counting


def diagonal_example(window=("a", "b", "c")) -> GalleryReport:
    window = tuple(window)
    rep = GalleryReport("diagonal", {"window": len(window)})
    X, Y = ZeroSpace(label="X"), CountingSpace(label="X")
    P = ProductSpace(X, Y)
    f = StepFunction(P, [(Rectangle(FiniteSet((x,)), FiniteSet((x,))), 1) for x in window])
    inner_dx = inner_integral_y(f)  # y -> int f(x, y) dx, under the zero measure
    inner_dy = inner_integral_x(f)  # x -> int f(x, y) dy, under counting measure
    rep.data.update(iterated=inner_dx.integral(), windowed_double=f.integral())
    rep.claim(COMPUTED, f"inner integral over x vanishes for each of the {len(window)} window points",
              all(inner_dx(y) == 0 for y in window))
    rep.claim(COMPUTED, f"iterated integral int_X (int_X f dx) dy = {inner_dx.integral()}", inner_dx.integral() == 0)
    rep.claim(COMPUTED, "inner integral over y is 1 at each window point",
              all(inner_dy(x) == 1 for x in window))
    if window:
        fubini_step(f)
    rep.claim(COMPUTED, f"windowed double integral = {f.integral()} = 0 * |window|; no bounded minorant ladder "
                        f"reaches the diagonal of an uncountable set", f.integral() == 0)
    rep.notes.append("the diagonal is only locally measurable; the locally measurable extension assigns it "
                     "integral inf while the iterated integral is 0, so Fubini fails there")
    return rep


def counting_fubini(window: int = 5) -> GalleryReport:
    rep = GalleryReport("counting-fubini", {"window": window})
    c = counting_counterexample(window)
    rep.data.update(positive=c.positive_part, negative=c.negative_part, absolute=c.absolute)
    rep.claim(COMPUTED, f"iterated integrals: {c.iterated_xy} and {c.iterated_yx}", c.iterated_xy == 0 == c.iterated_yx)
    rep.claim(COMPUTED, "every section integrates to 0", all(v == 0 for v in c.inner_x.values())
              and all(v == 0 for v in c.inner_y.values()))
    rep.claim(COMPUTED, f"positive part on [-N,N]^2 = 2N: {[str(v) for v in c.positive_part]}",
              all(v == 2 * n for n, v in enumerate(c.positive_part)))
    rep.claim(COMPUTED, f"negative part on [-N,N]^2 = 2N: {[str(v) for v in c.negative_part]}",
              all(v == 2 * n for n, v in enumerate(c.negative_part)))
    rep.claim(COMPUTED, f"integral of |f| on [-N,N]^2 = 4N: {[str(v) for v in c.absolute]}",
              all(v == 4 * n for n, v in enumerate(c.absolute)))
    rep.claim(STATED, "both parts grow without bound: the double integral is inf - inf, undefined", window == 0 or (
        c.positive_part[-1] > c.positive_part[0] and c.negative_part[-1] > c.negative_part[0]))
    return rep


GALLERY = {
    "sign-not-in-r2": (sign_not_in_r2, "monotone limit with every integral -inf: the sign function"),
    "escaping-tail": (escaping_tail, "f_n = -chi(n,inf) increases to 0 but integrals stay -inf"),
    "weir-set": (weir_set, "open dense subset of (0,1) with measure in (0,1)"),
    "mu-alpha": (mu_alpha, "a family of extensions of the zero measure"),
    "diagonal": (diagonal_example, "Fubini fails for a locally measurable indicator"),
    "counting-fubini": (counting_fubini, "iterated integrals 0 under counting measure, double undefined"),
}


def run_gallery(entry: str, **params) -> GalleryReport:
    if entry not in GALLERY:
        raise KeyError(f"unknown gallery entry {entry!r}; known: {', '.join(GALLERY)}")
    return GALLERY[entry][0](**params)
