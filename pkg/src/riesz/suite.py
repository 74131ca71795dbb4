"""The invariant suite: eight checks over catalogs and random families.

Each ``check_*`` function returns a :class:`CheckResult`; ``run_all`` runs
them in order.  The same functions back ``riesz selftest`` and the
acceptance tests.  Every check is exact: there is no tolerance anywhere
except where a ladder is compared with a declared limit, and that gap is
itself an exact rational.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import gallery
from .fubini import counting_counterexample, fubini_step, transpose
from .generators import (
    make_space,
    oracle_integral,
    random_nonneg_step,
    random_raw,
    random_rational,
    raw_value,
    refinement_atoms,
)
from .measurable import (
    MeasurableSet,
    difference,
    intersection,
    null_iff_measure_zero,
    union,
)
from .monotone import R1Function
from .numeric import ext
from .signed import (
    R2Function,
    dominated_check,
    fatou_check,
    generalized_beppo_levi,
)
from .spaces import (
    CountingSpace,
    FiniteSet,
    Interval,
    IntervalLine,
    NullCover,
    ProductSpace,
    Rectangle,
    ZeroSpace,
)
from .step import StepFunction, markov_level_bound, vanishing_check

__all__ = ["CheckResult", "CHECKS", "run_all"]

L = IntervalLine()


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list, repr=False)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail} ({self.seconds:.2f}s)"


def _timed(name: str, fn: Callable[[], tuple]) -> CheckResult:
    t = time.perf_counter()
    passed, detail, failures = fn()
    return CheckResult(name, passed, detail, time.perf_counter() - t, failures)


def _split(raw, space, rng):
    """Another representation of the same function: interval cells cut in two."""
    out = []
    for cell, c in raw:
        if isinstance(space, IntervalLine) and cell.hi - cell.lo > 0 and rng.random() < 0.5:
            m = cell.lo + (cell.hi - cell.lo) * Fraction(rng.randint(1, 3), 4)
            out += [(Interval(cell.lo, m), c), (Interval(m, cell.hi), c)]
        else:
            out.append((cell, c))
    rng.shuffle(out)
    return out


# 1 ---------------------------------------------------------------------------


def check_step_exactness(count: int = 1000, seed: int = 1) -> CheckResult:
    def run():
        rng = random.Random(seed)
        failures = []
        for kind in ("interval", "counting", "interval*counting"):
            space = make_space(kind)
            for i in range(count):
                raw1, raw2 = random_raw(rng, space), random_raw(rng, space)
                f, g = StepFunction(space, raw1), StepFunction(space, raw2)
                c = random_rational(rng)
                if f.integral() != oracle_integral(space, raw1):
                    failures.append((kind, i, "integral vs oracle"))
                atoms = refinement_atoms(space, [cell for cell, _ in raw1 + raw2])
                if any(f(p) != raw_value(space, raw1, p) for p, _ in atoms):
                    failures.append((kind, i, "pointwise vs oracle"))
                if (f + g).integral() != f.integral() + g.integral() or (c * f).integral() != c * f.integral():
                    failures.append((kind, i, "linearity"))
                hi = f.maximum(g)
                if f.minimum(g) + hi != f + g:
                    failures.append((kind, i, "min + max = sum"))
                if any(hi(p) != max(raw_value(space, raw1, p), raw_value(space, raw2, p)) for p, _ in atoms):
                    failures.append((kind, i, "max vs oracle"))
                if abs(f).integral() < 0 or f.integral() > hi.integral():
                    failures.append((kind, i, "positivity / monotonicity"))
                if not StepFunction(space, _split(raw1, space, rng)).ae_equal(f):
                    failures.append((kind, i, "a.e. equality of two representations"))
        return not failures, f"{3 * count} random functions on interval, counting, product", failures

    return _timed("step-integral exactness", run)


# 2 ---------------------------------------------------------------------------


def check_fubini_exactness(count: int = 500, seed: int = 2) -> CheckResult:
    def run():
        rng = random.Random(seed)
        kinds = ("interval*interval", "interval*counting", "counting*counting")
        failures = []
        for i in range(count):
            kind = kinds[i % 3]
            space = make_space(kind)
            raw = random_raw(rng, space, max_terms=5)
            phi = StepFunction(space, raw)
            try:
                rep = fubini_step(phi)
                back = fubini_step(transpose(phi))
            except AssertionError as e:
                failures.append((kind, i, str(e)))
                continue
            if rep.double != oracle_integral(space, raw):
                failures.append((kind, i, "double vs oracle"))
            if (back.iterated_xy, back.iterated_yx) != (rep.iterated_yx, rep.iterated_xy):
                failures.append((kind, i, "transpose"))
        return not failures, f"{count} product functions, double = both iterated integrals", failures

    return _timed("fubini exactness", run)


# 3 ---------------------------------------------------------------------------


def vanishing_catalog():
    """``(name, sequence, eps, horizon, start)``; dyadic indexing keeps horizons short.

    The 1/n-rate sequences need about 10**6 terms to reach 1e-6, so they are
    checked on the prefix 1..2000 and on a window ending past 10**6.
    """
    eps = Fraction(1, 10**6)
    dy = lambda n: Fraction(1, 2**n)
    return [
        ("chi[0,2^-n)", lambda n: StepFunction.interval(0, dy(n)), eps, 40, 1),
        ("2^-n chi[0,1)", lambda n: StepFunction.interval(0, 1, dy(n)), eps, 40, 1),
        ("staircase sum_j<4 chi[j, j+2^-n)",
         lambda n: StepFunction(L, [(Interval(j, j + dy(n)), 1) for j in range(4)]), eps, 40, 1),
        ("staircase 2^-n sum_j<4 chi[0,1+j/4)",
         lambda n: StepFunction(L, [(Interval(0, 1 + Fraction(j, 4)), dy(n)) for j in range(4)]), eps, 40, 1),
        ("chi[0,1/n) prefix", lambda n: StepFunction.interval(0, Fraction(1, n)), Fraction(1, 1000), 2000, 1),
        ("chi[0,1/n) window", lambda n: StepFunction.interval(0, Fraction(1, n)), eps, 10**6 + 10, 10**6 - 1000),
        ("(1/n) chi[0,1) prefix", lambda n: StepFunction.interval(0, 1, Fraction(1, n)), Fraction(1, 1000), 2000, 1),
        ("(1/n) chi[0,1) window", lambda n: StepFunction.interval(0, 1, Fraction(1, n)), eps, 10**6 + 10, 10**6 - 1000),
        ("counting: 2^-n chi{a,b}", lambda n: StepFunction(CountingSpace(), [(FiniteSet(("a", "b")), dy(n))]),
         eps, 40, 1),
        ("zero sequence", lambda n: StepFunction.zero(L), eps, 5, 1),
    ]


def check_vanishing() -> CheckResult:
    def run():
        failures, rows = [], []
        for name, seq, eps, horizon, start in vanishing_catalog():
            v = vanishing_check(seq, eps, horizon, start)
            if v.first_below is None or not v.integrals_nonincreasing:
                failures.append((name, v.first_below))
            rows.append(f"{name}: n={v.first_below}")
        return not failures, "; ".join(rows), failures

    return _timed("decreasing steps vanish", run)


# 4 ---------------------------------------------------------------------------


def check_markov(count: int = 500, seed: int = 4) -> CheckResult:
    def run():
        rng = random.Random(seed)
        failures = []
        spaces = [make_space("interval"), make_space("counting"), make_space("interval*counting")]
        for i in range(count):
            space = spaces[i % 3]
            phi = random_nonneg_step(rng, space)
            t = Fraction(rng.randint(1, 16), rng.randint(1, 4))
            lv = markov_level_bound(phi, t)
            oracle = sum((m for p, m in refinement_atoms(space, phi.cells) if phi(p) > t), Fraction(0))
            if lv.total != oracle or lv.total * t > phi.integral():
                failures.append((i, t))
        return not failures, f"{count} nonnegative functions, level-set measure <= integral/t", failures

    return _timed("markov level bound", run)


# 5 ---------------------------------------------------------------------------


def beppo_levi_catalog():
    """``(name, f_n, declared limit)`` for ten non-decreasing sequences."""
    q = Fraction
    C = CountingSpace()
    iv = StepFunction.interval

    def shrinking_neg(n):
        # -chi[0,1/n) reached by a non-stabilizing stream from below
        neg = R1Function(lambda k: iv(0, q(1, n) * (1 - q(1, k + 2))), L, limit=q(1, n))
        return R2Function(R1Function.zero(L), neg, name=f"-chi[0,1/{n})")

    def tail_neg(n):
        # -sum_{j>=n} 2^-j chi[j,j+1)
        neg = R1Function(lambda k: StepFunction(L, [(Interval(j, j + 1), q(1, 2**j)) for j in range(n, n + k + 1)]),
                         L, limit=q(2, 2**n))
        return R2Function(R1Function.zero(L), neg, name=f"tail_{n}")

    exhaust = R1Function(lambda k: iv(0, q(k, k + 1)), L, limit=1, name="chi[0,1) from below")
    one = iv(0, 1)

    return [
        ("chi[0,n/(n+1))", lambda n: R2Function.from_step(iv(0, q(n, n + 1))), 1),
        ("chi[0,1) - chi[0,1/n)", lambda n: R2Function.from_step(one - iv(0, q(1, n))), 1),
        ("-(1/n) chi[0,1)", lambda n: R2Function.from_step(iv(0, 1, -q(1, n))), 0),
        ("chi[0,1) - n^-2 chi[1/2,1)", lambda n: R2Function.from_step(one - iv(q(1, 2), 1, q(1, n * n))), 1),
        ("chi[-1+1/n, 1-1/n)", lambda n: R2Function.from_step(iv(q(1, n) - 1, 1 - q(1, n))), 2),
        ("monotone-class pos minus chi[0,1/n)", lambda n: R2Function(exhaust, R1Function.constant(iv(0, q(1, n)))), 1),
        ("-chi[0,1/n) as a limit", shrinking_neg, 0),
        ("-sum_{j>=n} 2^-j chi[j,j+1)", tail_neg, 0),
        ("counting: chi{a} + (1-1/n) chi{b}",
         lambda n: R2Function.from_step(StepFunction(C, [(FiniteSet(("a",)), 1), (FiniteSet(("b",)), 1 - q(1, n))])), 2),
        ("product: chi[0,1-1/n) x {a}",
         lambda n: R2Function.from_step(StepFunction(ProductSpace(L, C), [(Rectangle(Interval(0, 1 - q(1, n)), FiniteSet(("a",))), 1)])),
         1),
    ]


def check_beppo_levi(horizon: int = 10_000, tol=Fraction(1, 1000)) -> CheckResult:
    def run():
        failures, rows = [], []
        for name, fs, lim in beppo_levi_catalog():
            _, rep = generalized_beppo_levi(fs, horizon, declared=lim)
            gap = ext(lim) - rep.ladder[-1]
            ok = rep.h_bound_ok and rep.ladder_nondecreasing and 0 <= gap <= tol
            if not ok:
                failures.append((name, gap, rep.h_bound_ok))
            rows.append(f"{name}: gap {gap}")
        for entry in ("sign-not-in-r2", "escaping-tail"):
            r = gallery.run_gallery(entry)
            if not r.passed:
                failures.append((entry, "not rejected"))
        detail = f"10 sequences within {tol} of their limits at horizon {horizon}; both counterexamples rejected"
        return not failures, detail, failures

    return _timed("generalized beppo levi", run)


# 6 ---------------------------------------------------------------------------


def convergence_catalog():
    """``(name, kind, f_n, g or None)``; kind is ``fatou`` or ``dominated``."""
    q = Fraction
    iv = StepFunction.interval
    C = CountingSpace()
    return [
        ("escape to infinity chi[n,n+1)", "fatou", lambda n: iv(n, n + 1), None),
        ("constant chi[0,1)", "fatou", lambda n: iv(0, 1), None),
        ("(1+1/n) chi[0,1)", "fatou", lambda n: iv(0, 1, 1 + q(1, n)), None),
        ("spike n chi[0,1/n)", "fatou", lambda n: iv(0, q(1, n), n), None),
        ("spreading (1/n) chi[0,n)", "fatou", lambda n: iv(0, n, q(1, n)), None),
        ("alternating chi[0,1), chi[1,2)", "fatou", lambda n: iv(n % 2, n % 2 + 1), None),
        ("counting escape chi{n}", "fatou", lambda n: StepFunction(C, [(FiniteSet((n,)), 1)]), None),
        ("(1/n) chi[0,1) under chi[0,1)", "dominated", lambda n: iv(0, 1, q(1, n)), iv(0, 1)),
        ("chi[0,1) - (2/n) chi[0,1/2)", "dominated", lambda n: iv(0, 1) - iv(0, q(1, 2), q(2, n)), iv(0, 1)),
        ("(-1)^n/n chi[0,2)", "dominated", lambda n: iv(0, 2, q((-1) ** n, n)), iv(0, 2)),
    ]


def check_convergence(horizon: int = 40) -> CheckResult:
    def run():
        failures = []
        for name, kind, fs, g in convergence_catalog():
            rep = fatou_check(fs, horizon) if kind == "fatou" else dominated_check(fs, g, horizon)
            if not rep.inequalities_hold:
                failures.append((name, getattr(rep, "violations", None)))
        return not failures, f"10 sequences, ladders checked at every index up to {horizon}", failures

    return _timed("fatou and dominated convergence", run)


# 7 ---------------------------------------------------------------------------


def null_catalog():
    """``(name, object)``: explicit covers and a step-backed set of measure zero."""
    q = Fraction
    rs = gallery.weir_enumeration(64)

    def rational_batch(k):
        rho = q(1, 4 ** (k + 1))
        return [Interval(r - rho, r + rho) for r in rs[: k + 1]]

    LL = ProductSpace(L, L)
    return [
        ("point {0}", NullCover(L, lambda k: [Interval(-q(1, 2 ** (k + 2)), q(1, 2 ** (k + 2)))], q(1, 1), "point")),
        ("empty set", NullCover.empty(L)),
        ("first rationals of (0,1), each hit infinitely often",
         NullCover(L, rational_batch, q(8, 9), "rationals")),
        ("strip [0,1) x {0}",
         NullCover(LL, lambda k: [Rectangle(Interval(0, 1), Interval(-q(1, 2 ** (k + 2)), q(1, 2 ** (k + 2))))],
                   q(1, 1), "strip")),
        ("{a, b} under the zero measure", MeasurableSet.from_cells(ZeroSpace(), [FiniteSet(("a", "b"))])),
    ]


def check_measure_structure(count: int = 1000, seed: int = 7) -> CheckResult:
    def run():
        rng = random.Random(seed)
        failures = []
        for i in range(count):
            space = make_space("interval" if i % 2 else "counting")
            A = MeasurableSet.from_cells(space, [c for c, _ in random_raw(rng, space, 3)])
            B = MeasurableSet.from_cells(space, [c for c, _ in random_raw(rng, space, 3)])
            U = union(lambda n: (A, B)[n - 1], 2)
            I = intersection(lambda n: (A, B)[n - 1], 2)
            D = difference(A, B)
            mA, mB, mU, mI, mD = (S.step.integral() for S in (A, B, U, I, D))
            if mU + mI != mA + mB or mD != mA - mI:
                failures.append((i, "additivity"))
            pts = refinement_atoms(space, A.step.cells + B.step.cells)
            for p, _ in pts:
                a, b = p in A, p in B
                if (p in U) != (a or b) or (p in I) != (a and b) or (p in D) != (a and not b):
                    failures.append((i, "membership", p))
                    break
        eps_list = [Fraction(1, 10**j) for j in range(1, 7)]
        for name, obj in null_catalog():
            forward = null_iff_measure_zero(obj, eps_list)
            back = null_iff_measure_zero(MeasurableSet.from_null_cover(forward.cover, name=name + " (subset)"), eps_list)
            if not (forward.is_null and back.is_null and forward.measure == 0):
                failures.append((name, forward.reason, back.reason))
            if [r[:3] for r in forward.rows] != [r[:3] for r in back.rows]:
                failures.append((name, "round trip changed the certificates"))
        rejected = null_iff_measure_zero(MeasurableSet.from_cells(L, [Interval(0, 1)]), eps_list)
        if rejected.is_null or rejected.measure != 1:
            failures.append(("[0,1)", "accepted as null"))
        return not failures, f"{count} random set pairs; 5 null sets round-tripped at eps 1e-1..1e-6", failures

    return _timed("measure structure", run)


# 8 ---------------------------------------------------------------------------


def check_gallery() -> CheckResult:
    def run():
        failures = []
        weir = gallery.run_gallery("weir-set", depth=20)
        d = weir.data
        if not (weir.passed and 0 < d["lower"] <= min(d["partial_measures"])
                and max(d["partial_measures"]) <= Fraction(1, 4) < 1):
            failures.append("weir-set")
        for n in range(0, 7):
            c = counting_counterexample(n)
            if c.iterated_xy != 0 or c.iterated_yx != 0 or c.positive_part[-1] != 2 * n:
                failures.append(("counting", n))
            if n and not c.positive_part[-1] > c.positive_part[-2]:
                failures.append(("counting growth", n))
        diag = gallery.run_gallery("diagonal", window=("a", "b", "c", "d"))
        if not diag.passed or diag.data["iterated"] != 0:
            failures.append("diagonal")
        renders = [[gallery.run_gallery(e).render() for e in gallery.GALLERY] for _ in range(2)]
        if renders[0] != renders[1]:
            failures.append("reruns differ")
        return not failures, "weir bounds, counting counterexample, diagonal; reruns identical", failures

    return _timed("gallery reproduction", run)


CHECKS = [
    ("step", check_step_exactness),
    ("fubini", check_fubini_exactness),
    ("vanishing", check_vanishing),
    ("markov", check_markov),
    ("beppo-levi", check_beppo_levi),
    ("convergence", check_convergence),
    ("measure", check_measure_structure),
    ("gallery", check_gallery),
]


def run_all(names=None) -> list[CheckResult]:
    return [fn() for key, fn in CHECKS if names is None or key in names]
