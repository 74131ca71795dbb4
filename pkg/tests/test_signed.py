from fractions import Fraction

import pytest
from hypothesis import given

from riesz import signed as r2
from riesz.generators import raw_value, refinement_atoms
from riesz.monotone import R1Function
from riesz.numeric import INF, NEG_INF, ext
from riesz.signed import (
    BeppoLeviRejected,
    DefinednessError,
    DominationError,
    NotIntegrable,
    R2Function,
    UnresolvedIntegral,
    dominated_check,
    fatou_check,
    generalized_beppo_levi,
    l1_check,
    norm_l1,
    r2_make,
    r2_normalize_nonneg,
)
from riesz.step import MonotonicityError, StepFunction

from .strategies import L, SPACES, raws, steps

F = Fraction
iv = StepFunction.interval
zero = lambda: R1Function.zero(L)
ray = lambda: R1Function(lambda k: iv(-k, 0), L)


def test_make_examples():
    assert r2_make(R1Function.constant(iv(0, 1)), zero()).integral() == 1
    f = r2_make(ray(), zero())
    assert f.definedness.finite_side == "neg"
    assert f.integral(budget=100) == INF
    with pytest.raises(DefinednessError):
        r2_make(ray(), R1Function(lambda k: iv(0, k), L))


def test_unresolved_without_budget():
    f = r2_make(ray(), zero())
    with pytest.raises(UnresolvedIntegral):
        f.integral()
    assert f.integral_or_none() is None


def test_declared_integral_must_match():
    with pytest.raises(ValueError):
        R2Function.from_step(iv(0, 1)).__class__(R1Function.constant(iv(0, 1)), zero(), declared=2)


def test_normalization_examples():
    f = R2Function.from_step(iv(0, 1) - iv(2, 3))
    g = r2_normalize_nonneg(f)
    assert g.integral() == f.integral()
    assert g.pos.term(0).nonneg_ae() and g.neg.term(0).nonneg_ae()

    pos = R1Function(lambda k: iv(0, F(k, k + 1)) - iv(0, 1), L, limit=0)
    g = r2_normalize_nonneg(R2Function(pos, zero()))
    assert all(g.pos.term(k).nonneg_ae() for k in range(6))
    assert g.neg.term(0) == iv(0, 1)
    assert g.integral() == 0
    assert [g.ladder(k) for k in range(4)] == [pos.partial(k) for k in range(4)]

    c = R1Function.constant(-iv(0, 1))
    g = r2_normalize_nonneg(R2Function(c, R1Function.constant(-iv(0, 1))))
    assert g.pos.term(0).is_zero() and g.neg.term(0).is_zero()


def test_vector_lattice_examples():
    f = r2_make(ray(), zero())
    f.integral(budget=50)
    assert r2.negate(f).integral() == NEG_INF
    assert r2.add(iv(0, 1), iv(1, 2)).integral() == 2

    a, b = -iv(0, 1), iv(0, 1) - 2 * iv(0, F(1, 2))
    m = r2.maximum(a, b)
    assert m.is_step_backed
    for p, _ in refinement_atoms(L, a.cells + b.cells):
        assert m.step()(p) == max(a(p), b(p))


def test_lattice_on_streams():
    f = R2Function(R1Function(lambda k: iv(0, F(k, k + 1)), L, limit=1), R1Function.constant(iv(0, F(1, 2))))
    g = R2Function.from_step(iv(F(1, 4), 2, F(1, 2)))
    assert r2.add(f, g).integral() == F(1, 2) + F(7, 8)
    assert r2.scale(-2, f).integral() == -1
    hi, lo = r2.maximum(f, g), r2.minimum(f, g)
    for k in (0, 3, 10):
        a, b = f.term(k), g.term(k)
        assert hi.term(k).ae_equal(a.maximum(b)) and lo.term(k).ae_equal(a.minimum(b))


@pytest.mark.parametrize("space", SPACES[:3], ids=lambda s: s.name)
def test_step_backed_operations_agree_with_steps(space):
    @given(steps(space), steps(space))
    def check(a, b):
        fa, fb = R2Function.from_step(a), R2Function.from_step(b)
        assert r2.add(fa, fb).step() == a + b
        assert r2.maximum(fa, fb).step() == a.maximum(b)
        assert r2.minimum(fa, fb).step() == a.minimum(b)
        assert r2.negate(fa).integral() == -a.integral()
        assert norm_l1(fa) == abs(a).integral()

    check()


def test_maximum_of_streams_against_oracle():
    @given(raws(L), raws(L))
    def check(raw1, raw2):
        a, b = StepFunction(L, raw1), StepFunction(L, raw2)
        # same functions, represented as monotone limits rather than constants
        fa = R2Function(R1Function(lambda k: a, L, limit=a.integral()), zero())
        fb = R2Function(R1Function.constant(b.positive_part()), R1Function.constant(b.negative_part()))
        m = r2.maximum(fa, fb)
        for p, _ in refinement_atoms(L, [c for c, _ in raw1 + raw2]):
            assert m.term(0)(p) == max(raw_value(L, raw1, p), raw_value(L, raw2, p))

    check()


def test_l1_examples():
    assert l1_check(iv(0, 1)).integral() == 1
    f = r2_make(ray(), zero())
    f.integral(budget=50)
    with pytest.raises(NotIntegrable):
        l1_check(f)
    g = r2_make(R1Function(lambda k: iv(0, F(k, k + 1)), L, limit=1), R1Function.constant(iv(0, F(1, 2))))
    assert l1_check(g).integral() == F(1, 2)


def test_norm_examples():
    f = R2Function.from_step(iv(0, 1) - iv(0, 1))
    assert norm_l1(f) == 0 and f.step().ae_equal(StepFunction.zero(L))
    g = iv(0, 1) - 2 * iv(0, F(1, 2))
    assert norm_l1(g) == 1
    assert norm_l1(r2.scale(-3, g)) == 3


# monotone convergence --------------------------------------------------------


def test_beppo_levi_increasing_steps():
    limit, rep = generalized_beppo_levi(lambda n: iv(0, F(n, n + 1)), 200, declared=1)
    assert rep.ladder[-1] == F(200, 201) and rep.ladder_nondecreasing
    assert rep.h_bound_ok and rep.pairs_verified == 199
    assert limit.integral() == 1
    # the limit's own ladder climbs towards 1 from below
    vals = [limit.ladder(k) for k in range(0, 40, 8)]
    assert all(a <= b for a, b in zip(vals, vals[1:])) and vals[-1] <= 1


def test_beppo_levi_with_stream_members():
    def member(n):
        neg = R1Function(lambda k: iv(0, F(1, n) * (1 - F(1, k + 2))), L, limit=F(1, n))
        return R2Function(zero(), neg)

    limit, rep = generalized_beppo_levi(member, 60, declared=0)
    assert rep.h_bound_ok and rep.pairs_declared == 59
    assert all(g < F(1, 2 ** (j + 1)) for j, g in enumerate(rep.gaps))
    assert rep.h_integrals == sorted(rep.h_integrals) and rep.h_integrals[-1] <= 1


def test_beppo_levi_rejects_sign_function():
    left = lambda: R1Function(lambda k: iv(-k - 1, 0), L, limit=INF)
    fs = lambda n: R2Function(R1Function.constant(iv(0, n)), left())
    with pytest.raises(BeppoLeviRejected) as e:
        generalized_beppo_levi(fs, 10)
    assert e.value.report.rejected_prefix == [NEG_INF] * 10


def test_beppo_levi_rejects_escaping_tail():
    fs = lambda n: R2Function(zero(), R1Function(lambda k: iv(n, n + k + 1), L, limit=INF))
    with pytest.raises(BeppoLeviRejected):
        generalized_beppo_levi(fs, 10)


def test_beppo_levi_starts_after_infinite_prefix():
    def fs(n):
        if n < 3:
            return R2Function(zero(), R1Function(lambda k: iv(0, k + 1), L, limit=INF))
        return R2Function.from_step(-iv(0, F(1, n)))

    limit, rep = generalized_beppo_levi(fs, 20, declared=0)
    assert rep.start == 3 and rep.rejected_prefix == [NEG_INF, NEG_INF]


def test_beppo_levi_checks_monotonicity_and_declared_limit():
    with pytest.raises(MonotonicityError):
        generalized_beppo_levi(lambda n: iv(0, F(1, n)), 5)
    with pytest.raises(ValueError):
        generalized_beppo_levi(lambda n: iv(0, F(n, n + 1)), 5, declared=F(1, 2))


# fatou and dominated convergence ---------------------------------------------


def test_fatou_examples():
    rep = fatou_check(lambda n: iv(n, n + 1), 12)
    assert rep.inequalities_hold
    assert rep.lower[:-1] == [0] * 11 and rep.tail_inf[0] == 1

    rep = fatou_check(lambda n: iv(0, 1), 8)
    assert rep.lower == [1] * 8 == rep.tail_inf

    rep = fatou_check(lambda n: iv(0, 1, 1 + F(1, n)), 8)
    assert rep.integrals == [1 + F(1, n) for n in range(1, 9)]
    assert rep.lower[0] == 1 + F(1, 8) == rep.tail_inf[0]


def test_dominated_examples():
    g = iv(0, 1)
    rep = dominated_check(lambda n: iv(0, 1, F(1, n)), g, 30)
    assert rep.inequalities_hold and rep.integrals[-1] == F(1, 30)
    rep = dominated_check(lambda n: iv(0, 1) - iv(0, F(1, 2), F(2, n)), g, 30)
    assert rep.integrals[9] == 1 - F(1, 10)
    rep = dominated_check(lambda n: g, g, 5, declared=1)
    assert rep.final_gap == 0


def test_domination_is_checked():
    with pytest.raises(DominationError) as e:
        dominated_check(lambda n: iv(0, 1, n), iv(0, 1), 5)
    assert e.value.index == 2
