from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz.generators import refinement_atoms
from riesz.measurable import (
    MeasurableFunction,
    MeasurableSet,
    difference,
    dominated_to_l1,
    fatou_general,
    h_inverse,
    h_transform,
    intersection,
    limit_of_measurable,
    measure_of,
    nonneg_to_r2,
    null_iff_measure_zero,
    union,
)
from riesz.numeric import INF, ext
from riesz.signed import DominationError
from riesz.spaces import DomainError, FiniteSet, Interval, NullCover
from riesz.step import StepFunction

from .strategies import C, L, cells_for

F = Fraction
iv = StepFunction.interval
cells = lambda *pairs: MeasurableSet.from_cells(L, [Interval(a, b) for a, b in pairs])


# sets ------------------------------------------------------------------------


def test_measure_examples():
    assert measure_of(cells((0, 1))) == 1
    A = MeasurableSet.from_stream(L, lambda k: [Interval(k, k + F(1, 2 ** (k + 1)))], declared=1)
    assert measure_of(A) == 1
    partials = A.indicator.pos.partials(6)
    assert partials == sorted(partials) and partials[-1] == 1 - F(1, 2**7)
    assert measure_of(MeasurableSet.from_cells(C, [FiniteSet(("x",))])) == 1


def test_stream_set_with_wrong_declaration_is_rejected():
    A = MeasurableSet.from_stream(L, lambda k: [Interval(k, k + 1)], declared=3)
    with pytest.raises(ValueError):
        A.indicator.pos.partials(5)


def test_difference_example():
    D = difference(cells((0, 2)), cells((1, 3)))
    assert D.step == iv(0, 1) and measure_of(D) == 1


def test_disjoint_union_stream():
    U = union(lambda n: cells((n - 1, n)))
    assert U.indicator.pos.partials(4) == [1, 2, 3, 4, 5]
    assert U.generators(2) == (Interval(2, 3),)


def test_finite_union_is_exact():
    U = union(lambda n: cells((n, n + 2)), 3)
    assert U.step == iv(1, 5) and measure_of(U) == 4


def test_nested_intersection():
    I = intersection(lambda n: cells((0, 1 + F(1, n))), declared=1, horizon=16)
    assert I.ladder == [1 + F(1, n) for n in range(1, 17)]
    assert measure_of(I) == 1


def test_finite_intersection_is_exact():
    I = intersection(lambda n: cells((n, n + 3)), 3)
    assert I.step == iv(3, 4)


def test_indicator_only():
    with pytest.raises(DomainError):
        MeasurableSet.from_step(iv(0, 1, 2))


@given(st.lists(cells_for(L), max_size=3), st.lists(cells_for(L), max_size=3))
def test_set_algebra_against_membership(ca, cb):
    A, B = MeasurableSet.from_cells(L, ca), MeasurableSet.from_cells(L, cb)
    U, I, D = union(lambda n: (A, B)[n - 1], 2), intersection(lambda n: (A, B)[n - 1], 2), difference(A, B)
    m = lambda S: S.step.integral()
    assert m(U) + m(I) == m(A) + m(B)
    assert m(D) + m(I) == m(A)
    for p, _ in refinement_atoms(L, list(ca) + list(cb)):
        assert (p in U) == (p in A or p in B)
        assert (p in I) == (p in A and p in B)
        assert (p in D) == (p in A and p not in B)


# null sets -------------------------------------------------------------------


def test_point_is_null_at_every_eps():
    cover = NullCover(L, lambda k: [Interval(-F(1, 2 ** (k + 2)), F(1, 2 ** (k + 2)))], 1)
    ev = null_iff_measure_zero(cover, [F(1, 10**j) for j in range(1, 7)])
    assert ev.is_null and ev.measure == 0
    assert all(tail < eps for eps, _, tail, _ in ev.rows)


def test_empty_set_both_ways():
    assert null_iff_measure_zero(NullCover.empty(L)).is_null
    assert null_iff_measure_zero(MeasurableSet.empty(L)).is_null


def test_positive_measure_is_rejected():
    ev = null_iff_measure_zero(cells((0, 1)))
    assert not ev.is_null and ev.measure == 1


def test_round_trip_through_a_set():
    cover = NullCover(L, lambda k: [Interval(3 - F(1, 4 ** (k + 1)), 3 + F(1, 4 ** (k + 1)))], F(2, 3))
    S = MeasurableSet.from_null_cover(cover)
    ev = null_iff_measure_zero(S, [F(1, 100)])
    assert ev.is_null and measure_of(S) == 0
    assert null_iff_measure_zero(ev.cover, [F(1, 100)]).rows == ev.rows


# measurable functions --------------------------------------------------------


def alternating():
    # (-1)^n / n on [0,1) plus a spike of height 5 on [0, 1/n): converges to 0 a.e.
    return MeasurableFunction(L, lambda n: iv(0, 1, F((-1) ** n, n)) + iv(0, F(1, n), 5), "alt",
                              target=StepFunction.zero(L))


def test_dominated_to_l1_examples():
    cert, rep = dominated_to_l1(alternating(), iv(0, 1), horizon=20)
    assert cert.integral() == 0 and rep.inequalities_hold
    assert all(abs(v) <= 1 for v in rep.integrals)
    f = MeasurableFunction.from_step(iv(0, 1))
    cert, rep = dominated_to_l1(f, iv(0, 2), horizon=5)
    assert cert.integral() == 1 and rep.integrals == [1] * 5


def test_domination_of_the_limit_is_checked():
    with pytest.raises(DominationError):
        dominated_to_l1(MeasurableFunction.from_step(iv(0, 1, 3)), iv(0, 1), horizon=3)


def test_nonneg_to_r2_examples():
    exhaust = lambda n: [Interval(-n, n)]
    f, rep = nonneg_to_r2(MeasurableFunction.from_step(iv(0, 1)), exhaust, horizon=10)
    assert f.integral() == 1 and rep.h_bound_ok
    f, _ = nonneg_to_r2(MeasurableFunction.from_step(StepFunction.zero(L)), exhaust, horizon=5)
    assert f.integral() == 0
    grow = MeasurableFunction(L, lambda n: iv(0, 1, n), "n chi[0,1)")
    f, rep = nonneg_to_r2(grow, exhaust, horizon=10, declared=INF)
    assert f.integral() == INF and rep.ladder == [ext(n) for n in range(1, 11)]


def test_nonneg_to_r2_needs_a_monotone_witness_or_a_limit():
    wobble = MeasurableFunction(L, lambda n: iv(0, 1, 1 + F((-1) ** n, n + 1)), "wobble")
    with pytest.raises(Exception):
        nonneg_to_r2(wobble, lambda n: [Interval(-n, n)], horizon=5)


def test_h_transform_examples():
    g = iv(0, 1)
    lim, h = limit_of_measurable(lambda n: MeasurableFunction.from_step(g), g)
    assert h(3) == iv(0, 1, F(1, 2)) and lim.term(3) == g
    lim, h = limit_of_measurable(lambda n: MeasurableFunction.from_step(StepFunction.zero(L)), g)
    assert h(2).is_zero() and lim.term(2).is_zero()
    lim, h = limit_of_measurable(lambda n: MeasurableFunction.from_step(iv(0, 1, n)), g)
    assert [h(n) for n in (1, 2, 5)] == [iv(0, 1, F(n, n + 1)) for n in (1, 2, 5)]


@given(st.lists(st.tuples(cells_for(L), st.builds(Fraction, st.integers(-9, 9), st.integers(1, 3))), max_size=3))
def test_h_transform_round_trip(raw):
    phi = StepFunction(L, raw)
    g = StepFunction(L, [(c, 1) for c, _ in raw]).pointwise(lambda v: F(2) if v else F(0))
    h = h_transform(g, phi)
    assert (g - abs(h)).nonneg_ae()
    assert h_inverse(g, h) == phi


def test_h_transform_needs_support_inside_g():
    with pytest.raises(DomainError):
        h_transform(iv(0, 1), iv(0, 2))


def test_fatou_general_examples():
    rep = fatou_general(lambda n: MeasurableFunction.from_step(iv(n, n + 1)), 10,
                        limit=StepFunction.zero(L), declared_liminf=1)
    assert rep.branch == "finite" and rep.consistent and rep.limit_integral == 0
    one = MeasurableFunction.from_step(iv(0, 1))
    rep = fatou_general(lambda n: one, 10, limit=one)
    assert rep.consistent and rep.limit_integral == rep.fatou.tail_inf[-1] == 1
    rep = fatou_general(lambda n: MeasurableFunction.from_step(iv(0, n)), 10)
    assert rep.branch == "infinite" and rep.consistent


def test_combinators_work_termwise():
    a = MeasurableFunction(L, lambda n: iv(0, 1, 1 + F(1, n)), "a", target=iv(0, 1))
    b = MeasurableFunction.from_step(iv(0, 2, 2))
    assert (a + b).term(2) == iv(0, 1, F(3, 2)) + iv(0, 2, 2)
    assert (a * b).limit_step() == iv(0, 1, 2)
    assert a.quotient(b).term(1) == iv(0, 1)
    assert abs(a - b).limit_step() == iv(0, 1) + iv(1, 2, 2)
    assert a.maximum(b).limit_step() == iv(0, 2, 2)
    assert (3 * a).limit_step() == iv(0, 1, 3)


def test_sampling_skips_a_null_set():
    f = MeasurableFunction(L, lambda n: iv(0, F(1, n), n), "spike")
    cover = NullCover(L, lambda k: [Interval(-F(1, 2 ** (k + 1)), F(1, 2 ** (k + 1)))], 2)
    out = f.sample([F(0), F(1, 2)], 6, skip=cover)
    assert F(0) not in out and out[F(1, 2)] == [1, 0, 0, 0, 0, 0]
