from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz.fubini import (
    counting_counterexample,
    fubini_pair,
    fubini_r1,
    fubini_r2,
    fubini_step,
    inner_integral_x,
    section_null_cover,
    section_step,
    transpose,
)
from riesz.generators import oracle_integral, raw_value, refinement_atoms
from riesz.monotone import R1Function
from riesz.numeric import INF, UNDEFINED
from riesz.signed import R2Function
from riesz.spaces import DomainError, FiniteSet, Interval, NullCover, ProductSpace, Rectangle
from riesz.step import StepFunction

from .strategies import C, L, PRODUCTS, raws

F = Fraction
LL, LC = ProductSpace(L, L), ProductSpace(L, C)


def rect(space, a, b, **kw):
    return StepFunction(space, [(Rectangle(a, b), kw.get("c", 1))])


def test_section_examples():
    f = rect(LL, Interval(0, 1), Interval(0, 2))
    assert section_step(f, F(1, 2)) == StepFunction.interval(0, 2)
    assert section_step(f, 2).is_zero()
    a = FiniteSet(("a",))
    g = rect(LC, Interval(0, 1), a, c=2) - rect(LC, Interval(0, 2), a)
    assert section_step(g, F(1, 2)) == StepFunction(C, [(a, 1)])
    assert section_step(g, F(3, 2)) == StepFunction(C, [(a, -1)])


def test_fubini_step_examples():
    assert fubini_step(rect(LL, Interval(0, 2), Interval(0, 3))).double == 6
    a = FiniteSet(("a",))
    rep = fubini_step(rect(LC, Interval(0, 1), a, c=2) - rect(LC, Interval(0, 4), a))
    assert rep.double == rep.iterated_xy == rep.iterated_yx == -2
    assert fubini_step(StepFunction.zero(LL)).double == 0


def test_section_needs_a_product():
    with pytest.raises(DomainError):
        section_step(StepFunction.interval(0, 1), 0)


@pytest.mark.parametrize("space", PRODUCTS, ids=str)
@given(data=st.data())
def test_fubini_step_against_the_oracle(space, data):
    raw = data.draw(raws(space))
    phi = StepFunction(space, raw)
    rep = fubini_step(phi)
    assert rep.double == oracle_integral(space, raw)
    # inner integral at each x-atom, recomputed pointwise over the y-atoms
    cells = [c for c, _ in raw]
    ys = refinement_atoms(space.right, [c.right for c in cells])
    for x, _ in refinement_atoms(space.left, [c.left for c in cells]):
        brute = sum((raw_value(space, raw, (x, y)) * m for y, m in ys), Fraction(0))
        assert inner_integral_x(phi)(x) == brute
    t = fubini_step(transpose(phi))
    assert (t.double, t.iterated_xy, t.iterated_yx) == (rep.double, rep.iterated_yx, rep.iterated_xy)


def test_fubini_r1_examples():
    f = R1Function(lambda n: rect(LL, Interval(0, F(n, n + 1)), Interval(0, 1)), LL, limit=1)
    rep = fubini_r1(f, horizon=20)
    assert rep.double == 1 and rep.ladders["xy"] == rep.ladders["yx"] == rep.ladders["double"]
    const = R1Function.constant(rect(LL, Interval(0, 1), Interval(0, 3)))
    assert fubini_r1(const, 5).verdict == "exact-equal" and fubini_r1(const, 5).double == 3
    grow = R1Function(lambda n: rect(LL, Interval(0, n), Interval(0, 1)), LL, limit=INF)
    assert fubini_r1(grow, 10).double == INF


def test_fubini_r2_and_undefined_pair():
    pos = R1Function(lambda n: rect(LL, Interval(0, n), Interval(0, 1)), LL, limit=INF)
    neg = R1Function(lambda n: rect(LL, Interval(-n, 0), Interval(0, 1)), LL, limit=INF)
    rep = fubini_pair(pos, neg, horizon=8)
    assert rep.verdict == "undefined" and rep.double is UNDEFINED
    assert rep.ladders["double"] == [0] * 9
    finite = R1Function.constant(rect(LL, Interval(0, 1), Interval(0, 1)))
    rep = fubini_r2(R2Function(pos, finite), horizon=8)
    assert rep.double == INF
    step = R2Function.from_step(rect(LL, Interval(0, 2), Interval(0, 1)))
    assert fubini_r2(step).double == 2


def test_section_null_cover():
    strip = NullCover(LL, lambda k: [Rectangle(Interval(0, 1), Interval(-F(1, 2 ** (k + 2)), F(1, 2 ** (k + 2))))], 1)
    ev = section_null_cover(strip, [F(1, 2), 2], horizon=12)
    assert ev.consistent
    assert ev.rows[2] == [0] * 12
    assert ev.rows[F(1, 2)][-1] < 1
    assert section_null_cover(NullCover.empty(LL), [0], horizon=3).rows == {0: [0, 0, 0]}
    with pytest.raises(DomainError):
        section_null_cover(NullCover.empty(L), [0])


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_counting_counterexample(n):
    c = counting_counterexample(n)
    assert c.iterated_xy == c.iterated_yx == 0
    assert c.positive_part == [2 * j for j in range(n + 1)]
    assert c.negative_part == c.positive_part
    assert c.absolute == [4 * j for j in range(n + 1)]


def test_counting_counterexample_rejects_negative_window():
    with pytest.raises(ValueError):
        counting_counterexample(-1)
