from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz.generators import oracle_integral, raw_value, refinement_atoms
from riesz.spaces import DomainError, FiniteSet, Interval
from riesz.step import (
    MonotonicityError,
    StepFunction,
    vanishing_check,
    markov_level_bound,
    med,
)

from .strategies import C, L, SPACES, Z, nonneg_rationals, rationals, raws, steps

F = Fraction
iv = StepFunction.interval


def test_canonical_form_examples():
    assert (iv(0, 2) + iv(1, 3)).terms == ((Interval(0, 1), 1), (Interval(1, 2), 2), (Interval(2, 3), 1))
    assert (0 * iv(0, 1)).terms == ()
    assert (iv(0, 1) + iv(1, 2)).terms == ((Interval(0, 2), 1),)


def test_integral_examples():
    assert (2 * iv(0, 2) - iv(1, 3)).integral() == 2
    assert StepFunction.zero(L).integral() == 0
    assert StepFunction(C, [(FiniteSet(("a", "b")), 3)]).integral() == 6


def test_lattice_examples():
    assert iv(0, 1).maximum(-iv(0, 1)) == iv(0, 1)
    assert iv(0, 2).minimum(iv(1, 3)) == iv(1, 2)
    phi = iv(0, 2) - iv(1, 3, F(1, 3))
    assert (phi + (-1) * phi).is_zero()


def test_ae_equality_examples():
    # changing the value at the single point 0 does not change the class
    assert iv(0, 1).ae_equal(StepFunction(L, [(Interval.open(0, 1), 1), (Interval(0, 0), 5)]))
    assert not iv(0, 1).ae_equal(iv(0, 2))
    a = StepFunction(Z, [(FiniteSet(("a",)), 3)])
    b = StepFunction(Z, [(FiniteSet(("b", "c")), -1)])
    assert a.ae_equal(b)


def test_markov_examples():
    lv = markov_level_bound(iv(0, 1, 2), 1)
    assert (lv.total, lv.bound) == (1, 2)
    assert markov_level_bound(iv(0, 1), 2).total == 0
    lv = markov_level_bound(iv(0, F(1, 4), 4), 1)
    assert (lv.total, lv.bound) == (F(1, 4), 1)
    with pytest.raises(DomainError):
        markov_level_bound(-iv(0, 1), 1)


def test_vanishing_examples():
    v = vanishing_check(lambda n: iv(0, F(1, n)), F(1, 8), 64)
    assert v.first_below == 9 and v.integrals_nonincreasing
    assert vanishing_check(lambda n: StepFunction.zero(L), F(1, 10**6), 5).first_below == 1
    v = vanishing_check(lambda n: iv(0, 1, F(1, n)), F(1, 100), 200)
    assert v.first_below == 101


def test_vanishing_rejects_increase():
    with pytest.raises(MonotonicityError) as e:
        vanishing_check(lambda n: iv(0, n), 1, 5)
    assert e.value.index == 2


def test_med_clamps():
    g = iv(0, 1)
    assert med(-g, 5 * g, g) == g
    with pytest.raises(DomainError):
        med(g, g, -g)


@pytest.mark.parametrize("space", SPACES, ids=lambda s: s.name)
def test_against_pointwise_oracle(space):
    @given(raws(space), raws(space), rationals)
    def check(raw1, raw2, c):
        f, g = StepFunction(space, raw1), StepFunction(space, raw2)
        assert f.integral() == oracle_integral(space, raw1)
        atoms = refinement_atoms(space, [cell for cell, _ in raw1 + raw2])
        hi, lo = f.maximum(g), f.minimum(g)
        for p, _ in atoms:
            a, b = raw_value(space, raw1, p), raw_value(space, raw2, p)
            assert f(p) == a
            assert hi(p) == max(a, b) and lo(p) == min(a, b)
            assert (f + c * g)(p) == a + c * b
        assert (f + g).integral() == f.integral() + g.integral()
        assert (c * f).integral() == c * f.integral()
        assert hi + lo == f + g
        assert abs(f).integral() >= abs(f.integral())
        assert f.le_ae(hi) and lo.le_ae(f)

    check()


@given(steps(L, nonneg_rationals), st.builds(Fraction, st.integers(1, 20), st.integers(1, 4)))
def test_markov_bound_holds(phi, t):
    lv = markov_level_bound(phi, t)
    assert lv.total * t <= phi.integral()
    assert lv.total == sum((m for p, m in refinement_atoms(L, phi.cells) if phi(p) > t), Fraction(0))


@given(steps(L))
def test_canonical_form_is_a_normal_form(phi):
    # rebuilding from the canonical terms is the identity; equal functions have equal terms
    assert StepFunction(L, phi.terms) == phi
    cells = [cell for cell, _ in phi.terms]
    assert all(a.hi <= b.lo for a, b in zip(cells, cells[1:]))
    assert all(c != 0 for _, c in phi.terms)


@given(steps(L))
def test_positive_and_negative_parts(phi):
    assert phi.positive_part() - phi.negative_part() == phi
    assert phi.positive_part().nonneg_ae() and phi.negative_part().nonneg_ae()
