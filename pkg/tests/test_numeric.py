from fractions import Fraction

import pytest
from hypothesis import given

from riesz.numeric import (
    INF,
    NEG_INF,
    UNDEFINED,
    ExtendedRational,
    UndefinedArithmetic,
    ext,
    ext_add,
    ext_mul,
    parse_extended,
    parse_rational,
)

from .strategies import rationals

F = Fraction


def test_addition_examples():
    assert ext_add(F(1, 2), F(1, 3)) == ext(F(5, 6))
    assert ext_add(INF, NEG_INF) is UNDEFINED
    assert ext_add(NEG_INF, 7) == NEG_INF


def test_multiplication_examples():
    assert ext_mul(0, INF) == ext(0)
    assert ext_mul(-2, INF) == NEG_INF
    assert ext_mul(F(3, 4), F(4, 3)) == ext(1)


def test_operator_raises_on_opposite_infinities():
    with pytest.raises(UndefinedArithmetic):
        INF + NEG_INF
    assert not UNDEFINED


def test_parsing():
    assert parse_rational("-3/6") == F(-1, 2)
    assert parse_extended("inf") == INF
    assert parse_extended("-inf") == NEG_INF
    assert ExtendedRational("7/2").finite == F(7, 2)
    for bad in ("1.5", "1/0", "x", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_infinite_has_no_finite_value():
    with pytest.raises(ValueError):
        INF.finite


@given(rationals, rationals)
def test_finite_arithmetic_matches_fractions(a, b):
    assert ext_add(a, b) == ext(a + b)
    assert ext_mul(a, b) == ext(a * b)
    assert (ext(a) < ext(b)) == (a < b)


@given(rationals)
def test_infinities_absorb(a):
    assert ext_add(a, INF) == INF
    assert ext_add(NEG_INF, a) == NEG_INF
    assert NEG_INF < ext(a) < INF
    expected = ext(0) if a == 0 else (INF if a > 0 else NEG_INF)
    assert ext_mul(a, INF) == expected
