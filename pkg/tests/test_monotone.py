import threading
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from riesz import monotone as r1
from riesz.monotone import INFINITE, STABILIZED, UNSTABILIZED, R1Function, compare_r1, diagonal_squeeze, integral_r1
from riesz.numeric import INF, ext
from riesz.step import MonotonicityError, StepFunction

from .strategies import L, nonneg_rationals, steps

F = Fraction
iv = StepFunction.interval


def exhaust():
    return R1Function(lambda k: iv(0, F(k, k + 1)), L, limit=1)


def test_valid_streams():
    f = exhaust()
    assert f.partials(4) == [0, F(1, 2), F(2, 3), F(3, 4), F(4, 5)]
    g = R1Function(lambda k: iv(-k, 0), L)
    assert g.partials(5) == [0, 1, 2, 3, 4, 5]


def test_non_monotone_stream_fails_at_index_1():
    f = R1Function(lambda k: iv(0, 1) if k % 2 == 0 else StepFunction.zero(L), L)
    with pytest.raises(MonotonicityError) as e:
        f.term(3)
    assert e.value.index == 1


def test_integral_estimates():
    est = integral_r1(R1Function.constant(iv(0, 1)))
    assert (est.status, est.index, est.value) == (STABILIZED, 0, ext(1))

    est = integral_r1(exhaust(), budget=100)
    assert est.status == UNSTABILIZED and est.lower_bound == F(100, 101) and est.exact == ext(1)

    est = integral_r1(R1Function(lambda k: iv(-k, 0), L), budget=100, infinity_threshold=10**6)
    assert est.status == INFINITE and est.value == INF


def test_stabilization_is_detected_from_the_window():
    f = R1Function(lambda k: iv(0, min(k, 3)), L)
    est = integral_r1(f, budget=20, stabilization_window=10)
    assert (est.status, est.index, est.value) == (STABILIZED, 3, ext(3))
    assert f.stable_from == 3


def test_declared_limit_below_a_partial_is_rejected():
    f = R1Function(lambda k: iv(0, k), L)
    f.partials(3)
    with pytest.raises(ValueError):
        f.declare(2)
    with pytest.raises(ValueError):
        R1Function(lambda k: iv(0, k), L, limit=2).term(3)


def test_compare_examples():
    one = R1Function.constant(iv(0, 1))
    assert all(v == 0 for row in compare_r1(one, one, 5).table for v in row)
    ev = compare_r1(exhaust(), one, 6)
    assert all(v == 0 for row in ev.table for v in row)
    ev = compare_r1(one, exhaust(), 6)
    assert ev.table[0] == [F(1, n + 1) for n in range(7)]
    assert ev.rows_nonincreasing


def test_lattice_examples():
    f = exhaust()
    assert r1.add(f, R1Function.zero(L)).partials(5) == f.partials(5)
    g = r1.add(exhaust(), R1Function.constant(iv(1, 2)))
    assert g.partials(4) == [F(n, n + 1) + 1 for n in range(5)]
    a, b = R1Function.constant(iv(0, 2)), R1Function.constant(iv(1, 3))
    assert r1.maximum(a, b).term(0) == iv(0, 3)
    assert r1.minimum(a, b).term(0) == iv(1, 2)
    with pytest.raises(Exception):
        r1.scale_nonneg(-1, a)


def test_sup_of_stream_examples():
    fs = lambda n: R1Function.constant(iv(0, 1 - F(1, n + 1)))
    d = r1.sup_of_r1_stream(fs, L, limit=1)
    # members are indexed from 1 and term k takes members 1..k+1
    assert [d.term(k) for k in range(4)] == [iv(0, 1 - F(1, k + 2)) for k in range(4)]
    assert diagonal_squeeze(fs, d, 5) == (F(6, 7), F(6, 7), ext(1))

    same = r1.sup_of_r1_stream(lambda n: exhaust(), L)
    assert same.partials(5) == exhaust().partials(5)

    big = r1.sup_of_r1_stream(lambda n: R1Function.constant(iv(0, n)), L)
    assert big.partials(4) == [1, 2, 3, 4, 5]


def test_concurrent_access_is_consistent():
    f = R1Function(lambda k: iv(0, F(k, k + 1)), L)
    out = []
    threads = [threading.Thread(target=lambda: out.append(f.partials(200))) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(p == out[0] for p in out) and f.verified_prefix == 201


@given(st.lists(steps(L, nonneg_rationals), min_size=1, max_size=5))
def test_running_maximum_is_a_valid_stream(pieces):
    # phi_k = max(pieces[0..k]) is non-decreasing; its partials never decrease
    def gen(k):
        out = pieces[0]
        for p in pieces[1:k + 1]:
            out = out.maximum(p)
        return out

    f = R1Function(gen, L)
    ps = f.partials(len(pieces) - 1)
    assert all(a <= b for a, b in zip(ps, ps[1:]))
    est = integral_r1(f, budget=len(pieces) + 12)
    assert est.status == STABILIZED and est.value == ext(ps[-1])
