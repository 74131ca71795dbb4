from fractions import Fraction

import pytest

from riesz.gallery import GALLERY, MuAlpha, diagonal_example, run_gallery, weir_enumeration, weir_index


@pytest.mark.parametrize("entry", sorted(GALLERY))
def test_every_entry_holds(entry):
    rep = run_gallery(entry)
    assert rep.passed, rep.render()
    assert all(c.tag in ("[trivial]", "[computed]", "[stated]") for c in rep.claims)


@pytest.mark.parametrize("entry", sorted(GALLERY))
def test_rendering_is_deterministic(entry):
    assert run_gallery(entry).render() == run_gallery(entry).render()


def test_weir_bounds():
    rep = run_gallery("weir-set", depth=20)
    d = rep.data
    assert d["lower"] == Fraction(1, 8)
    assert all(d["lower"] <= m <= u <= Fraction(1, 4) for m, u in zip(d["partial_measures"], d["upper"]))


def test_weir_enumeration_and_index_agree():
    rs = weir_enumeration(40)
    assert rs[:4] == [Fraction(1, 2), Fraction(1, 3), Fraction(2, 3), Fraction(1, 4)]
    assert [weir_index(r) for r in rs] == list(range(1, 41))
    with pytest.raises(ValueError):
        weir_index(Fraction(1))


@pytest.mark.parametrize("window", [(), ("a",), ("a", "b", "c")])
def test_diagonal_windows(window):
    rep = diagonal_example(window)
    assert rep.passed and rep.data["iterated"] == 0 and rep.data["windowed_double"] == 0


def test_mu_alpha_depends_on_alpha():
    co = MuAlpha.cocountable("a")
    assert MuAlpha(0)(co) == 0 and MuAlpha(3)(co) == 3
    assert run_gallery("mu-alpha", alpha="0").passed
    assert run_gallery("mu-alpha", alpha="5/2").passed


def test_counting_window_parameter():
    rep = run_gallery("counting-fubini", window=2)
    assert rep.data["absolute"] == [0, 4, 8]


def test_unknown_entry():
    with pytest.raises(KeyError):
        run_gallery("nope")
