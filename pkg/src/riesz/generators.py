"""Seeded random step functions and a brute-force pointwise oracle.

The oracle never canonicalizes: it evaluates a raw, possibly overlapping
sum ``sum c_i chi_{P_i}`` at one point of every atom of the refinement grid
and weighs it by the atom's measure.  Tests compare it against the
canonical machinery.
"""
from __future__ import annotations

import random
from fractions import Fraction

from .spaces import (
    CountingSpace,
    FiniteSet,
    Interval,
    IntervalLine,
    MeasureSpace,
    ProductSpace,
    Rectangle,
    ZeroSpace,
)
from .step import StepFunction

__all__ = [
    "GROUND",
    "SPACES",
    "make_space",
    "random_rational",
    "random_cell",
    "random_raw",
    "random_step",
    "random_nonneg_step",
    "raw_value",
    "refinement_atoms",
    "oracle_integral",
]

GROUND = ("a", "b", "c", "d", "e", "f")

SPACES = {
    "interval": lambda: IntervalLine(),
    "counting": lambda: CountingSpace(),
    "zero": lambda: ZeroSpace(),
    "interval*interval": lambda: ProductSpace(IntervalLine(), IntervalLine()),
    "interval*counting": lambda: ProductSpace(IntervalLine(), CountingSpace()),
    "counting*counting": lambda: ProductSpace(CountingSpace(), CountingSpace()),
}


def make_space(kind: str) -> MeasureSpace:
    return SPACES[kind]()


def random_rational(rng: random.Random, bound: int = 4, dens=(1, 2, 3, 4)) -> Fraction:
    return Fraction(rng.randint(-bound * 4, bound * 4), rng.choice(dens) * 4) if bound else Fraction(0)


def random_cell(rng: random.Random, space: MeasureSpace):
    if isinstance(space, IntervalLine):
        a = Fraction(rng.randint(-8, 8), rng.choice((1, 2, 3, 4)))
        return Interval(a, a + Fraction(rng.randint(0, 8), rng.choice((1, 2, 4))))
    if isinstance(space, (CountingSpace, ZeroSpace)):
        return FiniteSet(tuple(rng.sample(GROUND, rng.randint(0, 3))))
    if isinstance(space, ProductSpace):
        return Rectangle(random_cell(rng, space.left), random_cell(rng, space.right))
    raise TypeError(f"no generator for {space}")


def random_raw(rng: random.Random, space: MeasureSpace, max_terms: int = 4, nonneg: bool = False) -> list:
    out = []
    for _ in range(rng.randint(0, max_terms)):
        c = random_rational(rng)
        out.append((random_cell(rng, space), abs(c) if nonneg else c))
    return out


def random_step(rng: random.Random, space: MeasureSpace, max_terms: int = 4) -> StepFunction:
    return StepFunction(space, random_raw(rng, space, max_terms))


def random_nonneg_step(rng: random.Random, space: MeasureSpace, max_terms: int = 4) -> StepFunction:
    return StepFunction(space, random_raw(rng, space, max_terms, nonneg=True))


def raw_value(space: MeasureSpace, raw, point) -> Fraction:
    return sum((Fraction(c) for cell, c in raw if space.contains(cell, point)), Fraction(0))


def refinement_atoms(space: MeasureSpace, cells) -> list:
    """``(point, measure)`` for one point of each atom generated by ``cells``."""
    cells = list(cells)
    if isinstance(space, ProductSpace):
        xs = refinement_atoms(space.left, [c.left for c in cells])
        ys = refinement_atoms(space.right, [c.right for c in cells])
        return [((x, y), mx * my) for x, mx in xs for y, my in ys]
    return [(rep, space.measure(atom)) for atom, rep in space.atoms(cells)]


def oracle_integral(space: MeasureSpace, raw) -> Fraction:
    return sum(
        (raw_value(space, raw, p) * m for p, m in refinement_atoms(space, [c for c, _ in raw])),
        Fraction(0),
    )
