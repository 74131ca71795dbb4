"""Semirings of sets carrying a finite measure.

Three concrete semirings are provided:

* :class:`IntervalLine` -- bounded half-open intervals ``[lo, hi)`` with
  rational endpoints, measured by length;
* :class:`CountingSpace` / :class:`ZeroSpace` -- finite subsets of a ground
  set of identifiers, measured by cardinality or identically zero;
* :class:`ProductSpace` -- rectangles ``P x Q`` with the product measure.

Besides measure and membership, every space knows how to refine a family of
its cells into disjoint *atoms* and how to merge atom-wise values back into
a canonical list of cells.  Step-function canonical forms are built on
these two primitives.
"""
from __future__ import annotations

import bisect
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Sequence

__all__ = [
    "Interval",
    "FiniteSet",
    "Rectangle",
    "MeasureSpace",
    "IntervalLine",
    "CountingSpace",
    "ZeroSpace",
    "ProductSpace",
    "DomainError",
    "SemiringReport",
    "NullCover",
    "semiring_check",
    "cell_measure",
    "null_cover_bound",
]


class DomainError(ValueError):
    """A cell, point or function does not belong to the space it is used with."""


def _point_key(p):
    # ints/fractions before strings; keeps mixed ground sets totally ordered
    if isinstance(p, (int, Fraction)) and not isinstance(p, bool):
        return (0, p, "")
    return (1, 0, str(p))


@dataclass(frozen=True)
class Interval:
    """Half-open ``[lo, hi)``; ``lo == hi`` is the empty cell."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = self.lo, self.hi
        if type(lo) is not Fraction:
            lo = Fraction(lo)
        if type(hi) is not Fraction:
            hi = Fraction(hi)
        if lo > hi:
            raise DomainError(f"interval with lo > hi: [{lo}, {hi})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def closed(cls, lo, hi) -> Interval:
        # endpoints are null sets, so [lo, hi] and [lo, hi) are the same cell a.e.
        return cls(lo, hi)

    @classmethod
    def open(cls, lo, hi) -> Interval:
        return cls(lo, hi)

    @property
    def empty(self) -> bool:
        return self.lo == self.hi

    def __str__(self):
        return f"[{self.lo}, {self.hi})"


@dataclass(frozen=True)
class FiniteSet:
    """A finite set of ground-point identifiers, stored sorted and duplicate-free."""

    elements: tuple

    def __post_init__(self):
        els = tuple(sorted(set(self.elements), key=_point_key))
        object.__setattr__(self, "elements", els)

    @property
    def empty(self) -> bool:
        return not self.elements

    def __len__(self):
        return len(self.elements)

    def __str__(self):
        return "{" + ",".join(str(e) for e in self.elements) + "}"


@dataclass(frozen=True)
class Rectangle:
    left: Any
    right: Any

    @property
    def empty(self) -> bool:
        return self.left.empty or self.right.empty

    def __str__(self):
        return f"{self.left} x {self.right}"


class MeasureSpace:
    """Interface shared by the concrete semirings."""

    name = "abstract"

    def owns(self, cell) -> bool:
        raise NotImplementedError

    def measure(self, cell) -> Fraction:
        raise NotImplementedError

    def contains(self, cell, point) -> bool:
        raise NotImplementedError

    def intersect(self, a, b):
        raise NotImplementedError

    def difference(self, a, b) -> list:
        """``a \\ b`` as a list of pairwise disjoint non-empty cells."""
        raise NotImplementedError

    def canonical_terms(self, raw: Iterable[tuple[Any, Fraction]]) -> tuple:
        """Canonical disjoint ``(cell, coeff)`` terms of ``sum coeff * chi_cell``."""
        raise NotImplementedError

    def combine(self, term_lists: Sequence[tuple], op: Callable) -> tuple:
        """Canonical terms of the pointwise ``op`` of canonical step functions.

        ``op`` receives one value per input and must map all-zeros to zero.
        """
        raise NotImplementedError

    def section_points(self, terms: tuple) -> list:
        """One representative point per atom of the refinement of ``terms``."""
        raise NotImplementedError

    def check(self, cell):
        if not self.owns(cell):
            raise DomainError(f"{cell!r} is not a cell of {self.name}")
        return cell

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# the real line


@dataclass(frozen=True)
class IntervalLine(MeasureSpace):
    name: str = field(default="interval", compare=False)

    def owns(self, cell) -> bool:
        return isinstance(cell, Interval)

    def measure(self, cell) -> Fraction:
        self.check(cell)
        return cell.hi - cell.lo

    def contains(self, cell, point) -> bool:
        return cell.lo <= point < cell.hi

    def intersect(self, a, b):
        lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
        return Interval(lo, hi) if lo < hi else Interval(0, 0)

    def difference(self, a, b) -> list:
        out = []
        if a.empty:
            return out
        if b.empty or b.hi <= a.lo or b.lo >= a.hi:
            return [a]
        if a.lo < b.lo:
            out.append(Interval(a.lo, b.lo))
        if b.hi < a.hi:
            out.append(Interval(b.hi, a.hi))
        return out

    def canonical_terms(self, raw):
        delta: dict[Fraction, Fraction] = {}
        for cell, c in raw:
            self.check(cell)
            if type(c) is not Fraction:
                c = Fraction(c)
            if cell.empty or c == 0:
                continue
            delta[cell.lo] = delta.get(cell.lo, 0) + c
            delta[cell.hi] = delta.get(cell.hi, 0) - c
        pts = sorted(delta)
        atoms = []
        level = Fraction(0)
        for a, b in zip(pts, pts[1:]):
            level += delta[a]
            atoms.append((a, b, level))
        return _merge_intervals(atoms)

    def combine(self, term_lists, op):
        pts = sorted({p for terms in term_lists for cell, _ in terms for p in (cell.lo, cell.hi)})
        if not pts:
            return ()
        starts = [[cell.lo for cell, _ in terms] for terms in term_lists]
        atoms = []
        for a, b in zip(pts, pts[1:]):
            vals = [_interval_value(terms, st, a) for terms, st in zip(term_lists, starts)]
            atoms.append((a, b, Fraction(op(*vals))))
        return _merge_intervals(atoms)

    def section_points(self, terms):
        pts = sorted({p for cell, _ in terms for p in (cell.lo, cell.hi)})
        return pts[:-1]

    def value(self, terms, point) -> Fraction:
        return _interval_value(terms, [cell.lo for cell, _ in terms], point)

    def atoms(self, cells) -> list:
        """``(atom, representative)`` pairs refining ``cells``; gaps included."""
        pts = sorted({p for c in cells if not c.empty for p in (c.lo, c.hi)})
        return [(Interval(a, b), a) for a, b in zip(pts, pts[1:])]


def _interval_value(terms, starts, x) -> Fraction:
    i = bisect.bisect_right(starts, x) - 1
    if i >= 0 and x < terms[i][0].hi:
        return terms[i][1]
    return Fraction(0)


def _merge_intervals(atoms) -> tuple:
    out: list[list] = []
    for a, b, v in atoms:
        if v == 0:
            continue
        if out and out[-1][1] == a and out[-1][2] == v:
            out[-1][1] = b
        else:
            out.append([a, b, v])
    return tuple((Interval(a, b), v) for a, b, v in out)


# ---------------------------------------------------------------------------
# finite subsets of a ground set


@dataclass(frozen=True)
class _FiniteSetSpace(MeasureSpace):
    """Finite subsets of a ground set.

    ``ground`` is an optional membership predicate; ``None`` accepts any
    hashable identifier (an unbounded identifier space with no enumeration
    of the whole ground set).
    """

    ground: Callable[[Hashable], bool] | None = field(default=None, compare=False)
    label: str = "X"

    def owns(self, cell) -> bool:
        if not isinstance(cell, FiniteSet):
            return False
        return self.ground is None or all(self.ground(e) for e in cell.elements)

    def contains(self, cell, point) -> bool:
        return point in cell.elements

    def intersect(self, a, b):
        return FiniteSet(tuple(set(a.elements) & set(b.elements)))

    def difference(self, a, b) -> list:
        d = FiniteSet(tuple(set(a.elements) - set(b.elements)))
        return [d] if not d.empty else []

    def canonical_terms(self, raw):
        vals: dict = {}
        for cell, c in raw:
            self.check(cell)
            c = Fraction(c)
            if c == 0:
                continue
            for e in cell.elements:
                vals[e] = vals.get(e, 0) + c
        return _group_points(vals.items())

    def combine(self, term_lists, op):
        maps = [{e: c for cell, c in terms for e in cell.elements} for terms in term_lists]
        pts = set().union(*maps) if maps else set()
        return _group_points((p, Fraction(op(*(m.get(p, Fraction(0)) for m in maps)))) for p in pts)

    def section_points(self, terms):
        return sorted({e for cell, _ in terms for e in cell.elements}, key=_point_key)

    def value(self, terms, point) -> Fraction:
        for cell, c in terms:
            if point in cell.elements:
                return c
        return Fraction(0)

    def atoms(self, cells) -> list:
        pts = sorted({e for c in cells for e in c.elements}, key=_point_key)
        return [(FiniteSet((e,)), e) for e in pts]


def _group_points(items) -> tuple:
    groups: dict = {}
    for p, v in items:
        if v != 0:
            groups.setdefault(v, []).append(p)
    out = [(FiniteSet(tuple(ps)), v) for v, ps in groups.items()]
    out.sort(key=lambda t: _point_key(t[0].elements[0]))
    return tuple(out)


@dataclass(frozen=True)
class CountingSpace(_FiniteSetSpace):
    """Counting measure: a finite set weighs its number of elements."""

    @property
    def name(self):
        return "counting"

    def measure(self, cell) -> Fraction:
        self.check(cell)
        return Fraction(len(cell.elements))


@dataclass(frozen=True)
class ZeroSpace(_FiniteSetSpace):
    """The zero measure on finite subsets."""

    @property
    def name(self):
        return "zero"

    def measure(self, cell) -> Fraction:
        self.check(cell)
        return Fraction(0)


# ---------------------------------------------------------------------------
# products


@dataclass(frozen=True)
class ProductSpace(MeasureSpace):
    """``X x Y`` with rectangles as cells.

    Canonical forms are x-major: the x-axis is cut into maximal cells on
    which the section ``y -> f(x, y)`` is constant, and each such cell is
    paired with the canonical terms of that section.
    """

    left: MeasureSpace
    right: MeasureSpace

    @property
    def name(self):
        return f"product({self.left.name},{self.right.name})"

    def owns(self, cell) -> bool:
        return isinstance(cell, Rectangle) and self.left.owns(cell.left) and self.right.owns(cell.right)

    def measure(self, cell) -> Fraction:
        self.check(cell)
        return self.left.measure(cell.left) * self.right.measure(cell.right)

    def contains(self, cell, point) -> bool:
        x, y = point
        return self.left.contains(cell.left, x) and self.right.contains(cell.right, y)

    def intersect(self, a, b):
        return Rectangle(self.left.intersect(a.left, b.left), self.right.intersect(a.right, b.right))

    def difference(self, a, b) -> list:
        # (P x Q) \ (P' x Q') = (P \ P') x Q  u  (P n P') x (Q \ Q')
        if a.empty:
            return []
        out = [Rectangle(p, a.right) for p in self.left.difference(a.left, b.left)]
        common = self.left.intersect(a.left, b.left)
        if not common.empty:
            out += [Rectangle(common, q) for q in self.right.difference(a.right, b.right)]
        return out

    def canonical_terms(self, raw):
        raw = [(self.check(cell), Fraction(c)) for cell, c in raw]
        raw = [(cell, c) for cell, c in raw if c != 0 and not cell.empty]
        if not raw:
            return ()
        pairs = []
        for x in self._x_atoms([cell.left for cell, _ in raw]):
            sec = self.right.canonical_terms(
                (cell.right, c) for cell, c in raw if self.left.contains(cell.left, x)
            )
            pairs.append((x, sec))
        return self._assemble([cell.left for cell, _ in raw], pairs)

    def combine(self, term_lists, op):
        lefts = [cell.left for terms in term_lists for cell, _ in terms]
        if not lefts:
            return ()
        pairs = []
        for x in self._x_atoms(lefts):
            secs = [self.section_terms(terms, x) for terms in term_lists]
            pairs.append((x, self.right.combine(secs, op)))
        return self._assemble(lefts, pairs)

    def section_terms(self, terms, x) -> tuple:
        """Section ``y -> f(x, y)`` of canonical x-major terms."""
        return tuple((cell.right, c) for cell, c in terms if self.left.contains(cell.left, x))

    def section_points(self, terms):
        xs = self._x_atoms([cell.left for cell, _ in terms])
        ys = self.right.section_points(tuple((cell.right, c) for cell, c in terms))
        return [(x, y) for x in xs for y in ys]

    def value(self, terms, point) -> Fraction:
        for cell, c in terms:
            if self.contains(cell, point):
                return c
        return Fraction(0)

    def x_blocks(self, terms) -> list[tuple[Any, tuple]]:
        """Group canonical terms into ``(x_cell, section_terms)`` blocks."""
        blocks: list[tuple[Any, list]] = []
        for cell, c in terms:
            if blocks and blocks[-1][0] == cell.left:
                blocks[-1][1].append((cell.right, c))
            else:
                blocks.append((cell.left, [(cell.right, c)]))
        return [(x, tuple(sec)) for x, sec in blocks]

    # -- helpers --------------------------------------------------------

    def _x_atoms(self, lefts) -> list:
        return [rep for _, rep in self.left.atoms(lefts)]

    def _assemble(self, lefts, pairs) -> tuple:
        # Atoms carrying equal sections are merged by the left space's own
        # rule: each distinct section gets an integer code used as a value.
        sec_of = dict(pairs)
        codes: dict[tuple, int] = {}
        coded = []
        for atom, point in self.left.atoms(lefts):
            sec = sec_of.get(point, ())
            if sec:
                coded.append((atom, Fraction(codes.setdefault(sec, len(codes) + 1))))
        inv = {Fraction(v): k for k, v in codes.items()}
        return tuple(
            (Rectangle(xcell, ycell), c)
            for xcell, code in self.left.canonical_terms(coded)
            for ycell, c in inv[code]
        )


# ---------------------------------------------------------------------------
# operations


def cell_measure(cell, space: MeasureSpace) -> Fraction:
    return space.measure(cell)


@dataclass
class SemiringReport:
    passed: bool
    checked_pairs: int
    failures: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def semiring_check(cells: Sequence, space: MeasureSpace) -> SemiringReport:
    """Check the semiring axioms and finite additivity on a finite family.

    For every ordered pair ``(P, Q)``: ``P n Q`` must be a cell, and ``P \\ Q``
    must split into pairwise disjoint cells, disjoint from ``Q``, whose
    measures add up with ``mu(P n Q)`` to ``mu(P)``.
    """
    failures = []
    n = 0
    for p in cells:
        space.check(p)
        for q in cells:
            n += 1
            inter = space.intersect(p, q)
            if not space.owns(inter):
                failures.append((p, q, "intersection is not a cell"))
                continue
            diff = space.difference(p, q)
            if not all(space.owns(d) for d in diff):
                failures.append((p, q, "difference piece is not a cell"))
                continue
            pieces = diff + [inter]
            disjoint = all(
                space.intersect(a, b).empty
                for i, a in enumerate(pieces)
                for b in pieces[i + 1:]
            )
            if not disjoint or any(not space.intersect(d, q).empty for d in diff):
                failures.append((p, q, "difference pieces overlap"))
                continue
            if sum((space.measure(d) for d in pieces), Fraction(0)) != space.measure(p):
                failures.append((p, q, "measure is not additive on the split"))
    return SemiringReport(not failures, n, failures)


class NullCover:
    """A summable stream of cell batches.

    ``batches(k)`` returns a finite tuple of cells.  The cover is meant to
    hit every point of the covered set infinitely often with a finite
    ``total`` measure, so the tails ``k >= K`` cover the set with measure
    ``total - partial_total(K - 1)`` tending to zero: this certifies a null
    set.  ``total`` is a caller declaration, checked against every partial
    sum computed.
    """

    def __init__(self, space: MeasureSpace, batches: Callable[[int], Sequence], total, name: str = ""):
        self.space = space
        self._gen = batches
        self.total = Fraction(total)
        self.name = name
        self._lock = threading.Lock()
        self._batches: list[tuple] = []
        self._partials: list[Fraction] = []

    @classmethod
    def empty(cls, space) -> NullCover:
        return cls(space, lambda k: (), 0, name="empty")

    @classmethod
    def repeating(cls, space, cells: Sequence, name: str = "") -> NullCover:
        """Cells of measure zero, each repeated forever (total 0)."""
        cells = tuple(cells)
        if any(space.measure(c) != 0 for c in cells):
            raise DomainError("repeating cover needs measure-zero cells")
        return cls(space, lambda k: cells, 0, name=name)

    def batch(self, k: int) -> tuple:
        self._extend(k)
        return self._batches[k]

    def partial_total(self, n: int) -> Fraction:
        """Total measure of batches ``0..n``; ``n = -1`` gives 0."""
        if n < 0:
            return Fraction(0)
        self._extend(n)
        return self._partials[n]

    def tail(self, k: int) -> Fraction:
        """Measure bound of batches ``k, k+1, ...``."""
        return self.total - self.partial_total(k - 1)

    def certify(self, eps) -> int:
        """Smallest ``K`` whose tail bound is below ``eps``."""
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        k = 0
        while self.tail(k) >= eps:
            k += 1
            if k > 1_000_000:
                raise RuntimeError("tail did not drop below eps; is the declared total right?")
        return k

    def covers(self, point, start: int, search: int = 4096) -> int | None:
        """Index ``>= start`` of a batch containing ``point``, if one is found."""
        for k in range(start, start + search):
            if any(self.space.contains(c, point) for c in self.batch(k)):
                return k
        return None

    def _extend(self, n: int):
        with self._lock:
            while len(self._batches) <= n:
                k = len(self._batches)
                cells = tuple(self.space.check(c) for c in self._gen(k))
                prev = self._partials[-1] if self._partials else Fraction(0)
                tot = prev + sum((self.space.measure(c) for c in cells), Fraction(0))
                if tot > self.total:
                    raise ValueError(
                        f"cover {self.name or ''} exceeds its declared total {self.total} at batch {k}"
                    )
                self._batches.append(cells)
                self._partials.append(tot)


def null_cover_bound(cover: NullCover, n: int) -> Fraction:
    if n < 0:
        raise ValueError("n must be >= 0")
    return cover.partial_total(n)
