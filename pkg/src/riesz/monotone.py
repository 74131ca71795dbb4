"""Functions reached as a.e. non-decreasing limits of step functions.

An :class:`R1Function` wraps a lazily evaluated stream ``k -> phi_k`` of step
functions (``k = 0, 1, ...``).  Monotonicity ``phi_{k+1} >= phi_k`` a.e. is
checked exactly, and incrementally, whenever a term is requested.

The integral is the limit of the partial integrals.  It is only reported as
an exact value when it is known: the stream is constant from some index
on (by construction or by an observed window), or the caller declared the
limit.  Declarations are validated against every partial integral computed.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .numeric import INF, ExtendedRational, ext, ext_add, ext_mul
from .spaces import DomainError, MeasureSpace
from .step import MonotonicityError, StepFunction

__all__ = [
    "R1Function",
    "IntegralEstimate",
    "Evidence",
    "r1_from_stream",
    "integral_r1",
    "compare_r1",
    "add",
    "scale_nonneg",
    "minimum",
    "maximum",
    "sup_of_r1_stream",
    "diagonal_squeeze",
]

STABILIZED = "stabilized"
UNSTABILIZED = "unstabilized"
INFINITE = "certified-infinite"


class R1Function:
    """A verified monotone stream of step functions.

    ``limit`` is a declared value of the integral (may be ``inf``);
    ``stable_from`` says the stream is constant from that index on;
    ``upper_bound`` is a known bound on every partial integral, which makes
    the integral finite even when its exact value is unknown.
    """

    def __init__(
        self,
        gen: Callable[[int], StepFunction],
        space: MeasureSpace,
        *,
        limit=None,
        stable_from: int | None = None,
        upper_bound=None,
        name: str = "",
    ):
        self.space = space
        self.name = name
        self._gen = gen
        self._lock = threading.RLock()
        self._terms: list[StepFunction] = []  # verified prefix
        self._peeked: dict[int, StepFunction] = {}
        self._stable_from = stable_from
        self.upper_bound = None if upper_bound is None else Fraction(upper_bound)
        self.limit: ExtendedRational | None = None
        if limit is not None:
            self.declare(limit)

    # construction ------------------------------------------------------

    @classmethod
    def constant(cls, phi: StepFunction, name: str = "") -> R1Function:
        return cls(lambda k: phi, phi.space, stable_from=0, name=name or "const")

    @classmethod
    def zero(cls, space) -> R1Function:
        return cls.constant(StepFunction.zero(space), name="0")

    def declare(self, limit) -> R1Function:
        """Attach a declared integral value; rejected if below a computed partial."""
        limit = ext(limit)
        with self._lock:
            for k, phi in enumerate(self._terms):
                if phi.integral() > limit:
                    raise ValueError(f"declared limit {limit} is below partial {k}: {phi.integral()}")
            self.limit = limit
        return self

    # stream access ----------------------------------------------------

    @property
    def verified_prefix(self) -> int:
        """Number of terms checked so far."""
        return len(self._terms)

    def term(self, k: int) -> StepFunction:
        """Term ``k``, after verifying monotonicity of terms ``0..k``."""
        if k < 0:
            raise IndexError("stream indices start at 0")
        if k < len(self._terms):
            return self._terms[k]
        s = self._stable_from
        if s is not None and k > s:
            # terms past the stabilization index are all equal to term s
            return self.term(s)
        with self._lock:
            while len(self._terms) <= k:
                i = len(self._terms)
                phi = self._fetch(i)
                if i:
                    w = (phi - self._terms[-1]).negative_witness()
                    if w is not None:
                        raise MonotonicityError(
                            f"{self.name or 'stream'}: term {i} drops below term {i - 1} on {w}", i, w
                        )
                if self.limit is not None and self.limit.is_finite and phi.integral() > self.limit:
                    raise ValueError(f"partial {i} = {phi.integral()} exceeds declared limit {self.limit}")
                if self.upper_bound is not None and phi.integral() > self.upper_bound:
                    raise ValueError(f"partial {i} exceeds the upper bound {self.upper_bound}")
                self._terms.append(phi)
            return self._terms[k]

    def peek(self, k: int) -> StepFunction:
        """Term ``k`` without extending the verified prefix."""
        if k < len(self._terms):
            return self._terms[k]
        with self._lock:
            if k not in self._peeked:
                self._peeked[k] = self._fetch(k)
            return self._peeked[k]

    def _fetch(self, k: int) -> StepFunction:
        if k in self._peeked:
            return self._peeked.pop(k)
        s = self._stable_from
        if s is not None and k > s and s < len(self._terms):
            return self._terms[s]
        phi = self._gen(k)
        if phi.space != self.space:
            raise DomainError(f"stream term {k} lives on {phi.space}, expected {self.space}")
        return phi

    def partial(self, k: int) -> Fraction:
        return self.term(k).integral()

    def partials(self, n: int) -> list[Fraction]:
        return [self.partial(k) for k in range(n + 1)]

    # integral -----------------------------------------------------------

    @property
    def stable_from(self) -> int | None:
        return self._stable_from

    def value(self) -> ExtendedRational | None:
        """The exact integral when known, else None."""
        if self._stable_from is not None:
            return ExtendedRational(self.partial(self._stable_from))
        return self.limit

    def is_finite(self) -> bool:
        """True when the integral is certainly finite."""
        v = self.value()
        if v is not None:
            return v.is_finite
        return self.upper_bound is not None

    def is_infinite(self) -> bool:
        v = self.value()
        return v is not None and v.is_infinite

    def mark_stable(self, k: int):
        with self._lock:
            if self._stable_from is None or k < self._stable_from:
                self._stable_from = k

    def __repr__(self):
        return f"R1Function({self.name or '?'}, space={self.space.name})"


@dataclass
class IntegralEstimate:
    lower_bound: Fraction
    status: str
    index: int | None = None
    value: ExtendedRational | None = None
    declared: ExtendedRational | None = None
    partials: list[Fraction] = field(default_factory=list, repr=False)

    @property
    def exact(self) -> ExtendedRational | None:
        if self.status == STABILIZED:
            return self.value
        return self.declared


def r1_from_stream(gen: Callable[[int], StepFunction], space: MeasureSpace, **kw) -> R1Function:
    return R1Function(gen, space, **kw)


def integral_r1(
    f: R1Function,
    budget: int = 100,
    stabilization_window: int = 10,
    infinity_threshold=10**6,
    probe_rounds: int = 20,
) -> IntegralEstimate:
    """Partial-integral ladder up to ``budget`` and what can be said about its limit.

    Past the budget, up to ``probe_rounds`` doubling probes look for a
    partial above ``infinity_threshold`` (set 0 to skip probing).
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    threshold = Fraction(infinity_threshold)
    partials = f.partials(budget)
    lower = partials[-1]
    est = IntegralEstimate(lower, UNSTABILIZED, declared=f.limit, partials=partials)
    if f.stable_from is not None and f.stable_from <= budget:
        est.status, est.index, est.value = STABILIZED, f.stable_from, ExtendedRational(partials[f.stable_from])
        return est
    # earliest n with term(n) == ... == term(budget) and a window at least that long
    n = budget
    last = f.term(budget)
    while n > 0 and f.term(n - 1).ae_equal(last):
        n -= 1
    if budget - n >= stabilization_window:
        f.mark_stable(n)
        est.status, est.index, est.value = STABILIZED, n, ExtendedRational(partials[n])
    elif lower > threshold:
        est.status, est.index, est.value = INFINITE, budget, INF
    else:
        k = _probe_threshold(f, budget, last, threshold, probe_rounds)
        if k is not None:
            est.status, est.index, est.value = INFINITE, k, INF
    return est


def _probe_threshold(f: R1Function, start: int, phi: StepFunction, threshold: Fraction, rounds: int):
    """Index ``k`` past the verified prefix whose partial exceeds ``threshold``.

    Probes terms ``2 start, 4 start, ...`` and checks the probed subsequence
    is monotone, exactly.  Terms between probes are not verified, so this is
    a lower-bound certificate only.
    """
    k = max(start, 1)
    for _ in range(rounds):
        k *= 2
        nxt = f.peek(k)
        w = (nxt - phi).negative_witness()
        if w is not None:
            raise MonotonicityError(f"{f.name or 'stream'}: probed term {k} drops below an earlier term on {w}", k, w)
        if nxt.integral() > threshold:
            return k
        phi = nxt
    return None


@dataclass
class Evidence:
    """Residual table ``r[m][n] = integral((phi_m - psi_n)^+)``."""

    table: list[list[Fraction]]

    @property
    def rows_nonincreasing(self) -> bool:
        return all(all(a >= b for a, b in zip(row, row[1:])) for row in self.table)

    @property
    def final_residuals(self) -> list[Fraction]:
        return [row[-1] for row in self.table]


def compare_r1(f: R1Function, g: R1Function, horizon: int) -> Evidence:
    """Evidence for ``lim int phi_m <= lim int psi_n`` when ``f <= g``."""
    table = []
    for m in range(horizon + 1):
        phi = f.term(m)
        table.append([(phi - g.term(n)).positive_part().integral() for n in range(horizon + 1)])
    return Evidence(table)


# ---------------------------------------------------------------------------
# lattice operations: termwise on the defining streams


def _joint_stable(f: R1Function, g: R1Function):
    if f.stable_from is None or g.stable_from is None:
        return None
    return max(f.stable_from, g.stable_from)


def add(f: R1Function, g: R1Function) -> R1Function:
    lim = None
    if f.value() is not None and g.value() is not None:
        lim = ext_add(f.value(), g.value())
    ub = None
    if f.is_finite() and g.is_finite():
        ub = _bound(f) + _bound(g)
    return R1Function(
        lambda k: f.term(k) + g.term(k),
        f.space,
        limit=lim,
        stable_from=_joint_stable(f, g),
        upper_bound=ub,
        name=f"({f.name}+{g.name})",
    )


def _bound(f: R1Function) -> Fraction:
    v = f.value()
    if v is not None and v.is_finite:
        return v.finite
    return f.upper_bound


def scale_nonneg(c, f: R1Function) -> R1Function:
    c = Fraction(c)
    if c < 0:
        raise DomainError("R1 is a cone: negative multiples live in the signed class")
    lim = None if f.value() is None else ext_mul(c, f.value())
    ub = None if not f.is_finite() else c * _bound(f)
    return R1Function(
        lambda k: c * f.term(k), f.space, limit=lim, stable_from=f.stable_from, upper_bound=ub,
        name=f"{c}*{f.name}",
    )


def minimum(f: R1Function, g: R1Function) -> R1Function:
    bounds = [_bound(h) for h in (f, g) if h.is_finite()]
    ub = min(bounds) if bounds else None
    return R1Function(
        lambda k: f.term(k).minimum(g.term(k)),
        f.space,
        stable_from=_joint_stable(f, g),
        upper_bound=ub,
        name=f"min({f.name},{g.name})",
    )


def maximum(f: R1Function, g: R1Function) -> R1Function:
    # max = f + g - min(f, g) and min(f, g) >= min(phi_0, psi_0)
    ub = None
    if f.is_finite() and g.is_finite():
        ub = _bound(f) + _bound(g) - f.term(0).minimum(g.term(0)).integral()
    return R1Function(
        lambda k: f.term(k).maximum(g.term(k)),
        f.space,
        stable_from=_joint_stable(f, g),
        upper_bound=ub,
        name=f"max({f.name},{g.name})",
    )


def sup_of_r1_stream(
    fs: Callable[[int], R1Function],
    space: MeasureSpace,
    *,
    termwise_check: bool = True,
    limit=None,
    upper_bound=None,
    name: str = "sup",
) -> R1Function:
    """Diagonal ``phi_k = sup_{1<=n<=k+1, i<=k} phi_{n,i}`` of a non-decreasing sequence.

    Because each inner stream is verified monotone, the inner supremum over
    ``i <= k`` is the term ``k`` itself.  With ``termwise_check`` the outer
    monotonicity ``f_{n+1} >= f_n`` is verified on each queried term; that
    is sufficient but not necessary, so callers whose sequences are only
    ordered in the limit switch it off.
    """
    cache: dict[int, R1Function] = {}
    lock = threading.Lock()

    def member(n: int) -> R1Function:
        with lock:
            if n not in cache:
                cache[n] = fs(n)
            return cache[n]

    def diag(k: int) -> StepFunction:
        out = member(1).term(k)
        for n in range(2, k + 2):
            cur = member(n).term(k)
            if termwise_check:
                w = (cur - member(n - 1).term(k)).negative_witness()
                if w is not None:
                    raise MonotonicityError(f"sequence member {n} is below member {n - 1} at term {k} on {w}", n, w)
            out = out.maximum(cur)
        return out

    return R1Function(diag, space, limit=limit, upper_bound=upper_bound, name=name)


def diagonal_squeeze(fs: Callable[[int], R1Function], diag: R1Function, k: int):
    """``(max_n partial_n(k), diag partial(k), declared)`` with the ordering asserted."""
    lower = max(fs(n).partial(k) for n in range(1, k + 2))
    mid = diag.partial(k)
    if lower > mid:
        raise AssertionError(f"diagonal partial {mid} below member partial {lower} at k={k}")
    if diag.limit is not None and mid > diag.limit:
        raise AssertionError(f"diagonal partial {mid} above declared limit {diag.limit}")
    return lower, mid, diag.limit
