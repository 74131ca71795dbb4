"""Command-line interface: ``riesz <command> ...``.

Exit status is 0 on success, 1 when a claim fails or a construction is
rejected, 2 on usage and parse errors.  ``RIESZ_BUDGET`` overrides the
default stream horizons.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import gallery, suite
from .fileformat import Document, ParseError, load, parse_space
from .fubini import counting_counterexample, fubini_r1, fubini_r2, fubini_step
from .measurable import MeasurableSet, difference, intersection, measure_of, union
from .monotone import R1Function, integral_r1
from .signed import (
    BeppoLeviRejected,
    DefinednessError,
    R2Function,
    UnresolvedIntegral,
    dominated_check,
    fatou_check,
    generalized_beppo_levi,
)
from .spaces import DomainError, ProductSpace
from .step import MonotonicityError


class Failure(Exception):
    """A mathematical rejection or failed claim (exit status 1)."""


def _budget(default: int) -> int:
    env = os.environ.get("RIESZ_BUDGET")
    if not env:
        return default
    try:
        value = int(env)
    except ValueError:
        raise ParseError(f"RIESZ_BUDGET must be a positive integer, got {env!r}") from None
    if value < 1:
        raise ParseError(f"RIESZ_BUDGET must be a positive integer, got {env!r}")
    return value


def table(headers, rows) -> str:
    cells = [[str(h) for h in headers]] + [["-" if v is None else str(v) for v in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    fmt = lambda r: "  ".join(v.rjust(w) for v, w in zip(r, widths)).rstrip()
    return "\n".join([fmt(cells[0]), fmt(["-" * w for w in widths])] + [fmt(r) for r in cells[1:]])


def _sample(n: int, horizon: int, rows: int = 12) -> bool:
    """Rows shown in long ladders: the first few, powers of two and the last."""
    return n <= 4 or n == horizon or (n & (n - 1)) == 0 or horizon <= rows


# ---------------------------------------------------------------------------
# streams from documents


def _r1(doc: Document, key: str, limit_key: str, **fixed) -> R1Function:
    tpl = doc.templates.get(key)
    var = "k" if fixed else "n"
    stable = 0 if tpl is not None and tpl.is_constant(var) and key not in doc.tables else None
    limit = doc.value(limit_key, **fixed)
    return R1Function(doc.stream(key, **fixed), doc.space, limit=limit, stable_from=stable, name=key)


def _member(doc: Document):
    """``n -> f_n`` from ``seq`` (step functions) or ``seq-pos`` / ``seq-neg`` (streams in k)."""
    if "seq" in doc.templates or "seq" in doc.tables:
        seq = doc.stream("seq")
        return lambda n: R2Function.from_step(seq(n))
    if "seq-pos" not in doc.templates and "seq-neg" not in doc.templates:
        raise ParseError("expected a 'seq' line, or 'seq-pos' / 'seq-neg' lines")
    zero = R1Function.zero(doc.space)

    def member(n):
        pos = _r1(doc, "seq-pos", "seq-pos-limit", n=n) if "seq-pos" in doc.templates else zero
        neg = _r1(doc, "seq-neg", "seq-neg-limit", n=n) if "seq-neg" in doc.templates else zero
        return R2Function(pos, neg, name=f"f_{n}")

    return member


def _steps(doc: Document, seq_key: str = "seq"):
    seq = doc.stream(seq_key)
    return lambda n: seq(n)


# ---------------------------------------------------------------------------
# commands


def cmd_integrate(args) -> int:
    doc = load(args.file)
    if not doc.steps:
        raise ParseError("no 'step' lines")
    for phi in doc.steps:
        if args.show:
            print(f"{phi}  ->  {phi.integral()}")
        else:
            print(phi.integral())
    return 0


def _print_estimate(est, every: bool = False):
    rows = [(k, p) for k, p in enumerate(est.partials) if every or _sample(k, len(est.partials) - 1)]
    print(table(["k", "partial integral"], rows))
    print(f"status: {est.status}")
    if est.exact is not None:
        print(f"integral: {est.exact}")
    else:
        print(f"integral: >= {est.lower_bound}")


def cmd_r1(args) -> int:
    doc = load(args.file)
    f = _r1(doc, "stream", "limit")
    est = integral_r1(f, args.budget or _budget(100))
    _print_estimate(est, args.all)
    return 0


def cmd_r2(args) -> int:
    doc = load(args.file)
    zero = R1Function.zero(doc.space)
    pos = _r1(doc, "pos", "pos-limit") if "pos" in doc.templates else zero
    neg = _r1(doc, "neg", "neg-limit") if "neg" in doc.templates else zero
    f = R2Function(pos, neg, declared=doc.value("limit"), name="f")
    budget = args.budget or _budget(100)
    print(f"finite side: {f.definedness.finite_side}")
    for side, ev in sorted(f.definedness.evidence.items()):
        print(f"  {side}: {ev}")
    rows = []
    for side, g in (("pos", pos), ("neg", neg)):
        est = integral_r1(g, budget)
        rows.append((side, est.status, est.lower_bound, est.exact))
    print(table(["side", "status", f"partial at {budget}", "integral"], rows))
    try:
        print(f"integral: {f.integral(budget)}")
    except UnresolvedIntegral:
        print(f"integral: not determined; ladder at {budget}: {f.ladder(budget)}")
    return 0


def cmd_beppo_levi(args) -> int:
    doc = load(args.file)
    horizon = args.horizon or _budget(100)
    declared = doc.value("limit")
    try:
        _, rep = generalized_beppo_levi(_member(doc), horizon, declared=declared)
    except BeppoLeviRejected as e:
        rows = [(n, v) for n, v in enumerate(e.report.rejected_prefix, start=1) if _sample(n, horizon)]
        print(table(["n", "integral f_n"], rows))
        raise Failure(f"rejected: {e}") from None
    rows = []
    for j, v in enumerate(rep.ladder):
        n = rep.start + j
        h = rep.h_integrals[j] if j < len(rep.h_integrals) else None
        if _sample(n, horizon):
            rows.append((n, v, h))
    print(table(["n", "integral f_n", "integral h_n"], rows))
    print(f"first member with integral > -inf: {rep.start}")
    print(f"pairs verified pointwise: {rep.pairs_verified}; by integrals only: {rep.pairs_declared}")
    print(f"integral h_n <= 1: {'yes' if rep.h_bound_ok else 'NO'}")
    if declared is not None:
        print(f"declared limit: {declared}; gap at n={horizon}: {rep.final_gap}")
    if not (rep.h_bound_ok and rep.ladder_nondecreasing):
        raise Failure("harness invariants violated")
    return 0


def _fatou_rows(rep, horizon):
    return [
        (n, rep.integrals[n - 1], rep.lower[n - 1], rep.tail_inf[n - 1])
        for n in range(1, horizon + 1)
        if _sample(n, horizon)
    ]


def cmd_fatou(args) -> int:
    doc = load(args.file)
    horizon = args.horizon or _budget(40)
    rep = fatou_check(_steps(doc), horizon)
    print(table(["n", "integral f_n", f"integral inf_(n..{horizon}) f_k", "inf integral f_k"], _fatou_rows(rep, horizon)))
    if not rep.inequalities_hold:
        raise Failure(f"inequalities fail at {rep.violations}")
    print("inf of f_k integrates to at most the inf of the integrals at every index")
    return 0


def cmd_dominated(args) -> int:
    doc = load(args.file)
    horizon = args.horizon or _budget(40)
    g = doc.stream("dominator")(0) if "dominator" in doc.templates else None
    if g is None:
        raise ParseError("expected a 'dominator' line")
    rep = dominated_check(_steps(doc), g, horizon, declared=doc.value("limit"))
    rows = [(n, rep.integrals[n - 1], rep.tail_inf[n - 1], rep.tail_sup[n - 1])
            for n in range(1, horizon + 1) if _sample(n, horizon)]
    print(table(["n", "integral f_n", "inf tail", "sup tail"], rows))
    if not rep.inequalities_hold:
        raise Failure(f"inequalities fail at {rep.violations}")
    print(f"sup - inf of the integrals over n..{horizon}, from n=1: {rep.tail_sup[0] - rep.tail_inf[0]}")
    if rep.declared is not None:
        print(f"declared limit: {rep.declared}; gap at n={horizon}: {rep.final_gap}")
    return 0


def _sets(doc: Document) -> list[MeasurableSet]:
    out = [MeasurableSet.from_cells(doc.space, cells, name=f"A{i}") for i, cells in enumerate(doc.sets, start=1)]
    out += [MeasurableSet.from_step(phi, name=f"A{len(out) + i}") for i, phi in enumerate(doc.steps, start=1)]
    if not out:
        raise ParseError("no 'set' lines")
    return out


def cmd_measure(args) -> int:
    doc = load(args.file)
    rows = [(A.name, A.step, measure_of(A)) for A in _sets(doc)]
    print(table(["set", "canonical cells", "measure"], rows))
    return 0


def cmd_sigma_ops(args) -> int:
    doc = load(args.file)
    sets = _sets(doc)
    get = lambda n: sets[n - 1]
    count = len(sets)
    rows = []
    if args.op in ("union", "all"):
        rows.append(("union", union(get, count)))
    if args.op in ("intersection", "all"):
        rows.append(("intersection", intersection(get, count)))
    if args.op in ("difference", "all"):
        if count < 2:
            raise ParseError("difference needs two sets")
        rows.append(("A1 \\ A2", difference(sets[0], sets[1])))
    print(table(["operation", "canonical cells", "measure"], [(op, S.step, measure_of(S)) for op, S in rows]))
    return 0


def cmd_fubini(args) -> int:
    space = None
    if args.spaces:
        parts = args.spaces.split(",")
        if len(parts) != 2:
            raise ParseError("--spaces takes two factors, e.g. interval,counting")
        space = ProductSpace(parse_space(parts[0]), parse_space(parts[1]))
    doc = load(args.file, space)
    if not isinstance(doc.space, ProductSpace):
        raise ParseError("fubini needs a product space: 'space product(A,B)' or --spaces A,B")
    reports = [fubini_step(phi) for phi in doc.steps]
    horizon = args.horizon or _budget(50)
    if "stream" in doc.templates:
        reports.append(fubini_r1(_r1(doc, "stream", "limit"), horizon))
    if "pos" in doc.templates or "neg" in doc.templates:
        zero = R1Function.zero(doc.space)
        pos = _r1(doc, "pos", "pos-limit") if "pos" in doc.templates else zero
        neg = _r1(doc, "neg", "neg-limit") if "neg" in doc.templates else zero
        reports.append(fubini_r2(R2Function(pos, neg), horizon))
    if not reports:
        raise ParseError("no 'step', 'stream' or 'pos'/'neg' lines")
    rows = [(i, r.double, r.iterated_xy, r.iterated_yx, r.verdict) for i, r in enumerate(reports, start=1)]
    print(table(["#", "double", "dx dy", "dy dx", "verdict"], rows))
    for r in reports:
        if r.note:
            print(f"note: {r.note}")
    return 0


def cmd_fubini_counterexample(args) -> int:
    c = counting_counterexample(args.window)
    rows = [(n, c.positive_part[n], c.negative_part[n], c.absolute[n]) for n in range(args.window + 1)]
    print(table(["N", "positive part on [-N,N]^2", "negative part", "integral |f|"], rows))
    print(f"iterated dx dy: {c.iterated_xy}")
    print(f"iterated dy dx: {c.iterated_yx}")
    grows = args.window == 0 or c.positive_part[-1] > c.positive_part[0]
    print("both parts grow with the window: the double integral is inf - inf" if grows else "parts did not grow")
    if c.iterated_xy != 0 or c.iterated_yx != 0 or not grows:
        raise Failure("counterexample not reproduced")
    return 0


_GALLERY_PARAMS = ("depth", "horizon", "alpha", "window", "grid")


def cmd_gallery(args) -> int:
    if args.list or not args.entry:
        for key, (_, blurb) in gallery.GALLERY.items():
            print(f"{key:<16} {blurb}")
        return 0
    if args.entry not in gallery.GALLERY:
        raise ParseError(f"unknown gallery entry {args.entry!r}; known: {', '.join(gallery.GALLERY)}")
    params = {k: getattr(args, k) for k in _GALLERY_PARAMS if getattr(args, k) is not None}
    if "window" in params and args.entry == "diagonal":
        params["window"] = tuple(f"x{i}" for i in range(int(params["window"])))
    try:
        rep = gallery.run_gallery(args.entry, **params)
    except TypeError as e:
        raise ParseError(f"{args.entry}: {e}") from None
    print(rep.render())
    if not rep.passed:
        raise Failure("a gallery claim failed")
    return 0


def cmd_selftest(args) -> int:
    names = {key for key, _ in suite.CHECKS}
    unknown = set(args.only or ()) - names
    if unknown:
        raise ParseError(f"unknown checks {sorted(unknown)}; known: {', '.join(sorted(names))}")
    ok = True
    for key, fn in suite.CHECKS:
        if args.only and key not in args.only:
            continue
        r = fn()
        print(r.line(), flush=True)
        ok &= r.passed
    if not ok:
        raise Failure("selftest failed")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="riesz", description="Exact Lebesgue integration from step functions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("integrate", help="integrals of the step lines of a file")
    s.add_argument("file")
    s.add_argument("--show", action="store_true", help="print the canonical form too")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("r1", help="integral ladder of a monotone stream ('stream' line)")
    s.add_argument("file")
    s.add_argument("--budget", type=int)
    s.add_argument("--all", action="store_true", help="print every partial")
    s.set_defaults(func=cmd_r1)

    s = sub.add_parser("r2", help="signed functions")
    r2sub = s.add_subparsers(dest="action", required=True)
    m = r2sub.add_parser("make", help="build pos - neg from 'pos' / 'neg' lines and check definedness")
    m.add_argument("file")
    m.add_argument("--budget", type=int)
    m.set_defaults(func=cmd_r2)

    s = sub.add_parser("beppo-levi", help="monotone convergence for a non-decreasing sequence")
    s.add_argument("file")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_beppo_levi)

    s = sub.add_parser("fatou", help="Fatou ladder for a nonnegative sequence ('seq' line)")
    s.add_argument("file")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_fatou)

    s = sub.add_parser("dominated", help="dominated convergence ('seq' and 'dominator' lines)")
    s.add_argument("file")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_dominated)

    s = sub.add_parser("measure", help="measures of the sets of a file")
    s.add_argument("file")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("sigma-ops", help="union, intersection and difference of the sets of a file")
    s.add_argument("file")
    s.add_argument("--op", choices=("union", "intersection", "difference", "all"), default="all")
    s.set_defaults(func=cmd_sigma_ops)

    s = sub.add_parser("fubini", help="double and iterated integrals on a product space")
    s.add_argument("file")
    s.add_argument("--spaces", help="factor spaces, e.g. interval,counting")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_fubini)

    s = sub.add_parser("fubini-counterexample", help="iterated integrals 0, double integral undefined")
    s.add_argument("--window", type=int, default=5)
    s.set_defaults(func=cmd_fubini_counterexample)

    s = sub.add_parser("gallery", help="run a counterexample from the gallery")
    s.add_argument("entry", nargs="?")
    s.add_argument("--list", action="store_true")
    s.add_argument("--depth", type=int)
    s.add_argument("--horizon", type=int)
    s.add_argument("--alpha")
    s.add_argument("--window", type=int)
    s.add_argument("--grid", type=int)
    s.set_defaults(func=cmd_gallery)

    s = sub.add_parser("selftest", help="run the invariant suite")
    s.add_argument("--only", nargs="+", metavar="CHECK")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.func(args)
    except (ParseError, OSError) as e:
        print(f"riesz: error: {e}", file=sys.stderr)
        return 2
    except Failure as e:
        print(f"riesz: {e}", file=sys.stderr)
        return 1
    except (BeppoLeviRejected, DefinednessError, MonotonicityError, DomainError, UnresolvedIntegral, ValueError) as e:
        print(f"riesz: rejected: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
