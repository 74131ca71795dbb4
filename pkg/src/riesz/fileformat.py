"""Line-oriented text format for spaces, step functions, streams and sets.

One directive per line, ``#`` starts a comment::

    space interval                       # or counting, zero, product(interval,counting)
    step { [0, 2): 2, [1, 3): -1 }       # a step function
    stream step { [0, n/(n+1)): 1 }      # monotone stream, n = 0, 1, ...
    limit 1                              # declared integral of the stream
    seq step { [0, 1/n): 1 }             # sequence f_n, n = 1, 2, ...
    set { [0, 1), [2, 3) }               # finite union of cells

Cells are ``[p/q, r/s)`` (closed and open variants are normalized),
``{a, b}`` and ``cellA x cellB``.  Coefficients and endpoints of templates
are arithmetic expressions in ``n`` (and ``k`` for two-index templates)
with rational constants and ``+ - * / **``.  ``chi(a, b)`` and
``chi_prefix(a, b)`` are shorthands for ``step { [a, b): 1 }``.
A ``table KEY INDEX step {...}`` line overrides one term of the stream
``KEY``; the template then acts as the tail.
"""
from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .numeric import ExtendedRational, parse_extended
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
    "ParseError",
    "Document",
    "StepTemplate",
    "parse_space",
    "parse_document",
    "load",
    "evaluate",
    "format_step",
]


class ParseError(ValueError):
    def __init__(self, message, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


# ---------------------------------------------------------------------------
# expressions

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def evaluate(expr: str, env: dict | None = None) -> Fraction:
    """Exact value of an arithmetic expression over the rationals."""
    env = env or {}
    try:
        tree = ast.parse(expr.strip(), mode="eval")
    except SyntaxError as e:
        raise ParseError(f"bad expression {expr!r}") from e

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return Fraction(node.value)
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ParseError(f"unknown name {node.id!r} in {expr!r}")
            return Fraction(env[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow):
                if b.denominator != 1 or abs(b) > 4096:
                    raise ParseError(f"exponents must be small integers in {expr!r}")
                b = int(b)
            if isinstance(node.op, ast.Div) and b == 0:
                raise ParseError(f"division by zero in {expr!r}")
            return _BINOPS[type(node.op)](a, b)
        raise ParseError(f"unsupported syntax in {expr!r}")

    return ev(tree)


# ---------------------------------------------------------------------------
# spaces and cells


def parse_space(text: str) -> MeasureSpace:
    t = text.strip().lower().replace(" ", "")
    if t == "interval":
        return IntervalLine()
    if t == "counting":
        return CountingSpace()
    if t == "zero":
        return ZeroSpace()
    m = re.fullmatch(r"product\((.*)\)", t)
    if m:
        inner, depth = m.group(1), 0
        for i, ch in enumerate(inner):
            depth += ch == "("
            depth -= ch == ")"
            if ch == "," and depth == 0:
                return ProductSpace(parse_space(inner[:i]), parse_space(inner[i + 1:]))
    raise ParseError(f"unknown space {text!r}")


def _ident(tok: str):
    tok = tok.strip()
    if re.fullmatch(r"[+-]?\d+", tok):
        return int(tok)
    if not tok:
        raise ParseError("empty identifier")
    return tok


class _Reader:
    def __init__(self, text: str):
        self.s, self.i = text, 0

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self):
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch):
        if self.peek() != ch:
            raise ParseError(f"expected {ch!r} at {self.s[self.i:self.i + 20]!r}")
        self.i += 1

    def until_top(self, stops: str) -> str:
        """Text up to the first of ``stops`` at parenthesis depth 0."""
        start, depth = self.i, 0
        while self.i < len(self.s):
            ch = self.s[self.i]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0 and ch in stops:
                    break
                depth -= 1
            elif depth == 0 and ch in stops:
                break
            self.i += 1
        return self.s[start:self.i]

    def cell(self, space, env) -> Callable:
        """A cell template ``env -> cell``."""
        if isinstance(space, ProductSpace):
            left = self.cell(space.left, env)
            self.ws()
            if not self.s.startswith("x", self.i):
                raise ParseError("product cells are written 'A x B'")
            self.i += 1
            right = self.cell(space.right, env)
            return lambda e: Rectangle(left(e), right(e))
        ch = self.peek()
        if ch == "{":
            self.i += 1
            body = self.until_top("}")
            self.expect("}")
            ids = tuple(_ident(t) for t in body.split(",") if t.strip())
            return lambda e: FiniteSet(ids)
        if ch in "[(":
            opener = ch
            self.i += 1
            lo = self.until_top(",")
            self.expect(",")
            hi = self.until_top(")]")
            closer = self.peek()
            self.i += 1

            def build(e, lo=lo, hi=hi):
                a, b = evaluate(lo, e), evaluate(hi, e)
                if opener == "[" and closer == "]":
                    return Interval.closed(a, b)
                if opener == "(" and closer == ")":
                    return Interval.open(a, b)
                return Interval(a, b)

            return build
        raise ParseError(f"cannot read a cell at {self.s[self.i:self.i + 20]!r}")


@dataclass
class StepTemplate:
    """Terms ``(cell(env), coeff(env))`` evaluated at an index assignment."""

    space: MeasureSpace
    terms: list
    source: str = ""

    def __call__(self, **env) -> StepFunction:
        return StepFunction(self.space, [(cell(env), evaluate(c, env)) for cell, c in self.terms])

    def is_constant(self, var: str | None = None) -> bool:
        """True when the template does not use ``var`` (any index when None)."""
        return not re.search(r"\b[nk]\b" if var is None else rf"\b{var}\b", self.source)


def parse_step(text: str, space: MeasureSpace) -> StepTemplate:
    text = text.strip()
    m = re.fullmatch(r"(chi|chi_prefix)\s*\((.*)\)", text)
    if m:
        r = _Reader(m.group(2))
        lo = r.until_top(",")
        r.expect(",")
        hi = r.s[r.i:]
        return parse_step(f"step {{ [{lo}, {hi}): 1 }}", space)
    if not text.startswith("step"):
        raise ParseError(f"expected 'step {{...}}', got {text[:30]!r}")
    r = _Reader(text[4:])
    r.expect("{")
    terms = []
    while r.peek() != "}":
        if not r.peek():
            raise ParseError("unterminated step body")
        cell = r.cell(space, {})
        r.expect(":")
        coeff = r.until_top(",}")
        terms.append((cell, coeff))
        if r.peek() == ",":
            r.i += 1
    r.i += 1
    if r.peek():
        raise ParseError(f"trailing text after step body: {r.s[r.i:]!r}")
    return StepTemplate(space, terms, text)


def parse_set(text: str, space: MeasureSpace) -> list:
    r = _Reader(text.strip())
    r.expect("{")
    cells = []
    while r.peek() != "}":
        if not r.peek():
            raise ParseError("unterminated set")
        cells.append(r.cell(space, {})({}))
        if r.peek() == ",":
            r.i += 1
    return cells


# ---------------------------------------------------------------------------
# documents


@dataclass
class Document:
    space: MeasureSpace | None = None
    steps: list = field(default_factory=list)
    templates: dict = field(default_factory=dict)  # key -> StepTemplate
    tables: dict = field(default_factory=dict)  # key -> {index: StepFunction}
    values: dict = field(default_factory=dict)  # key -> ExtendedRational
    sets: list = field(default_factory=list)

    def stream(self, key: str, **fixed) -> Callable[[int], StepFunction]:
        """``k -> term`` for template ``key``; table entries override the template."""
        if key not in self.templates and key not in self.tables:
            raise ParseError(f"no '{key}' line")
        tpl, table = self.templates.get(key), self.tables.get(key, {})

        def gen(k):
            if k in table and not fixed:
                return table[k]
            if tpl is None:
                raise ParseError(f"'{key}' has no term {k} and no template for the tail")
            return tpl(**fixed, **{"k" if fixed else "n": k})

        return gen

    def value(self, key: str, default=None, **env):
        if key not in self.values:
            return default
        v = self.values[key]
        if isinstance(v, str):
            return ExtendedRational(evaluate(v, env))
        return v


_VALUE_KEYS = re.compile(r"^[a-z][a-z0-9-]*(limit|total|eps|horizon|threshold)$")


def parse_document(text: str, space: MeasureSpace | None = None) -> Document:
    doc = Document(space=space)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if key == "space":
                if space is None:
                    doc.space = parse_space(rest)
                continue
            if doc.space is None:
                doc.space = IntervalLine()
            if key == "step":
                tpl = parse_step(line, doc.space)
                doc.steps.append(tpl())
            elif key == "set":
                doc.sets.append(parse_set(rest, doc.space))
            elif key == "table":
                name, idx, body = rest.split(None, 2)
                doc.tables.setdefault(name, {})[int(idx)] = parse_step(body, doc.space)()
            elif key in ("limit",) or _VALUE_KEYS.match(key):
                try:
                    doc.values[key] = parse_extended(rest)
                except ValueError:
                    evaluate(rest, {"n": 1, "k": 0})
                    doc.values[key] = rest
            elif re.fullmatch(r"[a-z][a-z0-9-]*", key):
                doc.templates[key] = parse_step(rest, doc.space)
            else:
                raise ParseError(f"unknown directive {key!r}")
        except ParseError as e:
            raise ParseError(str(e), lineno) from None
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError(str(e), lineno) from None
    if doc.space is None:
        doc.space = IntervalLine()
    return doc


def load(path: str, space: MeasureSpace | None = None) -> Document:
    with open(path, encoding="utf-8") as fh:
        return parse_document(fh.read(), space)


def format_step(phi: StepFunction) -> str:
    return str(phi)
