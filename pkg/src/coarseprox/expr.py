"""A small expression language for naming sets on the command line.

    expr  := atom | comb "(" expr {"," expr} ")"
    atom  := "empty" | "all" | "nat" | "evens" | "odds" | "squares" | "pow2"
           | "finite" "{" [num {"," num}] "}"
           | "ap" "(" num "," num ")"
           | "interval" "(" num "," (num | "oo") "," flag "," flag ")"
           | "neg" "(" expr ")"
    comb  := "union" | "inter" | "compl" | "diff"
    num   := ["-"] digits ["/" digits]
    flag  := "open" | "closed"

Whitespace is ignored.  Which atoms are legal depends on the backend the
expression is elaborated for.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import numpy as np

from . import setalg_q as q
from . import setalg_z as z
from .backends import GeneratorSet, QHalfLine, SetClassError, Windowed, ZMetric
from .setalg_q import QSet, frac_str
from .setalg_z import EPSet

__all__ = ["ExprError", "Node", "parse_expr", "print_expr", "elaborate"]

NULLARY = ("empty", "all", "nat", "evens", "odds", "squares", "pow2")
COMBINATORS = {"union": (1, None), "inter": (1, None), "compl": (1, 1), "diff": (2, 2), "neg": (1, 1)}


class ExprError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(f"{message}{where}")


@dataclass(frozen=True)
class Node:
    """``head`` names the atom or combinator; numbers and flags go in ``args``."""

    head: str
    args: tuple = ()
    children: tuple[Node, ...] = ()


# ---------------------------------------------------------------------------
# lexing

_TOKEN = re.compile(r"\s*(?:(?P<num>-?\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<punct>[(){},]))")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(i: int) -> tuple[int, int]:
        ln = max(k for k, s in enumerate(line_starts) if s <= i)
        return ln + 1, i - line_starts[ln] + 1

    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprError(f"unexpected character {text[pos]!r}", *where(pos))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), *where(start)))
        pos = m.end()
    toks.append(_Tok("end", "", *where(len(text))))
    return toks


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text: str):
        self.toks = _lex(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, msg: str):
        t = self.tok
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprError(f"{msg}, found {found}", t.line, t.col)

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind == "end":
            self.fail(f"expected {text!r}")
        self.i += 1

    def number(self) -> Fraction:
        if self.tok.kind != "num":
            self.fail("expected a number")
        t = self.tok
        self.i += 1
        try:
            return Fraction(t.text)
        except ZeroDivisionError:
            raise ExprError("zero denominator", t.line, t.col) from None

    def word(self, choices: tuple[str, ...]) -> str:
        if self.tok.kind != "name" or self.tok.text not in choices:
            self.fail(f"expected one of {', '.join(choices)}")
        w = self.tok.text
        self.i += 1
        return w

    def expr(self) -> Node:
        t = self.tok
        if t.kind != "name":
            self.fail("expected a set expression")
        name = t.text
        self.i += 1
        if name in NULLARY:
            return Node(name)
        if name == "finite":
            self.expect("{")
            vals = []
            if self.tok.text != "}":
                vals.append(self.number())
                while self.tok.text == ",":
                    self.i += 1
                    vals.append(self.number())
            self.expect("}")
            return Node("finite", tuple(sorted(set(vals))))
        if name == "ap":
            self.expect("(")
            a = self.number()
            self.expect(",")
            d = self.number()
            self.expect(")")
            return Node("ap", (a, d))
        if name == "interval":
            self.expect("(")
            lo = self.number()
            self.expect(",")
            if self.tok.kind == "name" and self.tok.text == "oo":
                self.i += 1
                hi = None
            else:
                hi = self.number()
            self.expect(",")
            f1 = self.word(("open", "closed"))
            self.expect(",")
            f2 = self.word(("open", "closed"))
            self.expect(")")
            return Node("interval", (lo, hi, f1, f2))
        if name in COMBINATORS:
            lo_n, hi_n = COMBINATORS[name]
            self.expect("(")
            kids = [self.expr()]
            while self.tok.text == ",":
                self.i += 1
                kids.append(self.expr())
            if len(kids) < lo_n or (hi_n is not None and len(kids) > hi_n):
                self.fail(f"{name} takes {lo_n if lo_n == hi_n else f'at least {lo_n}'} argument(s)")
            self.expect(")")
            return Node(name, (), tuple(kids))
        raise ExprError(f"unknown atom {name!r}", t.line, t.col)


def parse_expr(text: str) -> Node:
    p = _Parser(text)
    node = p.expr()
    if p.tok.kind != "end":
        p.fail("trailing input")
    return node


def _num(x: Fraction) -> str:
    return frac_str(x)


def print_expr(node: Node) -> str:
    h = node.head
    if h in NULLARY:
        return h
    if h == "finite":
        return "finite{" + ",".join(_num(v) for v in node.args) + "}"
    if h == "ap":
        return f"ap({_num(node.args[0])},{_num(node.args[1])})"
    if h == "interval":
        lo, hi, f1, f2 = node.args
        return f"interval({_num(lo)},{'oo' if hi is None else _num(hi)},{f1},{f2})"
    return f"{h}(" + ",".join(print_expr(c) for c in node.children) + ")"


# ---------------------------------------------------------------------------
# elaboration


def _ints(node: Node, vals) -> list[int]:
    out = []
    for v in vals:
        if v.denominator != 1:
            raise SetClassError(f"{print_expr(node)}: integer backend needs integer values, got {v}")
        out.append(int(v))
    return out


def _to_ep(node: Node) -> EPSet:
    h, kids = node.head, node.children
    if h == "empty":
        return z.EMPTY
    if h == "all":
        return z.INTEGERS
    if h == "nat":
        return EPSet.tail_ap(1, 1)
    if h == "evens":
        return EPSet.residue_class(0, 2)
    if h == "odds":
        return EPSet.residue_class(1, 2)
    if h == "finite":
        return EPSet.finite(_ints(node, node.args))
    if h == "ap":
        a, d = _ints(node, node.args)
        if d <= 0:
            raise SetClassError("ap step must be positive")
        return EPSet.tail_ap(a, d)
    if h == "neg":
        return _to_ep(kids[0]).reflect()
    if h in ("union", "inter"):
        out = _to_ep(kids[0])
        for k in kids[1:]:
            out = out | _to_ep(k) if h == "union" else out & _to_ep(k)
        return out
    if h == "compl":
        return ~_to_ep(kids[0])
    if h == "diff":
        return _to_ep(kids[0]) - _to_ep(kids[1])
    raise SetClassError(f"{h} is not an eventually periodic set of integers")


def _to_q(node: Node) -> QSet:
    h, kids = node.head, node.children
    if h == "empty":
        return q.EMPTY
    if h == "all":
        return q.ALL
    if h == "nat":
        return q.NAT
    if h in ("evens", "odds"):
        return QSet.ap(0 if h == "evens" else 1, 2)
    if h == "finite":
        if any(v < 0 for v in node.args):
            raise SetClassError("half-line points must be non-negative")
        return QSet.finite(node.args)
    if h == "ap":
        a, d = node.args
        if a < 0 or d <= 0:
            raise SetClassError("half-line ap needs anchor >= 0 and step > 0")
        return QSet.ap(a, d)
    if h == "interval":
        lo, hi, f1, f2 = node.args
        if lo < 0:
            raise SetClassError("interval reaches below 0")
        return QSet.interval(lo, hi, f1 == "open", f2 == "open" or hi is None)
    if h in ("union", "inter"):
        out = _to_q(kids[0])
        for k in kids[1:]:
            out = out | _to_q(k) if h == "union" else out & _to_q(k)
        return out
    if h == "compl":
        return ~_to_q(kids[0])
    if h == "diff":
        return _to_q(kids[0]) - _to_q(kids[1])
    raise SetClassError(f"{h} is not available on the half-line")


def _squares() -> GeneratorSet:
    def mask_fn(xs):
        r = np.floor(np.sqrt(np.maximum(xs, 0))).astype(np.int64)
        return (xs >= 0) & ((r * r == xs) | ((r + 1) * (r + 1) == xs))

    g = GeneratorSet.from_sequence(lambda n: n * n, "squares")
    return GeneratorSet(lambda x: x >= 0 and isqrt(x) ** 2 == x, "squares", g.enumerator, mask_fn)


def _pow2() -> GeneratorSet:
    g = GeneratorSet.from_sequence(lambda n: 2**n, "pow2")
    return GeneratorSet(
        lambda x: x > 0 and x & (x - 1) == 0, "pow2", g.enumerator, lambda xs: (xs > 0) & ((xs & (xs - 1)) == 0)
    )


def _gen_combine(h: str, parts: list[GeneratorSet], text: str) -> GeneratorSet:
    ops = {"union": (any, np.logical_or), "inter": (all, np.logical_and)}
    if h in ops:
        red, vec = ops[h]
        pred = lambda x: red(p.predicate(x) for p in parts)  # noqa: E731
        mask_fn = None
        if all(p.mask_fn is not None for p in parts):
            mask_fn = lambda xs: vec.reduce([p.mask(int(xs[0]), int(xs[-1])) for p in parts])  # noqa: E731
        enum = None
        if h == "union" and all(_finite_enum(p) for p in parts):
            enum = lambda: iter(sorted({x for p in parts for x in p.enumerator()}, key=lambda x: (abs(x), x)))  # noqa: E731
        if h == "inter":
            fin = next((p for p in parts if _finite_enum(p)), None)
            if fin is not None:
                enum = lambda: (x for x in fin.enumerator() if pred(x))  # noqa: E731
        return _mark_finite(GeneratorSet(pred, text, enum, mask_fn))
    a, b = parts
    mask_fn = None
    if a.mask_fn is not None and b.mask_fn is not None:
        mask_fn = lambda xs: a.mask(int(xs[0]), int(xs[-1])) & ~b.mask(int(xs[0]), int(xs[-1]))  # noqa: E731
    enum = (lambda: (x for x in a.enumerator() if not b.predicate(x))) if _finite_enum(a) else None
    return _mark_finite(GeneratorSet(lambda x: a.predicate(x) and not b.predicate(x), text, enum, mask_fn))


def _finite_enum(g: GeneratorSet) -> bool:
    # only sets built from finite EP data carry a finite enumerator marker
    return getattr(g.enumerator, "_finite", False)


def _mark_finite(g: GeneratorSet) -> GeneratorSet:
    if g.enumerator is not None:
        g.enumerator._finite = True
    return g


def _to_gen(node: Node, backend: Windowed) -> GeneratorSet:
    text = print_expr(node)
    try:
        ep = _to_ep(node)
    except SetClassError:
        ep = None
    if ep is not None:
        g = GeneratorSet.from_epset(ep, text)
        return _mark_finite(g) if ep.is_finite else g
    h, kids = node.head, node.children
    if h == "squares":
        return _squares()
    if h == "pow2":
        return _pow2()
    if h == "compl":
        inner = backend.complement(_to_gen(kids[0], backend))
        return GeneratorSet(inner.predicate, text, None, inner.mask_fn)
    if h == "neg":
        a = _to_gen(kids[0], backend)
        mask_fn = None
        if a.mask_fn is not None:
            mask_fn = lambda xs: a.mask_fn(-xs)  # noqa: E731
        return GeneratorSet(lambda x: a.predicate(-x), text, None, mask_fn)
    if h in ("union", "inter", "diff"):
        return _gen_combine(h, [_to_gen(k, backend) for k in kids], text)
    raise SetClassError(f"{h} is not available on the windowed backend")


def elaborate(node: Node | str, backend):
    """Turn an expression into the set type of ``backend``."""
    if isinstance(node, str):
        node = parse_expr(node)
    if isinstance(backend, ZMetric):
        return _to_ep(node)
    if isinstance(backend, QHalfLine):
        return _to_q(node)
    if isinstance(backend, Windowed):
        return _to_gen(node, backend)
    raise TypeError(f"unknown backend {backend!r}")
