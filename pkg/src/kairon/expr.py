"""Closed-form expressions in ``t`` and ``w1 .. wm`` for initial data.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" unary ] ;                 (* right associative *)
    atom    = number | name | name "(" expr ")" | "(" expr ")" ;
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ]
            | "." digits [ exponent ] ;
    name    = letter { letter | digit | "_" } ;

Precedence from tight to loose: ``^``, unary minus, ``* /``, ``+ -``; so
``-2^2 == -4`` and ``2^-1 == 0.5``.  Functions: exp, sin, cos, sqrt, abs,
tanh and ``bump(x) = exp(-1 / (1 - x^2))`` for ``|x| < 1``, else exactly 0.

Evaluation is vectorised over numpy arrays.  Division by zero, sqrt of a
negative number and real powers of negative bases raise
:class:`ExpressionDomainError` instead of producing inf/nan.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np


class ExpressionError(ValueError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message: str, source: str, offset: int):
        self.source = source
        self.offset = offset
        self.line = source.count("\n", 0, offset) + 1
        self.column = offset - (source.rfind("\n", 0, offset) + 1) + 1
        super().__init__(f"{message} at offset {offset} (line {self.line}, column {self.column})")


class ExpressionDomainError(ExpressionError):
    pass


def bump(x):
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    safe = np.where(inside, x, 0.0)
    return np.where(inside, np.exp(-1.0 / (1.0 - safe * safe)), 0.0)


def _checked_sqrt(x):
    if np.any(x < 0):
        raise ExpressionDomainError("sqrt of a negative number")
    return np.sqrt(x)


FUNCTIONS = {
    "exp": np.exp,
    "sin": np.sin,
    "cos": np.cos,
    "sqrt": _checked_sqrt,
    "abs": np.abs,
    "tanh": np.tanh,
    "bump": bump,
}


# --- AST -------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Num | Var | Neg | BinOp | Call


@dataclass(frozen=True)
class Expression:
    """Parsed expression bound to a spatial dimension ``m``."""

    root: Node
    m: int
    source: str = ""

    def __call__(self, t, w):
        return evaluate(self, t, w)

    def __str__(self) -> str:
        return to_source(self.root)

    @property
    def variables(self) -> frozenset[str]:
        return _collect_vars(self.root)


def _collect_vars(node: Node) -> frozenset[str]:
    if isinstance(node, Var):
        return frozenset([node.name])
    if isinstance(node, Num):
        return frozenset()
    if isinstance(node, Neg):
        return _collect_vars(node.operand)
    if isinstance(node, Call):
        return _collect_vars(node.arg)
    return _collect_vars(node.left) | _collect_vars(node.right)


# --- lexer -----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(source):
        mt = _TOKEN.match(source, pos)
        if mt is None:
            raise ExpressionSyntaxError(f"unexpected character {source[pos]!r}", source, pos)
        if mt.lastgroup != "ws":
            toks.append(_Tok(mt.lastgroup, mt.group(), pos))
        pos = mt.end()
    toks.append(_Tok("end", "", len(source)))
    return toks


# --- parser ----------------------------------------------------------------


class _Parser:
    def __init__(self, source: str, m: int):
        self.source = source
        self.m = m
        self.toks = _tokenize(source)
        self.i = 0
        self.allowed = {"t"} | {f"w{k}" for k in range(1, m + 1)}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ExpressionSyntaxError(message, self.source, tok.pos)

    def take(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.take("-"):
            return Neg(self.unary())
        if self.take("+"):
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.take("^"):
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self.take("("):
                if tok.text not in FUNCTIONS:
                    self.error(f"unknown function {tok.text!r}", tok)
                arg = self.expr()
                if not self.take(")"):
                    self.error("expected ')'")
                return Call(tok.text, arg)
            if tok.text in FUNCTIONS:
                self.error(f"function {tok.text!r} needs an argument", tok)
            if tok.text not in self.allowed:
                self.error(f"unknown variable {tok.text!r} for m={self.m}", tok)
            return Var(tok.text)
        if self.take("("):
            node = self.expr()
            if not self.take(")"):
                self.error("expected ')'")
            return node
        if tok.kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected {tok.text!r}")


def parse(source: str, m: int) -> Expression:
    """Parse ``source`` for spatial dimension ``m`` (variables t, w1..wm)."""
    return Expression(_Parser(source, m).parse(), m, source)


# --- printing --------------------------------------------------------------


def to_source(node: Node) -> str:
    """Fully parenthesised text that parses back to an equal AST."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Call):
        return f"{node.func}({to_source(node.arg)})"
    return f"({to_source(node.left)} {node.op} {to_source(node.right)})"


# --- evaluation ------------------------------------------------------------


def _eval(node: Node, env: dict) -> np.ndarray:
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Neg):
        return -_eval(node.operand, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.func](_eval(node.arg, env))
    a = _eval(node.left, env)
    b = _eval(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if np.any(b == 0):
            raise ExpressionDomainError(f"division by zero in {to_source(node)}")
        return a / b
    # power
    a_arr, b_arr = np.broadcast_arrays(a, b)
    non_integer = b_arr != np.round(b_arr)
    if np.any((a_arr < 0) & non_integer):
        raise ExpressionDomainError(f"non-integer power of a negative number in {to_source(node)}")
    if np.any((a_arr == 0) & (b_arr < 0)):
        raise ExpressionDomainError(f"division by zero in {to_source(node)}")
    return np.power(a, b)


def evaluate(e: Expression, t, w) -> np.ndarray:
    """Evaluate at times ``t`` (shape ``(...)``) and directions ``w`` (``(..., m)``)."""
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        w = w.reshape(1)
    if w.shape[-1] != e.m:
        raise ExpressionError(f"expression was parsed for m={e.m}, got directions of length {w.shape[-1]}")
    shape = np.broadcast_shapes(t.shape, w.shape[:-1])
    env = {"t": np.broadcast_to(t, shape)}
    for k in range(e.m):
        env[f"w{k + 1}"] = np.broadcast_to(w[..., k], shape)
    with np.errstate(over="ignore"):
        out = _eval(e.root, env)
    return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()
