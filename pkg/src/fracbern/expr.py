"""Scalar expressions in ``t`` with a bound parameter ``alpha``.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are ``t``, ``alpha``, ``pi``, ``e`` and the functions ``exp``, ``ln``,
``sin``, ``cos``, ``tan``, ``sqrt``, ``abs`` and ``gamma``. Evaluation works
on floats and on numpy arrays alike.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from .errors import DomainError, ParseError, UnknownIdentifier

__all__ = [
    "Num", "Var", "Param", "Const", "Neg", "BinOp", "Call",
    "Expression", "parse", "evaluate",
]

FUNCTIONS = ("exp", "ln", "sin", "cos", "tan", "sqrt", "abs", "gamma")
CONSTANTS = {"pi": math.pi, "e": math.e}


@dataclass(frozen=True)
class Num:
    value: float

    def __str__(self):
        v = float(self.value)
        return repr(v) if math.isfinite(v) else "1e999"


@dataclass(frozen=True)
class Var:
    name: str = "t"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Param:
    name: str = "alpha"

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Const:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg:
    operand: "Node"

    def __str__(self):
        return f"(-{self.operand})"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"

    def __str__(self):
        return f"({self.left}{self.op}{self.right})"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"

    def __str__(self):
        return f"{self.func}({self.arg})"


Node = Union[Num, Var, Param, Const, Neg, BinOp, Call]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = []
        pos = 0
        n = len(source)
        while pos < n:
            if source[pos:].strip() == "":
                break
            m = _TOKEN.match(source, pos)
            if m is None:
                ws = len(source[pos:]) - len(source[pos:].lstrip())
                raise ParseError(f"unexpected character {source[pos + ws]!r}", self._bytes(pos + ws))
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.tokens.append(("end", "", len(source)))
        self.i = 0

    def _bytes(self, char_offset: int) -> int:
        return len(self.source[:char_offset].encode("utf-8"))

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, pos = self.take()
        if value != text or kind == "end":
            found = "end of input" if kind == "end" else repr(value)
            raise ParseError(f"expected {text!r}, found {found}", self._bytes(pos))

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", self._bytes(pos))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.take()
            return Neg(self.unary())
        if kind == "op" and value == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        kind, value, pos = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value == "t":
                return Var("t")
            if value == "alpha":
                return Param("alpha")
            if value in CONSTANTS:
                return Const(value)
            raise UnknownIdentifier(value, self._bytes(pos))
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"unexpected {found}", self._bytes(pos))


def _check(mask, message: str):
    if np.any(mask):
        raise DomainError(message)


def _integral(x):
    return np.isfinite(x) & (x == np.floor(x))


def _eval(node: Node, t, alpha):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return t
    if isinstance(node, Param):
        return alpha
    if isinstance(node, Const):
        return np.float64(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_eval(node.operand, t, alpha)
    if isinstance(node, BinOp):
        left = _eval(node.left, t, alpha)
        right = _eval(node.right, t, alpha)
        op = node.op
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            _check(right == 0, "division by zero")
            return left / right
        _check((left == 0) & (right < 0), "zero raised to a negative power")
        _check((left < 0) & ~_integral(right), "negative base with non-integer exponent")
        return np.power(left, right)
    if isinstance(node, Call):
        x = _eval(node.arg, t, alpha)
        f = node.func
        if f == "ln":
            _check(x <= 0, "ln of non-positive argument")
            return np.log(x)
        if f == "sqrt":
            _check(x < 0, "sqrt of negative argument")
            return np.sqrt(x)
        if f == "gamma":
            _check((x <= 0) & _integral(x), "gamma at non-positive integer")
            return special.gamma(x)
        return {"exp": np.exp, "sin": np.sin, "cos": np.cos, "tan": np.tan, "abs": np.abs}[f](x)
    raise TypeError(f"not an expression node: {node!r}")


def evaluate(node: Node, t, alpha):
    with np.errstate(all="ignore"):
        return _eval(node, t, alpha)


@dataclass(frozen=True)
class Expression:
    """A parsed expression. Immutable; evaluation is pure."""

    root: Node
    source: str

    def eval(self, t: float, alpha: float) -> float:
        return float(evaluate(self.root, np.float64(t), np.float64(alpha)))

    def __call__(self, t, alpha=1.0):
        """Evaluate at scalar or array ``t``; arrays come back as float64 arrays."""
        if np.ndim(t) == 0:
            return self.eval(t, alpha)
        t = np.asarray(t, dtype=float)
        out = evaluate(self.root, t, np.float64(alpha))
        return np.broadcast_to(out, t.shape).astype(float)

    def bind(self, alpha: float):
        """Return ``t -> self(t, alpha)``."""
        return lambda t: self(t, alpha)

    def serialize(self) -> str:
        return str(self.root)

    def __str__(self):
        return self.source


def parse(source: str) -> Expression:
    if not source or not source.strip():
        raise ParseError("empty expression", 0)
    return Expression(_Parser(source).parse(), source)
