"""Scalar functions of x1..xn: parsing, serialization, and exact second-order jets.

Expressions are plain ASTs over constants, variables, the four arithmetic
operators, constant-exponent powers, and a fixed set of smooth unary
functions.  Differentiation is exact: evaluation propagates (value, gradient,
Hessian) triples through the tree, so theorem checks downstream never see
finite-difference noise.  ``fd_jet`` exists only as an independent test
oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "Expression",
    "JetValue",
    "ExprError",
    "ExprSyntaxError",
    "DomainError",
    "parse",
    "serialize",
    "eval_jet",
    "eval_value",
    "fd_jet",
]


class ExprError(ValueError):
    """Base class for expression failures."""


class ExprSyntaxError(ExprError):
    """Malformed input text; carries the 0-based offset of the problem."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(ExprError):
    """Evaluation left the domain (log of nonpositive, division by zero, ...)."""

    def __init__(self, message: str, subexpr: "Node", point):
        pt = tuple(float(v) for v in np.atleast_1d(point))
        super().__init__(f"{message} in '{serialize(subexpr)}' at point {pt}")
        self.subexpr = subexpr
        self.point = pt


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 1-based


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: float  # constant by construction


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Node"


Node = Union[Const, Var, Neg, BinOp, Pow, Call]


@dataclass(frozen=True)
class Expression:
    """A parsed function u: R^dim -> R."""

    dim: int
    root: Node

    def serialize(self) -> str:
        return serialize(self.root)

    def __str__(self) -> str:
        return self.serialize()


@dataclass
class JetValue:
    """Value, gradient, and (exactly symmetric) Hessian of u at a point."""

    value: float
    gradient: np.ndarray
    hessian: np.ndarray


# (value, first derivative, second derivative) for each unary function,
# plus an optional domain predicate.
_FUNCS = {
    "sin": (math.sin, math.cos, lambda x: -math.sin(x), None),
    "cos": (math.cos, lambda x: -math.sin(x), lambda x: -math.cos(x), None),
    "tan": (
        math.tan,
        lambda x: 1.0 / math.cos(x) ** 2,
        lambda x: 2.0 * math.tan(x) / math.cos(x) ** 2,
        None,
    ),
    "atan": (
        math.atan,
        lambda x: 1.0 / (1.0 + x * x),
        lambda x: -2.0 * x / (1.0 + x * x) ** 2,
        None,
    ),
    "exp": (math.exp, math.exp, math.exp, None),
    "log": (
        math.log,
        lambda x: 1.0 / x,
        lambda x: -1.0 / (x * x),
        lambda x: x > 0.0,
    ),
    "sqrt": (
        math.sqrt,
        lambda x: 0.5 / math.sqrt(x),
        lambda x: -0.25 / math.sqrt(x) ** 3,
        lambda x: x > 0.0,
    ),
    "cosh": (math.cosh, math.sinh, math.cosh, None),
    "sinh": (math.sinh, math.cosh, math.sinh, None),
}


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*/^()")


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.token = None  # (kind, value, position)
        self.advance()

    def advance(self):
        text, i = self.text, self.pos
        while i < len(text) and text[i].isspace():
            i += 1
        if i >= len(text):
            self.token = ("end", "", len(text))
            self.pos = i
            return
        start = i
        ch = text[i]
        if ch in _OPERATORS:
            self.token = ("op", ch, start)
            self.pos = i + 1
            return
        if ch.isdigit() or ch == ".":
            j = i
            while j < len(text) and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < len(text) and text[j] in "eE":
                k = j + 1
                if k < len(text) and text[k] in "+-":
                    k += 1
                if k < len(text) and text[k].isdigit():
                    j = k
                    while j < len(text) and text[j].isdigit():
                        j += 1
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ExprSyntaxError(f"malformed number '{lit}'", start) from None
            self.token = ("num", value, start)
            self.pos = j
            return
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            self.token = ("ident", text[i:j], start)
            self.pos = j
            return
        raise ExprSyntaxError(f"unexpected character '{ch}'", start)


class _Parser:
    """Recursive descent; precedence: power > unary minus > * / > + -."""

    def __init__(self, text: str, dim: int):
        self.tok = _Tokenizer(text)
        self.dim = dim

    def parse(self) -> Node:
        node = self.expr()
        kind, value, pos = self.tok.token
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input '{value}'", pos)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.tok.token[:2] in (("op", "+"), ("op", "-")):
            op = self.tok.token[1]
            self.tok.advance()
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.tok.token[:2] in (("op", "*"), ("op", "/")):
            op = self.tok.token[1]
            self.tok.advance()
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.tok.token[:2] == ("op", "-"):
            self.tok.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.tok.token[:2] == ("op", "^"):
            _, _, pos = self.tok.token
            self.tok.advance()
            exponent = self.unary()  # right-associative; allows a leading minus
            value = _fold_constant(exponent)
            if value is None:
                raise ExprSyntaxError("power exponent must be constant", pos)
            if not math.isfinite(value):
                raise ExprSyntaxError("power exponent is not finite", pos)
            return Pow(base, value)
        return base

    def atom(self) -> Node:
        kind, value, pos = self.tok.token
        if kind == "num":
            self.tok.advance()
            return Const(value)
        if kind == "ident":
            self.tok.advance()
            if value in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(value, arg)
            if value[0] == "x" and value[1:].isdigit():
                index = int(value[1:])
                if not 1 <= index <= self.dim:
                    raise ExprSyntaxError(
                        f"variable index out of range: '{value}' with dim {self.dim}", pos
                    )
                return Var(index)
            raise ExprSyntaxError(f"unknown identifier '{value}'", pos)
        if kind == "op" and value == "(":
            self.tok.advance()
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected token '{value}'", pos)

    def expect(self, ch: str):
        kind, value, pos = self.tok.token
        if kind == "op" and value == ch:
            self.tok.advance()
            return
        if kind == "end":
            raise ExprSyntaxError(f"unexpected end of input, expected '{ch}'", pos)
        raise ExprSyntaxError(f"expected '{ch}', found '{value}'", pos)


def _fold_constant(node: Node):
    """Evaluate a variable-free subtree to a float, or return None."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return None
    if isinstance(node, Neg):
        v = _fold_constant(node.arg)
        return None if v is None else -v
    if isinstance(node, BinOp):
        a = _fold_constant(node.left)
        b = _fold_constant(node.right)
        if a is None or b is None:
            return None
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            return None
        return a / b
    if isinstance(node, Pow):
        a = _fold_constant(node.base)
        if a is None:
            return None
        try:
            return float(a ** node.exponent)
        except (ValueError, OverflowError):
            return None
    if isinstance(node, Call):
        a = _fold_constant(node.arg)
        if a is None:
            return None
        f, _, _, dom = _FUNCS[node.func]
        if dom is not None and not dom(a):
            return None
        return f(a)
    raise TypeError(f"unknown node {node!r}")


def parse(text: str, dim: int) -> Expression:
    """Parse ``text`` over variables x1..x<dim> into an Expression."""
    if not isinstance(dim, int) or dim < 1:
        raise ExprError(f"dim must be a positive integer, got {dim!r}")
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return Expression(dim=dim, root=_Parser(text, dim).parse())


def serialize(node: Node) -> str:
    """Canonical fully parenthesized form; parse(serialize(x)) == x."""
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index}"
    if isinstance(node, Neg):
        return f"(-{serialize(node.arg)})"
    if isinstance(node, BinOp):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    if isinstance(node, Pow):
        return f"({serialize(node.base)}^{repr(node.exponent)})"
    if isinstance(node, Call):
        return f"{node.func}({serialize(node.arg)})"
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Second-order jet propagation
# ---------------------------------------------------------------------------

class _Jet:
    __slots__ = ("v", "g", "h")

    def __init__(self, v: float, g: np.ndarray, h: np.ndarray):
        self.v = v
        self.g = g
        self.h = h


def _compose(f: _Jet, s0: float, s1: float, s2: float) -> _Jet:
    # chain rule for a smooth scalar map applied to a jet
    return _Jet(s0, s1 * f.g, s1 * f.h + s2 * np.outer(f.g, f.g))


def _jet(node: Node, p: np.ndarray, point) -> _Jet:
    n = p.shape[0]
    if isinstance(node, Const):
        return _Jet(node.value, np.zeros(n), np.zeros((n, n)))
    if isinstance(node, Var):
        g = np.zeros(n)
        g[node.index - 1] = 1.0
        return _Jet(p[node.index - 1], g, np.zeros((n, n)))
    if isinstance(node, Neg):
        a = _jet(node.arg, p, point)
        return _Jet(-a.v, -a.g, -a.h)
    if isinstance(node, BinOp):
        a = _jet(node.left, p, point)
        b = _jet(node.right, p, point)
        if node.op == "+":
            return _Jet(a.v + b.v, a.g + b.g, a.h + b.h)
        if node.op == "-":
            return _Jet(a.v - b.v, a.g - b.g, a.h - b.h)
        if node.op == "*":
            h = a.v * b.h + b.v * a.h + np.outer(a.g, b.g) + np.outer(b.g, a.g)
            return _Jet(a.v * b.v, a.v * b.g + b.v * a.g, h)
        if b.v == 0.0:
            raise DomainError("division by zero", node, point)
        x = b.v
        recip = _compose(b, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x))
        h = a.v * recip.h + recip.v * a.h + np.outer(a.g, recip.g) + np.outer(recip.g, a.g)
        return _Jet(a.v * recip.v, a.v * recip.g + recip.v * a.g, h)
    if isinstance(node, Pow):
        a = _jet(node.base, p, point)
        c = node.exponent
        x = a.v
        if c.is_integer() and abs(c) < 1e12:
            k = int(c)
            if k == 0:
                return _Jet(1.0, np.zeros(n), np.zeros((n, n)))
            if k == 1:
                return a
            if x == 0.0 and k < 0:
                raise DomainError("zero base with negative exponent", node, point)
            # k >= 2 is safe at x = 0 (0**0 == 1 covers the k == 2 case)
            return _compose(a, x ** k, k * x ** (k - 1), k * (k - 1) * x ** (k - 2))
        if x <= 0.0:
            raise DomainError("non-integer power of a nonpositive base", node, point)
        s0 = x ** c
        return _compose(a, s0, c * s0 / x, c * (c - 1.0) * s0 / (x * x))
    if isinstance(node, Call):
        a = _jet(node.arg, p, point)
        f, d1, d2, dom = _FUNCS[node.func]
        if dom is not None and not dom(a.v):
            raise DomainError(f"{node.func} outside its domain", node, point)
        return _compose(a, f(a.v), d1(a.v), d2(a.v))
    raise TypeError(f"unknown node {node!r}")


def _value(node: Node, p: np.ndarray, point) -> float:
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return p[node.index - 1]
    if isinstance(node, Neg):
        return -_value(node.arg, p, point)
    if isinstance(node, BinOp):
        a = _value(node.left, p, point)
        b = _value(node.right, p, point)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError("division by zero", node, point)
        return a / b
    if isinstance(node, Pow):
        a = _value(node.base, p, point)
        c = node.exponent
        if c.is_integer() and abs(c) < 1e12:
            if a == 0.0 and c < 0:
                raise DomainError("zero base with negative exponent", node, point)
            return a ** int(c)
        if a <= 0.0:
            raise DomainError("non-integer power of a nonpositive base", node, point)
        return a ** c
    if isinstance(node, Call):
        a = _value(node.arg, p, point)
        f, _, _, dom = _FUNCS[node.func]
        if dom is not None and not dom(a):
            raise DomainError(f"{node.func} outside its domain", node, point)
        return f(a)
    raise TypeError(f"unknown node {node!r}")


def _check_point(e: Expression, p) -> np.ndarray:
    arr = np.asarray(p, dtype=float).reshape(-1)
    if arr.shape[0] != e.dim:
        raise ExprError(f"point has length {arr.shape[0]}, expression has dim {e.dim}")
    return arr


def eval_jet(e: Expression, p) -> JetValue:
    """Exact value, gradient, and Hessian of e at p.

    The Hessian is exactly symmetric: every propagation rule builds it from
    symmetric terms only.
    """
    arr = _check_point(e, p)
    jet = _jet(e.root, arr, arr)
    return JetValue(value=float(jet.v), gradient=jet.g, hessian=jet.h)


def eval_value(e: Expression, p) -> float:
    """Value of e at p (no derivatives)."""
    arr = _check_point(e, p)
    return float(_value(e.root, arr, arr))


def fd_jet(e: Expression, p, h: float) -> JetValue:
    """Central-difference jet; the independent oracle for eval_jet.

    Gradient: (u(p+h e_i) - u(p-h e_i)) / 2h.  Hessian diagonal by the
    three-point second difference, off-diagonal by the four-point stencil.
    """
    if h <= 0.0:
        raise ExprError(f"step h must be positive, got {h}")
    arr = _check_point(e, p)
    n = arr.shape[0]

    def u(q):
        return _value(e.root, q, q)

    u0 = u(arr)
    grad = np.zeros(n)
    hess = np.zeros((n, n))
    for i in range(n):
        qp, qm = arr.copy(), arr.copy()
        qp[i] += h
        qm[i] -= h
        up, um = u(qp), u(qm)
        grad[i] = (up - um) / (2.0 * h)
        hess[i, i] = (up - 2.0 * u0 + um) / (h * h)
    for i in range(n):
        for j in range(i + 1, n):
            qpp, qpm, qmp, qmm = arr.copy(), arr.copy(), arr.copy(), arr.copy()
            qpp[[i, j]] += h
            qmm[[i, j]] -= h
            qpm[i] += h
            qpm[j] -= h
            qmp[i] -= h
            qmp[j] += h
            val = (u(qpp) - u(qpm) - u(qmp) + u(qmm)) / (4.0 * h * h)
            hess[i, j] = val
            hess[j, i] = val
    hess = 0.5 * (hess + hess.T)
    return JetValue(value=float(u0), gradient=grad, hessian=hess)
