"""Recursive-descent parser for the shared expression grammar.

Grammar (see docs/grammar.md)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := ("+" | "-") unary | power
    power   := atom (("^" | "**") unary)?
    atom    := NUMBER | "k" | "pi" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := "atan" | "arctan" | "sqrt"

Unary minus binds looser than ``^``, so ``-k^2`` is ``-(k^2)``. Decimal
numbers are read as exact fractions.

Parsing happens in two steps: text to a small AST, then the AST is evaluated
into one of four exact domains (scalar, rational function of k, sequence,
closed form). Type errors in the second step also raise
:class:`ExprSyntaxError` pointing at the offending operator.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .closedform import ClosedFormExpr
from .exact import ExactScalar, Poly
from .rational import RationalFunction, SurdNotReducible
from .sequences import SequenceSpec


class ExprSyntaxError(SyntaxError):
    """Malformed or ill-typed expression; ``position`` is a 0-based column."""

    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at position {position}" + (f" in {text!r}" if text else ""))
        self.message = message
        self.text = text
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_]\w*)|(\*\*|[-+*/^()]))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(Token("num", m.group(1), start))
        elif m.group(2) is not None:
            tokens.append(Token("name", m.group(2), start))
        else:
            tokens.append(Token("op", m.group(3), start))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# AST nodes
@dataclass(frozen=True)
class Num:
    value: Fraction
    pos: int


@dataclass(frozen=True)
class Var:
    name: str  # "k" or "pi"
    pos: int


@dataclass(frozen=True)
class Call:
    func: str  # "atan" or "sqrt"
    arg: "Node"
    pos: int


@dataclass(frozen=True)
class BinOp:
    op: str  # "+", "-", "*", "/", "^"
    left: "Node"
    right: "Node"
    pos: int


@dataclass(frozen=True)
class Neg:
    operand: "Node"
    pos: int


Node = Union[Num, Var, Call, BinOp, Neg]

_FUNCS = {"atan": "atan", "arctan": "atan", "sqrt": "sqrt"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise ExprSyntaxError(message, self.text, tok.pos)

    def expect(self, op: str) -> Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            self.error(f"expected {op!r}" + (f", found {tok.text!r}" if tok.text else ", found end of input"))
        return self.next()

    def parse(self) -> Node:
        if self.peek().kind == "end":
            self.error("empty expression")
        node = self.expr()
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            tok = self.next()
            node = BinOp(tok.text, node, self.term(), tok.pos)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in ("*", "/"):
            tok = self.next()
            node = BinOp(tok.text, node, self.unary(), tok.pos)
        return node

    def unary(self) -> Node:
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.next()
            operand = self.unary()
            return Neg(operand, tok.pos) if tok.text == "-" else operand
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("^", "**"):
            self.next()
            return BinOp("^", base, self.unary(), tok.pos)
        return base

    def atom(self) -> Node:
        tok = self.next()
        if tok.kind == "num":
            return Num(Fraction(tok.text), tok.pos)
        if tok.kind == "name":
            name = tok.text
            if name in ("k", "pi"):
                return Var(name, tok.pos)
            if name in _FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(_FUNCS[name], arg, tok.pos)
            self.error(f"unknown name {name!r}", tok)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind == "end":
            self.error("unexpected end of input", tok)
        self.error(f"unexpected {tok.text!r}", tok)


def parse_ast(text: str) -> Node:
    return _Parser(text).parse()


# Evaluation. Values live in one of three domains; scalars are promoted as needed.
Value = Union[ExactScalar, RationalFunction, ClosedFormExpr]


class _Evaluator:
    def __init__(self, text: str):
        self.text = text

    def error(self, message: str, pos: int):
        raise ExprSyntaxError(message, self.text, pos)

    def eval(self, node: Node) -> Value:
        try:
            return self._eval(node)
        except (SurdNotReducible, ValueError, ZeroDivisionError, TypeError) as exc:
            if isinstance(exc, ExprSyntaxError):
                raise
            self.error(str(exc), getattr(node, "pos", 0))

    def _eval(self, node: Node) -> Value:
        if isinstance(node, Num):
            return ExactScalar(node.value)
        if isinstance(node, Var):
            return RationalFunction.k() if node.name == "k" else ClosedFormExpr.pi()
        if isinstance(node, Neg):
            v = self.eval(node.operand)
            return -v
        if isinstance(node, Call):
            arg = self.eval(node.arg)
            if not isinstance(arg, ExactScalar):
                self.error(f"{node.func} needs a constant exact argument", node.pos)
            if node.func == "sqrt":
                if not arg.is_rational or arg.sign() < 0:
                    self.error("sqrt needs a non-negative rational argument", node.pos)
                return ExactScalar.sqrt(arg.r)
            return ClosedFormExpr.atan(arg)
        if isinstance(node, BinOp):
            left, right = self.eval(node.left), self.eval(node.right)
            return self._binop(node, left, right)
        raise TypeError(f"unknown node {node!r}")

    def _binop(self, node: BinOp, a: Value, b: Value) -> Value:
        op = node.op
        if op == "^":
            if not (isinstance(b, ExactScalar) and b.is_rational and b.r.denominator == 1):
                self.error("exponent must be an integer constant", node.pos)
            e = int(b.r)
            if isinstance(a, ExactScalar):
                if e < 0:
                    if not a:
                        self.error("zero to a negative power", node.pos)
                    return ExactScalar(1) / _scalar_pow(a, -e)
                return _scalar_pow(a, e)
            if isinstance(a, ClosedFormExpr) and e < 0:
                self.error("negative powers of pi/atan are not supported", node.pos)
            return a ** e
        kinds = {type(a), type(b)}
        if ClosedFormExpr in kinds and RationalFunction in kinds:
            self.error("cannot mix k with pi/atan", node.pos)
        if ClosedFormExpr in kinds:
            a, b = self._to_closed(a, node), self._to_closed(b, node)
        elif RationalFunction in kinds:
            a, b = RationalFunction.coerce(a), RationalFunction.coerce(b)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if isinstance(a, ClosedFormExpr) and not b.is_const():
                self.error("can only divide pi/atan expressions by a rational constant", node.pos)
            return a / b
        raise TypeError(f"unknown operator {op}")

    def _to_closed(self, v: Value, node: Node) -> ClosedFormExpr:
        if isinstance(v, ClosedFormExpr):
            return v
        if not v.is_rational:
            self.error("irrational coefficients are not supported in closed forms", node.pos)
        return ClosedFormExpr.const(v.r)


def _scalar_pow(a: ExactScalar, e: int) -> ExactScalar:
    result = ExactScalar(1)
    for _ in range(e):
        result = result * a
    return result


def _contains(node: Node, names: set[str]) -> bool:
    if isinstance(node, Var):
        return node.name in names
    if isinstance(node, Call):
        return node.func == "atan" or _contains(node.arg, names)
    if isinstance(node, BinOp):
        return _contains(node.left, names) or _contains(node.right, names)
    if isinstance(node, Neg):
        return _contains(node.operand, names)
    return False


def _evaluate(text: str) -> tuple[Node, Value]:
    node = parse_ast(text)
    return node, _Evaluator(text).eval(node)


def parse_scalar(text: str) -> ExactScalar:
    """Parse a constant such as ``1/2`` or ``2*sqrt(3)/3``."""
    node, v = _evaluate(text)
    if not isinstance(v, ExactScalar):
        raise ExprSyntaxError("expected a constant exact scalar", text, 0)
    return v


def parse_rational_function(text: str) -> RationalFunction:
    """Parse a rational function of k (constants allowed)."""
    node, v = _evaluate(text)
    if isinstance(v, ClosedFormExpr):
        raise ExprSyntaxError("expected a rational function of k, found pi/atan", text, 0)
    return RationalFunction.coerce(v)


def parse_closed_form(text: str) -> ClosedFormExpr:
    """Parse a closed form built from rationals, pi and atan(...)."""
    node, v = _evaluate(text)
    if isinstance(v, RationalFunction) and not v.is_const():
        raise ExprSyntaxError("closed forms cannot depend on k", text, 0)
    if isinstance(v, RationalFunction):
        v = v.as_scalar()
    if isinstance(v, ExactScalar):
        if not v.is_rational:
            raise ExprSyntaxError("irrational constants are not closed forms; wrap them in atan", text, 0)
        return ClosedFormExpr.const(v.r)
    return v


def parse_sequence(text: str) -> SequenceSpec:
    """Parse ``base`` or ``(base)^power`` with base a polynomial in k."""
    node = parse_ast(text)
    ev = _Evaluator(text)
    power = 1
    base_node = node
    if isinstance(node, BinOp) and node.op == "^":
        exp = ev.eval(node.right)
        base = ev.eval(node.left)
        if (isinstance(exp, ExactScalar) and exp.is_rational and exp.r.denominator == 1
                and exp.r >= 1 and isinstance(base, RationalFunction) and base.is_poly()
                and base.num.degree >= 1):
            power, base_node = int(exp.r), node.left
    v = ev.eval(base_node)
    if not isinstance(v, RationalFunction) or not v.is_poly() or v.num.degree < 1:
        raise ExprSyntaxError("a sequence must be a polynomial in k of degree >= 1", text, 0)
    try:
        return SequenceSpec(v.as_poly(), power)
    except ValueError as exc:
        raise ExprSyntaxError(str(exc), text, 0) from None


def parse_expr(text: str) -> Union[ClosedFormExpr, SequenceSpec, RationalFunction, ExactScalar]:
    """Parse text into the most specific exact domain.

    Anything with ``pi`` or ``atan`` is a :class:`ClosedFormExpr`; a
    polynomial in k (optionally raised to a power) is a
    :class:`SequenceSpec`; other expressions in k are
    :class:`RationalFunction`; constants are :class:`ExactScalar`.
    """
    node, v = _evaluate(text)
    if isinstance(v, ClosedFormExpr):
        return v
    if isinstance(v, RationalFunction):
        if v.is_poly() and v.num.degree >= 1 and v.num.lead > 0:
            return parse_sequence(text)
        if v.is_const():
            return v.as_scalar()
        return v
    return v
