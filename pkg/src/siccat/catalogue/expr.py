"""Arithmetic expressions used on the right-hand side of recipe lines.

The grammar is deliberately tiny::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom ('^' exponent)?
    exponent := '-'? INT | '(' '-'? INT ')'
    atom   := NUMBER | NAME | '(' expr ')'

NUMBER is an unsigned decimal literal (``12``, ``0.25``); NAME is
``[A-Za-z_][A-Za-z0-9_]*``.  There are no functions.  Unary minus binds
tighter than ``*`` but looser than ``^``, so ``-x^2`` is ``-(x^2)``.

:func:`to_text` produces the canonical spelling, which parses back to an
identical tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Union


class ExpressionError(ValueError):
    """Malformed expression; ``col`` is the 1-based column of the problem."""

    def __init__(self, message: str, col: int | None = None):
        super().__init__(message if col is None else f"column {col}: {message}")
        self.message = message
        self.col = col


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Pow:
    base: "Expression"
    exponent: int


Expression = Union[Num, Sym, Neg, BinOp, Pow]

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^(),\[\]])|(?P<bad>\S))"
)


def tokenize(text: str, offset: int = 0) -> list[tuple[str, str, int]]:
    """Split ``text`` into (kind, value, column) triples."""
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        kind = m.lastgroup
        col = m.start(kind) + 1 + offset
        if kind == "bad":
            raise ExpressionError(f"unexpected character {m.group(kind)!r}", col)
        tokens.append((kind, m.group(kind), col))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1 + offset))
    return tokens


class Parser:
    """Recursive-descent parser over a token list; callers may share it."""

    def __init__(self, text: str, offset: int = 0):
        self.tokens = tokenize(text, offset)
        self.pos = 0

    @property
    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str):
        kind, got, col = self.next()
        if got != value:
            raise ExpressionError(f"expected {value!r}, found {got or 'end of line'!r}", col)

    def at_end(self) -> bool:
        return self.peek[0] == "end"

    def expression(self) -> Expression:
        node = self.term()
        while self.peek[1] in ("+", "-") and self.peek[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expression:
        node = self.unary()
        while self.peek[1] in ("*", "/") and self.peek[0] == "op":
            op = self.next()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expression:
        if self.peek[0] == "op" and self.peek[1] == "-":
            self.next()
            return Neg(self.unary())
        if self.peek[0] == "op" and self.peek[1] == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Expression:
        base = self.atom()
        if self.peek[0] == "op" and self.peek[1] == "^":
            self.next()
            return Pow(base, self.exponent())
        return base

    def exponent(self) -> int:
        paren = self.peek[1] == "("
        if paren:
            self.next()
        sign = 1
        if self.peek[1] == "-":
            self.next()
            sign = -1
        kind, value, col = self.next()
        if kind != "num" or "." in value:
            raise ExpressionError("exponent must be an integer", col)
        if paren:
            self.expect(")")
        return sign * int(value)

    def atom(self) -> Expression:
        kind, value, col = self.next()
        if kind == "num":
            return Num(Fraction(value))
        if kind == "name":
            return Sym(value)
        if value == "(":
            node = self.expression()
            self.expect(")")
            return node
        raise ExpressionError(f"unexpected {value or 'end of line'!r}", col)


def parse_expression(text: str, offset: int = 0) -> Expression:
    p = Parser(text, offset)
    node = p.expression()
    if not p.at_end():
        raise ExpressionError(f"unexpected {p.peek[1]!r}", p.peek[2])
    return node


def symbols(node: Expression) -> Iterator[str]:
    """Yield every symbol name referenced by ``node`` (with repeats)."""
    if isinstance(node, Sym):
        yield node.name
    elif isinstance(node, Neg):
        yield from symbols(node.operand)
    elif isinstance(node, BinOp):
        yield from symbols(node.left)
        yield from symbols(node.right)
    elif isinstance(node, Pow):
        yield from symbols(node.base)


def substitute(node: Expression, mapping: dict[str, Expression]) -> Expression:
    if isinstance(node, Sym):
        return mapping.get(node.name, node)
    if isinstance(node, Neg):
        return Neg(substitute(node.operand, mapping))
    if isinstance(node, BinOp):
        return BinOp(node.op, substitute(node.left, mapping), substitute(node.right, mapping))
    if isinstance(node, Pow):
        return Pow(substitute(node.base, mapping), node.exponent)
    return node


def evaluate(node: Expression, lookup: Callable[[str], object], number: Callable[[Fraction], object]):
    """Evaluate with ``lookup`` for symbols and ``number`` for literals.

    Works for any field-like value type (mpmath numbers, Fractions,
    quadratic-field elements).
    """
    if isinstance(node, Num):
        return number(node.value)
    if isinstance(node, Sym):
        return lookup(node.name)
    if isinstance(node, Neg):
        return -evaluate(node.operand, lookup, number)
    if isinstance(node, Pow):
        base = evaluate(node.base, lookup, number)
        if node.exponent < 0:
            return 1 / base ** (-node.exponent)
        return base**node.exponent
    left = evaluate(node.left, lookup, number)
    right = evaluate(node.right, lookup, number)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    return left / right


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expression) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def _num_text(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    # literals come from terminating decimals, so the denominator is 2^i 5^j
    den, twos, fives = q.denominator, 0, 0
    while den % 2 == 0:
        den, twos = den // 2, twos + 1
    while den % 5 == 0:
        den, fives = den // 5, fives + 1
    if den != 1:
        raise ValueError(f"{q} has no finite decimal expansion")
    places = max(twos, fives)
    digits = str((q * 10**places).numerator).rjust(places + 1, "0")
    return f"{digits[:-places]}.{digits[-places:]}"


def to_text(node: Expression) -> str:
    """Canonical whitespace-free spelling."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        return "-" + (f"({inner})" if _prec(node.operand) < 3 else inner)
    if isinstance(node, Pow):
        base = to_text(node.base)
        if _prec(node.base) < 5:
            base = f"({base})"
        return f"{base}^{node.exponent}"
    me = _PREC[node.op]
    left, right = to_text(node.left), to_text(node.right)
    if _prec(node.left) < me:
        left = f"({left})"
    if _prec(node.right) <= me:
        right = f"({right})"
    return f"{left}{node.op}{right}"
