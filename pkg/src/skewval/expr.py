"""Expression language shared by the CLI and the config loader.

Grammar::

    expression := term (('+' | '-') term)*
    term       := unary (('*' | '/') unary)*
    unary      := '-' unary | power
    power      := atom ('^' ['-'] integer)?
    atom       := integer | name | '(' expression ')'

``*`` is kept in written order and never commuted.  ``a / b`` means
``a * b^-1`` (inverse on the right).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Union


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos}: {text!r}")


class UnknownNameError(KeyError):
    def __str__(self) -> str:
        return f"unknown generator {self.args[0]!r}"


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: int


Expr = Union[Num, Name, Neg, BinOp, Pow]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message: str):
        raise ExprSyntaxError(message, self.text, self.peek()[2])

    def expect(self, value: str):
        kind, val, _ = self.peek()
        if kind != "op" or val != value:
            self.error(f"expected {value!r}")
        self.take()

    def expression(self) -> Expr:
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "op" and self.peek()[1] == "-":
                self.take()
                sign = -1
            kind, val, _ = self.peek()
            if kind != "int":
                self.error("expected integer exponent")
            self.take()
            return Pow(base, sign * int(val))
        return base

    def atom(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "int":
            self.take()
            return Num(int(val))
        if kind == "name":
            self.take()
            return Name(val)
        if kind == "op" and val == "(":
            self.take()
            node = self.expression()
            self.expect(")")
            return node
        if kind == "end":
            self.error("unexpected end of input")
        self.error(f"unexpected token {val!r}")


def parse_expr(text: str) -> Expr:
    parser = _Parser(text)
    node = parser.expression()
    if parser.peek()[0] != "end":
        parser.error(f"unexpected token {parser.peek()[1]!r}")
    return node


def parse_list(text: str) -> list[Expr]:
    """Parse ``{e1, e2, ...}`` (braces optional) into a list of expressions."""
    body = text.strip()
    if body.startswith("{"):
        if not body.endswith("}"):
            raise ExprSyntaxError("unbalanced '{'", text, len(text))
        body = body[1:-1]
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    parts = [p for p in parts if p.strip()]
    return [parse_expr(p) for p in parts]


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _prec(node: Expr) -> int:
    if isinstance(node, BinOp):
        return _PREC[node.op]
    if isinstance(node, Neg):
        return 3
    if isinstance(node, Pow):
        return 4
    return 5


def to_string(node: Expr) -> str:
    """Print with the minimal parentheses that reparse to the same tree."""
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Neg):
        inner = to_string(node.operand)
        return "-" + (f"({inner})" if _prec(node.operand) < 3 else inner)
    if isinstance(node, Pow):
        inner = to_string(node.base)
        return (f"({inner})" if _prec(node.base) < 5 else inner) + f"^{node.exponent}"
    p = _PREC[node.op]
    left = to_string(node.left)
    right = to_string(node.right)
    if _prec(node.left) < p:
        left = f"({left})"
    if _prec(node.right) <= p:
        right = f"({right})"
    sep = f" {node.op} " if p == 1 else node.op
    return left + sep + right


def evaluate(
    node: Expr,
    names: Mapping[str, object],
    inverse: Callable[[object], object],
    scalar: Callable[[Fraction], object] = Fraction,
):
    """Evaluate ``node`` with operator overloading on the bound values.

    ``inverse`` is called for negative powers and for the right operand of '/'.
    """

    def ev(n):
        if isinstance(n, Num):
            return scalar(Fraction(n.value))
        if isinstance(n, Name):
            if n.ident not in names:
                raise UnknownNameError(n.ident)
            return names[n.ident]
        if isinstance(n, Neg):
            return -ev(n.operand)
        if isinstance(n, Pow):
            base = ev(n.base)
            e = n.exponent
            if e < 0:
                base = inverse(base)
                e = -e
            result = scalar(Fraction(1))
            while e:
                if e & 1:
                    result = result * base
                base = base * base if e > 1 else base
                e >>= 1
            return result
        left, right = ev(n.left), ev(n.right)
        if n.op == "+":
            return left + right
        if n.op == "-":
            return left - right
        if n.op == "*":
            return left * right
        return left * inverse(right)

    return ev(node)
