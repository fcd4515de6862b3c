"""Tokenizer and recursive-descent parser for the scalar expression grammar.

Grammar (see docs/expr-grammar.md for the EBNF):

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := '-' unary | power
    power    := atom ('^' exponent)?
    exponent := '-' exponent | power
    atom     := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

``pi``, ``hbar`` and ``I`` are constants; any other identifier is a free
symbol unless followed by '(' (then it must be a known function).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import BinOp, Const, Expr, ExprError, Func, FUNCTIONS, Neg, Num, Sym

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)

_CONSTANT_TOKENS = {"pi": "pi", "hbar": "hbar", "I": "i"}


class ExprSyntaxError(ExprError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunction(ExprError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown function {name!r} (at offset {offset})")
        self.name = name
        self.offset = offset


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok is None or tok.kind != "op" or tok.text != op:
            offset = tok.offset if tok else len(self.text)
            raise ExprSyntaxError(f"expected {op!r}", offset)
        self.pos += 1

    def at_op(self, ops: str) -> str | None:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text in ops:
            return tok.text
        return None

    def parse(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ExprSyntaxError(f"trailing input {tok.text!r}", tok.offset)
        return node

    def expr(self) -> Expr:
        node = self.term()
        while (op := self.at_op("+-")) is not None:
            self.advance()
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while (op := self.at_op("*/")) is not None:
            self.advance()
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.at_op("^"):
            self.advance()
            return BinOp("^", base, self.exponent())
        return base

    def exponent(self) -> Expr:
        if self.at_op("-"):
            self.advance()
            return Neg(self.exponent())
        return self.power()

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "number":
            return Num(float(tok.text))
        if tok.kind == "ident":
            if self.at_op("("):
                if tok.text not in FUNCTIONS:
                    raise UnknownFunction(tok.text, tok.offset)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Func(tok.text, arg)
            if tok.text in _CONSTANT_TOKENS:
                return Const(_CONSTANT_TOKENS[tok.text])
            return Sym(tok.text)
        if tok.kind == "op" and tok.text == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        raise ExprSyntaxError(f"unexpected token {tok.text!r}", tok.offset)


def parse_expr(text: str) -> Expr:
    """Parse expression text into an AST; whitespace-insensitive."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(text).parse()
