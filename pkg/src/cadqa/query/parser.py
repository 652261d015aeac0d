"""Tokenizer and recursive-descent parser for the query DSL.

program := stmt+
stmt    := "let" IDENT "=" expr ";" | "solution" "=" expr ";"
expr    := additive (CMP additive)?
additive := multiplicative (("+"|"-") multiplicative)*
multiplicative := unary (("*"|"/") unary)*
unary   := "-" unary | primary
primary := NUMBER | STRING | IDENT | IDENT "(" args ")" | "(" expr ")" | "[" ... "]"
args    := (IDENT "=" expr | IDENT "->" expr | expr) ("," ...)*

A bracket list whose elements are all bare side names (top, bottom, left,
right, front, back) is a sides literal. Lambdas appear only as call
arguments. Parsing also enforces the static program invariants: exactly
one solution assignment and no use before definition.
"""

from __future__ import annotations

import re

from ..errors import QuerySyntaxError
from .ast import (
    Assign,
    BinOp,
    Call,
    Lambda,
    ListLit,
    Name,
    Neg,
    Num,
    Program,
    SidesList,
    Span,
    Str,
)

SIDE_NAMES = ("top", "bottom", "left", "right", "front", "back")

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+(\.\d*)?([eE][+-]?\d+)?|\.\d+([eE][+-]?\d+)?)
  | (?P<string>"(\\.|[^"\\])*")
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|<=|>=|==|!=|[-+*/<>=;,()\[\]])
""", re.VERBOSE)

_COMPARISONS = ("<", "<=", ">", ">=", "==", "!=")


class _Token:
    __slots__ = ("kind", "text", "line", "column")

    def __init__(self, kind, text, line, column):
        self.kind = kind
        self.text = text
        self.line = line
        self.column = column

    @property
    def span(self) -> Span:
        return Span(self.line, self.column)


def tokenize(source: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise QuerySyntaxError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind in ("ws", "comment"):
            newlines = text.count("\n")
            if newlines:
                line += newlines
                line_start = pos + text.rfind("\n") + 1
        else:
            tokens.append(_Token(kind, text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise QuerySyntaxError(message, tok.line, tok.column)

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text:
            shown = tok.text or "end of input"
            self.fail(f"expected {text!r}, found {shown!r}")
        return self.advance()

    def parse_program(self) -> Program:
        statements = []
        if self.peek().kind == "eof":
            self.fail("empty program")
        while self.peek().kind != "eof":
            statements.append(self.parse_statement())
        program = Program(tuple(statements))
        _check_static(program)
        return program

    def parse_statement(self) -> Assign:
        tok = self.peek()
        if tok.text == "let":
            self.advance()
            name_tok = self.peek()
            if name_tok.kind != "ident":
                self.fail("expected a name after 'let'")
            if name_tok.text in ("let", "solution"):
                self.fail(f"{name_tok.text!r} is reserved", name_tok)
            self.advance()
            self.expect("=")
            expr = self.parse_expr()
            self.expect(";")
            return Assign(name_tok.text, expr, span=tok.span)
        if tok.text == "solution":
            self.advance()
            self.expect("=")
            expr = self.parse_expr()
            self.expect(";")
            return Assign("solution", expr, span=tok.span)
        self.fail("expected 'let' or 'solution'")

    def parse_expr(self):
        left = self.parse_additive()
        if self.peek().text in _COMPARISONS:
            op = self.advance()
            right = self.parse_additive()
            return BinOp(op.text, left, right, span=op.span)
        return left

    def parse_additive(self):
        left = self.parse_multiplicative()
        while self.peek().text in ("+", "-"):
            op = self.advance()
            right = self.parse_multiplicative()
            left = BinOp(op.text, left, right, span=op.span)
        return left

    def parse_multiplicative(self):
        left = self.parse_unary()
        while self.peek().text in ("*", "/"):
            op = self.advance()
            right = self.parse_unary()
            left = BinOp(op.text, left, right, span=op.span)
        return left

    def parse_unary(self):
        tok = self.peek()
        if tok.text == "-":
            self.advance()
            return Neg(self.parse_unary(), span=tok.span)
        return self.parse_primary()

    def parse_primary(self):
        tok = self.peek()
        if tok.kind == "number":
            self.advance()
            return Num(float(tok.text), span=tok.span)
        if tok.kind == "string":
            self.advance()
            body = tok.text[1:-1]
            value = body.replace('\\"', '"').replace("\\\\", "\\")
            return Str(value, span=tok.span)
        if tok.text == "(":
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if tok.text == "[":
            return self.parse_list()
        if tok.kind == "ident":
            self.advance()
            if self.peek().text == "(":
                return self.parse_call(tok)
            return Name(tok.text, span=tok.span)
        shown = tok.text or "end of input"
        self.fail(f"expected an expression, found {shown!r}")

    def parse_list(self):
        open_tok = self.expect("[")
        items = []
        if self.peek().text != "]":
            items.append(self.parse_expr())
            while self.peek().text == ",":
                self.advance()
                items.append(self.parse_expr())
        self.expect("]")
        if items and all(isinstance(i, Name) and i.ident in SIDE_NAMES for i in items):
            return SidesList(tuple(i.ident for i in items), span=open_tok.span)
        return ListLit(tuple(items), span=open_tok.span)

    def parse_call(self, name_tok: _Token) -> Call:
        self.expect("(")
        args: list = []
        kwargs: list[tuple[str, object]] = []
        if self.peek().text != ")":
            self.parse_argument(args, kwargs)
            while self.peek().text == ",":
                self.advance()
                self.parse_argument(args, kwargs)
        self.expect(")")
        return Call(name_tok.text, tuple(args), tuple(kwargs), span=name_tok.span)

    def parse_argument(self, args: list, kwargs: list):
        tok = self.peek()
        if tok.kind == "ident":
            nxt = self.tokens[self.pos + 1]
            if nxt.text == "->":
                self.advance()
                self.advance()
                body = self.parse_expr()
                args.append(Lambda(tok.text, body, span=tok.span))
                return
            if nxt.text == "=":
                self.advance()
                self.advance()
                value = self.parse_expr()
                kwargs.append((tok.text, value))
                return
        if kwargs:
            self.fail("positional argument after keyword argument")
        args.append(self.parse_expr())


def _check_static(program: Program) -> None:
    solutions = [s for s in program.statements if s.is_solution]
    if not solutions:
        last = program.statements[-1]
        raise QuerySyntaxError("program never assigns 'solution'",
                               last.span.line, last.span.column)
    if len(solutions) > 1:
        dup = solutions[1]
        raise QuerySyntaxError("'solution' assigned more than once",
                               dup.span.line, dup.span.column)

    defined: set[str] = set()

    def check(node, scope: frozenset[str]):
        if isinstance(node, Name):
            if node.ident not in defined and node.ident not in scope:
                raise QuerySyntaxError(f"use of undefined name {node.ident!r}",
                                       node.span.line, node.span.column)
        elif isinstance(node, Lambda):
            check(node.body, scope | {node.param})
        elif isinstance(node, Call):
            for a in node.args:
                check(a, scope)
            for _, v in node.kwargs:
                check(v, scope)
        elif isinstance(node, BinOp):
            check(node.left, scope)
            check(node.right, scope)
        elif isinstance(node, Neg):
            check(node.operand, scope)
        elif isinstance(node, ListLit):
            for i in node.items:
                check(i, scope)
        # Num/Str/SidesList carry no names.

    for stmt in program.statements:
        check(stmt.expr, frozenset())
        defined.add(stmt.name)


def parse(source: str) -> Program:
    """Parse DSL source into a Program; raises QuerySyntaxError."""
    return _Parser(tokenize(source)).parse_program()
