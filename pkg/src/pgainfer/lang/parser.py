"""Lexer and recursive-descent parser.

Grammar::

    program := stmt (";" stmt)* [";"]
    stmt    := "skip" | ident ":=" rhs
             | "if" "(" guard ")" block "else" block
             | "observe" "(" guard ")"
    block   := "{" program "}"
    rhs     := nat | ident | ident "+" nat
             | "bernoulli" "(" prob ")" | "geometric" "(" prob ")"
    guard   := conj ("||" conj)*
    conj    := atom ("&&" atom)*
    atom    := "!" atom | "(" guard ")" | "true" | ident cmp nat
    prob    := nat "/" nat | decimal

``#`` starts a comment that runs to the end of the line. ``bern`` is accepted
as a short spelling of ``bernoulli``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ProgramSyntaxError, SemanticError
from .syntax import (
    And,
    Assign,
    Atom,
    Bernoulli,
    Const,
    Geometric,
    IfElse,
    Not,
    Observe,
    Or,
    Program,
    Skip,
    TrueGuard,
    Var,
    VarPlus,
)

KEYWORDS = {"skip", "if", "else", "observe", "bernoulli", "bern", "geometric", "true"}
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<decimal>[0-9]+\.[0-9]+)
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<sym>:=|\|\||&&|!=|<=|>=|[;(){}+/=<>!])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "nat", "decimal", "ident", "kw", "sym" or "eof"
    text: str
    line: int
    column: int

    def describe(self):
        return "end of input" if self.kind == "eof" else repr(self.text)


def tokenize(source: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ProgramSyntaxError(
                f"unexpected character {source[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        text = m.group()
        if kind == "newline":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.current
        return tok.kind in ("sym", "kw") and tok.text == text

    def error(self, expected) -> ProgramSyntaxError:
        tok = self.current
        return ProgramSyntaxError(f"unexpected {tok.describe()}", tok.line, tok.column, expected)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error([repr(text)])
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            raise self.error([what])
        return self.advance()

    # program := stmt (";" stmt)* [";"]
    def program(self, terminator: str | None = None) -> Program:
        stmts = [self.stmt()]
        while self.at(";"):
            self.advance()
            if self.current.kind == "eof" or (terminator and self.at(terminator)):
                break
            stmts.append(self.stmt())
        return Program(tuple(stmts))

    def parse(self) -> Program:
        prog = self.program()
        if self.current.kind != "eof":
            raise self.error(["';'", "end of input"])
        return prog

    def stmt(self):
        tok = self.current
        if self.at("skip"):
            self.advance()
            return Skip()
        if self.at("if"):
            self.advance()
            self.expect("(")
            g = self.guard()
            self.expect(")")
            then = self.block()
            self.expect("else")
            orelse = self.block()
            return IfElse(g, then, orelse)
        if self.at("observe"):
            self.advance()
            self.expect("(")
            g = self.guard()
            self.expect(")")
            return Observe(g)
        if tok.kind == "ident":
            self.advance()
            self.expect(":=")
            return Assign(tok.text, self.rhs())
        raise self.error(["'skip'", "'if'", "'observe'", "identifier"])

    def block(self) -> tuple:
        self.expect("{")
        prog = self.program(terminator="}")
        self.expect("}")
        return prog.stmts

    def rhs(self):
        tok = self.current
        if tok.kind == "nat":
            self.advance()
            return Const(int(tok.text))
        if tok.kind == "ident":
            self.advance()
            if self.at("+"):
                self.advance()
                n = self.expect_kind("nat", "natural number")
                return VarPlus(tok.text, int(n.text))
            return Var(tok.text)
        if self.at("bernoulli") or self.at("bern"):
            self.advance()
            return Bernoulli(self.prob_arg(tok, upper_inclusive=True))
        if self.at("geometric"):
            self.advance()
            return Geometric(self.prob_arg(tok, upper_inclusive=False))
        raise self.error(["natural number", "identifier", "'bernoulli'", "'geometric'"])

    def prob_arg(self, where: Token, upper_inclusive: bool) -> Fraction:
        self.expect("(")
        start = self.current
        p = self.prob()
        self.expect(")")
        if p > 1 or (p == 1 and not upper_inclusive):
            bound = "[0, 1]" if upper_inclusive else "[0, 1)"
            raise SemanticError(
                f"{where.text} parameter {p} outside {bound}", start.line, start.column
            )
        return p

    def prob(self) -> Fraction:
        tok = self.current
        if tok.kind == "decimal":
            self.advance()
            return Fraction(tok.text)
        if tok.kind == "nat":
            self.advance()
            if not self.at("/"):
                return Fraction(int(tok.text))
            self.advance()
            den = self.expect_kind("nat", "natural number")
            if int(den.text) == 0:
                raise SemanticError("zero denominator", den.line, den.column)
            return Fraction(int(tok.text), int(den.text))
        raise self.error(["probability literal"])

    def guard(self):
        args = [self.conj()]
        while self.at("||"):
            self.advance()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.atom()]
        while self.at("&&"):
            self.advance()
            args.append(self.atom())
        return args[0] if len(args) == 1 else And(tuple(args))

    def atom(self):
        tok = self.current
        if self.at("!"):
            self.advance()
            return Not(self.atom())
        if self.at("("):
            self.advance()
            g = self.guard()
            self.expect(")")
            return g
        if self.at("true"):
            self.advance()
            return TrueGuard()
        if tok.kind == "ident":
            self.advance()
            op = self.current
            if not (op.kind == "sym" and op.text in CMP_OPS):
                raise self.error([repr(c) for c in CMP_OPS])
            self.advance()
            if self.current.kind == "ident":
                raise ProgramSyntaxError(
                    "guards may only compare a variable to a constant",
                    self.current.line,
                    self.current.column,
                    ["natural number"],
                )
            n = self.expect_kind("nat", "natural number")
            return Atom(tok.text, op.text, int(n.text))
        raise self.error(["'!'", "'('", "'true'", "identifier"])


def parse(source: str) -> Program:
    """Parse program text into a :class:`Program`.

    Raises :class:`ProgramSyntaxError` for malformed text and
    :class:`SemanticError` for out-of-range probability literals.
    """
    return Parser(source).parse()


def parse_guard(source: str):
    """Parse a standalone guard expression, e.g. ``"X <= 2 && Y = 0"``."""
    p = Parser(source)
    g = p.guard()
    if p.current.kind != "eof":
        raise p.error(["'&&'", "'||'", "end of input"])
    return g
