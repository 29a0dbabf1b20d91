"""AST of the loop-free probabilistic language, plus guard evaluation and a pretty-printer.

Programs are sequences of statements over natural-valued variables::

    P := bernoulli(1/2);
    if (P = 1) { R := 1 } else { R := bernoulli(1/2) };
    observe(R = 1)

Guards are rectangular: every atom compares one variable to a natural constant.
All nodes are frozen dataclasses, so ASTs compare structurally and can be hashed.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from ..errors import GuardError

# --- right-hand sides -------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class VarPlus:
    name: str
    offset: int


@dataclass(frozen=True)
class Bernoulli:
    p: Fraction


@dataclass(frozen=True)
class Geometric:
    """Number of successes before the first failure; success probability ``p``."""

    p: Fraction


Rhs = Union[Const, Var, VarPlus, Bernoulli, Geometric]

# --- guards -----------------------------------------------------------------

COMPARATORS = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


@dataclass(frozen=True)
class TrueGuard:
    pass


@dataclass(frozen=True)
class Atom:
    var: str
    op: str
    const: int

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise GuardError(f"unknown comparison operator {self.op!r}")
        if not isinstance(self.const, int) or isinstance(self.const, bool) or self.const < 0:
            raise GuardError(
                f"guard atom {self.var} {self.op} {self.const!r} must compare against a natural constant"
            )


@dataclass(frozen=True)
class Not:
    arg: Guard


@dataclass(frozen=True)
class And:
    args: tuple


@dataclass(frozen=True)
class Or:
    args: tuple


Guard = Union[TrueGuard, Atom, Not, And, Or]


def evaluate(guard: Guard, valuation: Mapping[str, int]) -> bool:
    """Evaluate ``guard``; variables missing from ``valuation`` read as 0."""
    if isinstance(guard, TrueGuard):
        return True
    if isinstance(guard, Atom):
        return COMPARATORS[guard.op](valuation.get(guard.var, 0), guard.const)
    if isinstance(guard, Not):
        return not evaluate(guard.arg, valuation)
    if isinstance(guard, And):
        return all(evaluate(g, valuation) for g in guard.args)
    if isinstance(guard, Or):
        return any(evaluate(g, valuation) for g in guard.args)
    raise GuardError(f"not a rectangular guard: {guard!r}")


def guard_bounds(guard: Guard) -> dict[str, int]:
    """Map each variable in ``guard`` to the largest constant it is compared with."""
    bounds: dict[str, int] = {}

    def visit(g):
        if isinstance(g, TrueGuard):
            return
        if isinstance(g, Atom):
            bounds[g.var] = max(bounds.get(g.var, 0), g.const)
        elif isinstance(g, Not):
            visit(g.arg)
        elif isinstance(g, (And, Or)):
            for sub in g.args:
                visit(sub)
        else:
            raise GuardError(f"not a rectangular guard: {g!r}")

    visit(guard)
    return bounds


# --- statements -------------------------------------------------------------


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    rhs: Rhs


@dataclass(frozen=True)
class IfElse:
    guard: Guard
    then: tuple
    orelse: tuple


@dataclass(frozen=True)
class Observe:
    guard: Guard


Stmt = Union[Skip, Assign, IfElse, Observe]


@dataclass(frozen=True)
class Program:
    stmts: tuple

    def __iter__(self):
        return iter(self.stmts)


def free_vars(program: Program) -> tuple[str, ...]:
    """All variables read or written anywhere in ``program``, sorted."""
    names: set[str] = set()

    def visit_stmts(stmts):
        for s in stmts:
            if isinstance(s, Assign):
                names.add(s.var)
                if isinstance(s.rhs, (Var, VarPlus)):
                    names.add(s.rhs.name)
            elif isinstance(s, IfElse):
                names.update(guard_bounds(s.guard))
                visit_stmts(s.then)
                visit_stmts(s.orelse)
            elif isinstance(s, Observe):
                names.update(guard_bounds(s.guard))

    visit_stmts(program.stmts)
    return tuple(sorted(names))


# --- pretty-printing ----------------------------------------------------------


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_prob(p: Fraction) -> str:
    return f"{p.numerator}/{p.denominator}"


def format_rhs(rhs: Rhs) -> str:
    if isinstance(rhs, Const):
        return str(rhs.value)
    if isinstance(rhs, Var):
        return rhs.name
    if isinstance(rhs, VarPlus):
        return f"{rhs.name} + {rhs.offset}"
    if isinstance(rhs, Bernoulli):
        return f"bernoulli({format_prob(rhs.p)})"
    if isinstance(rhs, Geometric):
        return f"geometric({format_prob(rhs.p)})"
    raise TypeError(rhs)


def format_guard(guard: Guard) -> str:
    if isinstance(guard, And):
        return " && ".join(_format_guard_operand(g) for g in guard.args)
    if isinstance(guard, Or):
        return " || ".join(_format_guard_operand(g) for g in guard.args)
    return _format_guard_operand(guard)


def _format_guard_operand(guard: Guard) -> str:
    if isinstance(guard, TrueGuard):
        return "true"
    if isinstance(guard, Atom):
        return f"{guard.var} {guard.op} {guard.const}"
    if isinstance(guard, Not):
        return "!" + _format_guard_operand(guard.arg)
    # nested connectives are always parenthesised so re-parsing keeps the tree shape
    return "(" + format_guard(guard) + ")"


def format_program(program: Program, indent: str = "") -> str:
    lines = []
    stmts = program.stmts
    for i, s in enumerate(stmts):
        sep = ";" if i < len(stmts) - 1 else ""
        lines.append(_format_stmt(s, indent) + sep)
    return "\n".join(lines)


def _format_stmt(s: Stmt, indent: str) -> str:
    if isinstance(s, Skip):
        return indent + "skip"
    if isinstance(s, Assign):
        return f"{indent}{s.var} := {format_rhs(s.rhs)}"
    if isinstance(s, Observe):
        return f"{indent}observe({format_guard(s.guard)})"
    if isinstance(s, IfElse):
        inner = indent + "    "
        return (
            f"{indent}if ({format_guard(s.guard)}) {{\n"
            f"{format_program(Program(s.then), inner)}\n"
            f"{indent}}} else {{\n"
            f"{format_program(Program(s.orelse), inner)}\n"
            f"{indent}}}"
        )
    raise TypeError(s)
