from .parser import parse, parse_guard, tokenize
from .syntax import (
    And,
    Assign,
    Atom,
    Bernoulli,
    Const,
    Geometric,
    Guard,
    IfElse,
    Not,
    Observe,
    Or,
    Program,
    Skip,
    TrueGuard,
    Var,
    VarPlus,
    evaluate,
    format_guard,
    format_program,
    free_vars,
    guard_bounds,
)

__all__ = [
    "parse",
    "parse_guard",
    "tokenize",
    "And",
    "Assign",
    "Atom",
    "Bernoulli",
    "Const",
    "Geometric",
    "Guard",
    "IfElse",
    "Not",
    "Observe",
    "Or",
    "Program",
    "Skip",
    "TrueGuard",
    "Var",
    "VarPlus",
    "evaluate",
    "format_guard",
    "format_program",
    "free_vars",
    "guard_bounds",
]
