"""Exact Bayesian inference for loop-free discrete probabilistic programs via
probability generating automata (weighted automata whose semantics is a PGF)."""

from .analysis import (
    DistTable,
    coefficient,
    coefficients,
    expectation,
    marginal_table,
    normalize,
    total_mass,
)
from .automata import (
    Label,
    Pga,
    bernoulli_pga,
    bisim_minimize,
    concatenate,
    dirac_pga,
    duplicate_var,
    geometric_pga,
    guard_filter,
    scale_initial,
    substitute_to_one,
    trim,
    weighted_union,
)
from .errors import (
    DivergentAutomaton,
    GuardError,
    PgaError,
    ProgramSyntaxError,
    SemanticError,
    ZeroMassError,
)
from .lang import free_vars, parse
from .linalg import star_solve
from .oracle import compare, cross_check, enumerate_paths
from .semantics import TransformerConfig, infer, initial_pga, posterior, transform

__all__ = [
    "DistTable",
    "coefficient",
    "coefficients",
    "expectation",
    "marginal_table",
    "normalize",
    "total_mass",
    "Label",
    "Pga",
    "bernoulli_pga",
    "bisim_minimize",
    "concatenate",
    "dirac_pga",
    "duplicate_var",
    "geometric_pga",
    "guard_filter",
    "scale_initial",
    "substitute_to_one",
    "trim",
    "weighted_union",
    "DivergentAutomaton",
    "GuardError",
    "PgaError",
    "ProgramSyntaxError",
    "SemanticError",
    "ZeroMassError",
    "free_vars",
    "parse",
    "star_solve",
    "compare",
    "cross_check",
    "enumerate_paths",
    "TransformerConfig",
    "infer",
    "initial_pga",
    "posterior",
    "transform",
]

__version__ = "0.1.0"
