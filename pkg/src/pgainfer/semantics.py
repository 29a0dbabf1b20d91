"""Program semantics as PGA transformers.

Each statement maps the automaton of the distribution before it to the
automaton of the distribution after it.  Assigning a constant resets the
variable by substituting its labels to 1 and then appends a Dirac chain;
branching filters the input through the guard and its negation and unions the
two transformed halves; ``observe`` is a filter.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from . import automata as au
from .analysis import normalize
from .automata import Pga
from .lang.syntax import (
    Assign,
    Bernoulli,
    Const,
    Geometric,
    IfElse,
    Not,
    Observe,
    Program,
    Skip,
    Var,
    VarPlus,
    free_vars,
)


@dataclass(frozen=True)
class TransformerConfig:
    auto_trim: bool = True
    minimize: bool = False


DEFAULT_CONFIG = TransformerConfig()


def initial_pga(vars: Iterable[str] = ()) -> Pga:
    """The all-zero prior: one state with initial and final weight 1."""
    return au.Pga(1, (), {0: 1}, {0: 1})


def _assign(s: Assign, a: Pga) -> Pga:
    x, rhs = s.var, s.rhs
    if isinstance(rhs, VarPlus) and rhs.name == x:
        return au.concatenate(a, au.dirac_pga(x, rhs.offset)) if rhs.offset else a
    if isinstance(rhs, Var) and rhs.name == x:
        return a
    reset = au.substitute_to_one(a, x)
    if isinstance(rhs, Const):
        return au.concatenate(reset, au.dirac_pga(x, rhs.value))
    if isinstance(rhs, Var):
        return au.duplicate_var(reset, rhs.name, x)
    if isinstance(rhs, VarPlus):
        copied = au.duplicate_var(reset, rhs.name, x)
        return au.concatenate(copied, au.dirac_pga(x, rhs.offset)) if rhs.offset else copied
    if isinstance(rhs, Bernoulli):
        return au.concatenate(reset, au.bernoulli_pga(x, rhs.p))
    if isinstance(rhs, Geometric):
        return au.concatenate(reset, au.geometric_pga(x, rhs.p))
    raise TypeError(f"unknown right-hand side {rhs!r}")


def transform(s, a: Pga, cfg: TransformerConfig = DEFAULT_CONFIG) -> Pga:
    if isinstance(s, Skip):
        return a
    if isinstance(s, Assign):
        out = _assign(s, a)
    elif isinstance(s, Observe):
        out = au.guard_filter(a, s.guard)
    elif isinstance(s, IfElse):
        yes = transform_all(s.then, au.guard_filter(a, s.guard), cfg)
        no = transform_all(s.orelse, au.guard_filter(a, Not(s.guard)), cfg)
        out = au.weighted_union(yes, no, 1, 1)
    else:
        raise TypeError(f"unknown statement {s!r}")
    if cfg.auto_trim:
        out = au.trim(out)
    if cfg.minimize:
        out = au.bisim_minimize(out)
    return out


def transform_all(stmts: Iterable, a: Pga, cfg: TransformerConfig = DEFAULT_CONFIG) -> Pga:
    for s in stmts:
        a = transform(s, a, cfg)
    return a


def infer(p: Program, cfg: TransformerConfig = DEFAULT_CONFIG) -> Pga:
    """Unnormalised posterior PGA of ``p`` started from the all-zero prior."""
    return transform_all(p.stmts, initial_pga(free_vars(p)), cfg)


def posterior(p: Program, cfg: TransformerConfig = DEFAULT_CONFIG) -> Pga:
    """Normalised posterior PGA; raises ZeroMassError if every run is rejected."""
    return normalize(infer(p, cfg))
