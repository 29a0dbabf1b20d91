"""Reference semantics by exhaustive path enumeration.

Runs the program's operational semantics directly on concrete valuations:
Bernoulli choices branch in two, geometric choices branch into ``0, 1, 2, ...``
until the remaining tail is below a budget, and ``observe`` drops
configurations that violate its guard.  Nothing here touches automata, so it
serves as an independent check of the PGA pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .analysis import DistTable, coefficients, total_mass
from .lang.syntax import (
    Assign,
    Bernoulli,
    Const,
    Geometric,
    IfElse,
    Observe,
    Program,
    Skip,
    Var,
    VarPlus,
    evaluate,
    free_vars,
)

ZERO = Fraction(0)


def count_geometric(stmts) -> int:
    n = 0
    for s in stmts:
        if isinstance(s, Assign) and isinstance(s.rhs, Geometric):
            n += 1
        elif isinstance(s, IfElse):
            n += count_geometric(s.then) + count_geometric(s.orelse)
    return n


def enumerate_paths(p: Program, epsilon) -> DistTable:
    """Unnormalised posterior table of ``p`` by depth-first path enumeration.

    Each geometric sampling site expands values ``0..k`` for the least ``k``
    with ``q^(k+1) < epsilon / G`` (``G`` = number of geometric statements),
    so the truncated mass is at most ``epsilon`` overall.  The exact truncated
    mass is returned as ``residual`` and the mass removed by observations as
    ``rejected``; entries + residual + rejected == 1.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    names = free_vars(p)
    budget = epsilon / max(count_geometric(p.stmts), 1)
    entries: dict[tuple, Fraction] = {}
    residual = ZERO
    rejected = ZERO

    stack = [(tuple(p.stmts), dict.fromkeys(names, 0), Fraction(1))]
    while stack:
        rest, val, mass = stack.pop()
        if not rest:
            key = tuple(val[v] for v in names)
            entries[key] = entries.get(key, ZERO) + mass
            continue
        s, rest = rest[0], rest[1:]
        if isinstance(s, Skip):
            stack.append((rest, val, mass))
        elif isinstance(s, Observe):
            if evaluate(s.guard, val):
                stack.append((rest, val, mass))
            else:
                rejected += mass
        elif isinstance(s, IfElse):
            branch = s.then if evaluate(s.guard, val) else s.orelse
            stack.append((tuple(branch) + rest, val, mass))
        elif isinstance(s, Assign):
            rhs = s.rhs
            if isinstance(rhs, Const):
                stack.append((rest, {**val, s.var: rhs.value}, mass))
            elif isinstance(rhs, Var):
                stack.append((rest, {**val, s.var: val[rhs.name]}, mass))
            elif isinstance(rhs, VarPlus):
                stack.append((rest, {**val, s.var: val[rhs.name] + rhs.offset}, mass))
            elif isinstance(rhs, Bernoulli):
                for value, w in ((1, rhs.p), (0, 1 - rhs.p)):
                    if w:
                        stack.append((rest, {**val, s.var: value}, mass * w))
            elif isinstance(rhs, Geometric):
                q = rhs.p
                tail = Fraction(1)  # q^i
                i = 0
                while True:
                    if tail * (1 - q):
                        stack.append((rest, {**val, s.var: i}, mass * tail * (1 - q)))
                    tail *= q
                    i += 1
                    if tail < budget:
                        break
                residual += mass * tail
            else:
                raise TypeError(f"unknown right-hand side {rhs!r}")
        else:
            raise TypeError(f"unknown statement {s!r}")
    return DistTable(names, entries, residual, rejected)


@dataclass
class Violation:
    valuation: Optional[dict]
    pga: Fraction
    oracle: Fraction
    allowed: Fraction

    def __str__(self):
        where = "total mass" if self.valuation is None else ", ".join(
            f"{k}={v}" for k, v in self.valuation.items()
        )
        return f"{where}: pga={self.pga} oracle={self.oracle} allowed deviation={self.allowed}"


@dataclass
class ComparisonReport:
    violations: list = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _canonical(vars, key) -> tuple:
    return tuple(sorted((v, x) for v, x in zip(vars, key) if x))


def compare(pga_table: DistTable, oracle_table: DistTable, tol=0) -> ComparisonReport:
    """Pointwise check ``|pga - oracle| <= oracle.residual + tol`` over both tables' keys."""
    tol = Fraction(tol)
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    left = {_canonical(pga_table.vars, k): w for k, w in pga_table.entries.items()}
    right = {_canonical(oracle_table.vars, k): w for k, w in oracle_table.entries.items()}
    allowed = oracle_table.residual + tol
    report = ComparisonReport()
    for key in sorted(set(left) | set(right)):
        a, b = left.get(key, ZERO), right.get(key, ZERO)
        report.checked += 1
        if abs(a - b) > allowed:
            report.violations.append(Violation(dict(key), a, b, allowed))
    return report


def cross_check(pga, p: Program, epsilon, tol=0) -> ComparisonReport:
    """Compare the unnormalised posterior ``pga`` of ``p`` against path enumeration.

    The PGA is evaluated on every valuation the oracle reached.  Besides the
    pointwise comparison, the PGA's total mass must exceed the oracle's table
    total by no more than the oracle's residual (mass the PGA puts outside the
    oracle's support is caught this way).
    """
    oracle_table = enumerate_paths(p, epsilon)
    names = oracle_table.vars
    coeffs = coefficients(pga, names, oracle_table.entries)
    pga_table = DistTable(names, coeffs)
    report = compare(pga_table, oracle_table, tol)
    mass = total_mass(pga)
    gap = mass - oracle_table.total()
    allowed = oracle_table.residual + Fraction(tol)
    report.checked += 1
    if not -Fraction(tol) <= gap <= allowed:
        report.violations.append(Violation(None, mass, oracle_table.total(), allowed))
    return report
