"""Queries on the power series ``I · M* · F`` of a PGA: mass, coefficients, marginals,
expectations and normalisation.  All arithmetic is exact.

Coefficients are extracted with a layered dynamic program over counter
vectors.  Split ``M`` into its scalar part ``N`` and one coefficient matrix
``B_x`` per queried variable, let ``S = (I - N)^{-1}``; then the row vector of
path weights ending in each state with exactly ``c_x`` many ``x``-transitions
is ::

    row(0) = I S
    row(c) = (sum over x with c_x >= 1 of row(c - e_x) B_x) S

and the coefficient of the monomial with degrees ``c`` is ``row(c) F``.
Unqueried variables are summed out by treating their labels as scalars.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .automata import Pga, scale_initial, trim
from .errors import ZeroMassError
from .linalg import StarSolver

ZERO = Fraction(0)


@dataclass
class DistTable:
    """Finite table of (sub)probabilities over valuations of ``vars``.

    ``entries`` maps value tuples (aligned with ``vars``) to probabilities.
    ``residual`` bounds the mass outside the table.  ``rejected`` is the mass
    discarded by observations; only the path-enumeration oracle fills it in.
    """

    vars: tuple
    entries: dict = field(default_factory=dict)
    residual: Fraction = ZERO
    rejected: Fraction = ZERO

    def total(self) -> Fraction:
        return sum(self.entries.values(), ZERO)

    def get(self, valuation: Mapping[str, int]) -> Fraction:
        key = tuple(valuation.get(v, 0) for v in self.vars)
        return self.entries.get(key, ZERO)

    def items(self):
        """Entries as ``(valuation dict, probability)`` pairs, in sorted order."""
        for key in sorted(self.entries):
            yield dict(zip(self.vars, key)), self.entries[key]


class _Split:
    """Scalar/variable decomposition of a trimmed automaton for a set of queried variables.

    The solver inverts ``I - N`` where ``N`` holds the unqueried labels, or
    every label when ``star_all`` is set (all variables evaluated at 1).
    """

    def __init__(self, a: Pga, queried: Iterable[str], star_all: bool = False):
        queried = set(queried)
        self.pga = a
        scalar: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        self.coeff: dict[str, list[list[tuple[int, Fraction]]]] = {}
        for (s, v, d), w in a.transitions.items():
            if star_all or v is None or v not in queried:
                scalar[(s, d)] += w
            if v is not None and v in queried:
                rows = self.coeff.get(v)
                if rows is None:
                    rows = self.coeff[v] = [[] for _ in a.states]
                rows[s].append((d, w))
        self.solver = StarSolver(a.n_states, scalar)

    def times_coeff(self, row: Mapping[int, Fraction], var: str, into: dict):
        rows = self.coeff.get(var)
        if rows is None:
            return
        for s, x in row.items():
            for d, w in rows[s]:
                into[d] = into.get(d, ZERO) + x * w

    def dot_final(self, row: Mapping[int, Fraction]) -> Fraction:
        final = self.pga.final
        return sum((x * final[q] for q, x in row.items() if q in final), ZERO)


def total_mass(a: Pga) -> Fraction:
    """Sum of all coefficients, ``I (I - M[all vars := 1])^{-1} F``."""
    a = trim(a)
    if not a.initial:
        return ZERO
    split = _Split(a, ())
    col = split.solver.solve(a.final)
    return sum((w * col.get(q, ZERO) for q, w in a.initial.items()), ZERO)


def coefficients(a: Pga, vars: Sequence[str], targets: Iterable[tuple]) -> dict[tuple, Fraction]:
    """Coefficients for several degree vectors at once (aligned with ``vars``).

    Variables of ``a`` not in ``vars`` are marginalised.  DP rows are computed
    for the downward closure of ``targets`` one total-degree layer at a time.
    """
    vars = tuple(vars)
    targets = {tuple(t) for t in targets}
    for t in targets:
        if len(t) != len(vars) or any(x < 0 for x in t):
            raise ValueError(f"bad degree vector {t} for variables {vars}")
    a = trim(a)
    if not a.initial or not targets:
        return {t: ZERO for t in targets}

    split = _Split(a, vars)
    layers: dict[int, set] = defaultdict(set)
    todo = list(targets)
    seen = set(todo)
    while todo:
        c = todo.pop()
        layers[sum(c)].add(c)
        for i, ci in enumerate(c):
            if ci:
                lower = c[:i] + (ci - 1,) + c[i + 1 :]
                if lower not in seen:
                    seen.add(lower)
                    todo.append(lower)

    out: dict[tuple, Fraction] = {}
    prev: dict[tuple, dict] = {}
    for degree in range(max(layers) + 1):
        cur: dict[tuple, dict] = {}
        for c in sorted(layers.get(degree, ())):
            if degree == 0:
                row = split.solver.solve_row(a.initial)
            else:
                acc: dict[int, Fraction] = {}
                for i, ci in enumerate(c):
                    if ci:
                        below = prev.get(c[:i] + (ci - 1,) + c[i + 1 :])
                        if below:
                            split.times_coeff(below, vars[i], acc)
                acc = {q: x for q, x in acc.items() if x}
                row = split.solver.solve_row(acc)
            cur[c] = row
            if c in targets:
                out[c] = split.dot_final(row)
        prev = cur
    return out


def coefficient(a: Pga, valuation: Mapping[str, int]) -> Fraction:
    """Probability mass of the monomial with the given degrees.

    Variables absent from ``valuation`` are marginalised (summed over all
    their values); pass an explicit 0 to pin a variable to zero.
    """
    vars = tuple(sorted(valuation))
    key = tuple(valuation[v] for v in vars)
    return coefficients(a, vars, [key])[key]


def marginal_table(a: Pga, vars: Sequence[str], degree_bound: int) -> DistTable:
    """Joint marginal of ``vars`` for every valuation with all degrees ``<= degree_bound``."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be nonnegative")
    vars = tuple(vars)
    keys = list(product(range(degree_bound + 1), repeat=len(vars)))
    coeffs = coefficients(a, vars, keys)
    entries = {k: coeffs[k] for k in keys}
    residual = total_mass(a) - sum(entries.values(), ZERO)
    return DistTable(vars, entries, residual)


def expectation(a: Pga, x: str) -> Fraction:
    """Unnormalised expectation ``sum_v v(x) * coefficient(a, v)`` = ``I S B_x S F``."""
    a = trim(a)
    if not a.initial:
        return ZERO
    split = _Split(a, (x,), star_all=True)
    left = split.solver.solve_row(a.initial)
    right = split.solver.solve(a.final)
    mid: dict[int, Fraction] = {}
    split.times_coeff(left, x, mid)
    return sum((v * right.get(q, ZERO) for q, v in mid.items()), ZERO)


def normalize(a: Pga) -> Pga:
    """Rescale the initial weights so that the total mass becomes exactly 1."""
    z = total_mass(a)
    if z == 0:
        raise ZeroMassError("observations rejected all probability mass")
    return scale_initial(a, 1 / z)
