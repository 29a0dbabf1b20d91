"""Exact rational solves against ``I - N`` for entrywise-nonnegative ``N``.

``N*`` (the Neumann series ``sum_i N^i``) converges iff ``I - N`` is a
nonsingular M-matrix, i.e. iff it is invertible with a nonnegative inverse.
For a Z-matrix this is equivalent to every leading principal minor being
positive, which is exactly "every pivot of Gaussian elimination without row
exchanges is positive".  :class:`StarSolver` factors ``I - N`` that way and
raises :class:`DivergentAutomaton` at the first non-positive pivot.

Rows are kept as sparse dicts: automata produced from programs are close to
acyclic, and elimination in state order then creates little fill-in.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DivergentAutomaton

ZERO = Fraction(0)

RationalMatrix = Sequence[Sequence[Fraction]]
RationalVector = Sequence[Fraction]


class StarSolver:
    """LU factorisation of ``I - N`` given the nonzero entries ``{(i, j): N[i][j]}``."""

    def __init__(self, n: int, entries: Mapping[tuple[int, int], Fraction]):
        self.n = n
        rows: list[dict[int, Fraction]] = [{i: Fraction(1)} for i in range(n)]
        for (i, j), w in entries.items():
            if w < 0:
                raise ValueError(f"negative matrix entry at ({i}, {j})")
            if w:
                v = rows[i].get(j, ZERO) - w
                if v:
                    rows[i][j] = v
                else:
                    del rows[i][j]
        cols: list[set[int]] = [set() for _ in range(n)]
        for i, row in enumerate(rows):
            for j in row:
                if j < i:
                    cols[j].add(i)

        lower: list[dict[int, Fraction]] = [{} for _ in range(n)]
        for k in range(n):
            pivot_row = rows[k]
            pivot = pivot_row.get(k, ZERO)
            if pivot <= 0:
                raise DivergentAutomaton(
                    f"I - N is not a nonsingular M-matrix (pivot {pivot} at index {k}); "
                    "the star of the scalar transitions diverges"
                )
            tail = [(j, v) for j, v in pivot_row.items() if j > k]
            for i in sorted(cols[k]):
                row = rows[i]
                factor = row.pop(k) / pivot
                lower[i][k] = factor
                for j, v in tail:
                    nv = row.get(j, ZERO) - factor * v
                    if nv:
                        row[j] = nv
                        if j < i:
                            cols[j].add(i)
                    elif j in row:
                        del row[j]
                        cols[j].discard(i)
            cols[k].clear()
        self.upper = rows
        self.lower = lower

    def solve(self, b: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Column solve: ``(I - N)^{-1} b`` (i.e. ``N* b``) for a sparse ``b``."""
        y: dict[int, Fraction] = {}
        for i in range(self.n):
            acc = b.get(i, ZERO)
            for k, l in self.lower[i].items():
                yk = y.get(k)
                if yk:
                    acc -= l * yk
            if acc:
                y[i] = acc
        z: dict[int, Fraction] = {}
        for i in range(self.n - 1, -1, -1):
            row = self.upper[i]
            acc = y.get(i, ZERO)
            for j, u in row.items():
                if j > i:
                    zj = z.get(j)
                    if zj:
                        acc -= u * zj
            if acc:
                z[i] = acc / row[i]
        return z

    def solve_row(self, b: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Row solve: ``b (I - N)^{-1}`` (i.e. ``b N*``) for a sparse row vector ``b``."""
        if not b:
            return {}
        acc = dict(b)
        w: dict[int, Fraction] = {}
        for i in range(min(acc), self.n):
            a = acc.pop(i, None)
            if not a:
                continue
            row = self.upper[i]
            wi = a / row[i]
            w[i] = wi
            for j, u in row.items():
                if j > i:
                    acc[j] = acc.get(j, ZERO) - wi * u
        z: dict[int, Fraction] = {}
        acc = w
        for i in range(max(acc, default=-1), -1, -1):
            zi = acc.pop(i, None)
            if not zi:
                continue
            z[i] = zi
            for k, l in self.lower[i].items():
                acc[k] = acc.get(k, ZERO) - zi * l
        return z


def star_solve(n: RationalMatrix, rhs: RationalVector) -> list[Fraction]:
    """Return ``(I - n)^{-1} rhs`` exactly, for an entrywise-nonnegative square ``n``.

    Raises :class:`DivergentAutomaton` if ``sum_i n^i`` does not converge.
    """
    size = len(n)
    if any(len(row) != size for row in n) or len(rhs) != size:
        raise ValueError("star_solve needs a square matrix and a matching vector")
    entries = {
        (i, j): Fraction(v) for i, row in enumerate(n) for j, v in enumerate(row) if v
    }
    solver = StarSolver(size, entries)
    sol = solver.solve({i: Fraction(v) for i, v in enumerate(rhs) if v})
    return [sol.get(i, ZERO) for i in range(size)]
