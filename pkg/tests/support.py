"""Independent reference computations and random generators shared by the tests.

Nothing here calls into ``pgainfer.linalg`` or ``pgainfer.analysis``: the
reference coefficient routines expand counters into an explicit layered
automaton and invert it with a plain dense Gauss-Jordan elimination, or
enumerate paths of acyclic automata outright.
"""

import random
from collections import defaultdict
from fractions import Fraction as F
from itertools import product

from hypothesis import strategies as st

from pgainfer.automata import Label, Pga
from pgainfer.lang.syntax import (
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

PARAMS = [F(1, 4), F(1, 3), F(1, 2), F(2, 3)]


# --- dense linear algebra -----------------------------------------------------


def dense_inverse(a):
    """Gauss-Jordan inverse with partial pivoting; ``None`` if singular."""
    n = len(a)
    m = [list(map(F, row)) + [F(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]


def star_converges(n_matrix):
    """Neumann series of ``n_matrix`` converges iff ``I - N`` is invertible with nonnegative inverse."""
    size = len(n_matrix)
    inv = dense_inverse([[int(i == j) - F(n_matrix[i][j]) for j in range(size)] for i in range(size)])
    return inv is not None and all(x >= 0 for row in inv for x in row), inv


# --- reference coefficients ---------------------------------------------------


def layered_coefficients(a: Pga, vars, bound):
    """All coefficients with degrees <= ``bound`` in ``vars`` (others marginalised).

    Builds the product of ``a`` with exact counters ``0..bound`` (transitions
    that would overflow are dropped; they can only lead to larger degrees) and
    reads each coefficient off a dense inverse.
    """
    vars = tuple(vars)
    counters = list(product(range(bound + 1), repeat=len(vars)))
    index = {(q, c): i for i, (q, c) in enumerate(product(range(a.n_states), counters))}
    size = len(index)
    m = [[F(0)] * size for _ in range(size)]
    for (s, v, d), w in a.transitions.items():
        for c in counters:
            if v in vars:
                k = vars.index(v)
                if c[k] == bound:
                    continue
                c2 = c[:k] + (c[k] + 1,) + c[k + 1:]
            else:
                c2 = c
            m[index[(s, c)]][index[(d, c2)]] += w
    ok, inv = star_converges(m)
    assert ok, "reference expansion diverges"
    zero = (0,) * len(vars)
    out = {}
    for c in counters:
        total = F(0)
        for q0, wi in a.initial.items():
            row = inv[index[(q0, zero)]]
            for q, wf in a.final.items():
                total += wi * row[index[(q, c)]] * wf
        out[c] = total
    return out


def path_coefficients(a: Pga, vars):
    """Exact coefficients of an acyclic automaton by enumerating every path."""
    vars = tuple(vars)
    succ = defaultdict(list)
    for (s, v, d), w in a.transitions.items():
        succ[s].append((v, d, w))
    out = defaultdict(F)

    def walk(q, deg, weight, depth):
        assert depth <= a.n_states, "automaton has a cycle"
        if q in a.final:
            out[deg] += weight * a.final[q]
        for v, d, w in succ[q]:
            if v in vars:
                k = vars.index(v)
                nd = deg[:k] + (deg[k] + 1,) + deg[k + 1:]
            else:
                nd = deg
            walk(d, nd, weight * w, depth + 1)

    for q, w in a.initial.items():
        walk(q, (0,) * len(vars), w, 0)
    return dict(out)


def is_acyclic(a: Pga):
    indeg = [0] * a.n_states
    succ = defaultdict(set)
    for s, _, d in a.transitions:
        if d not in succ[s]:
            succ[s].add(d)
            indeg[d] += 1
    ready = [q for q in range(a.n_states) if indeg[q] == 0]
    seen = 0
    while ready:
        q = ready.pop()
        seen += 1
        for r in succ[q]:
            indeg[r] -= 1
            if indeg[r] == 0:
                ready.append(r)
    return seen == a.n_states


# --- random automata ------------------------------------------------------------

WEIGHTS = [F(1, 2), F(1, 3), F(1, 4), F(2, 3), F(1, 5), F(3, 4), F(1)]


def random_pga(rng: random.Random, vars=("X", "Y"), max_states=4, cyclic=True) -> Pga:
    """Random PGA whose rows are strictly substochastic, so every star converges."""
    n = rng.randint(1, max_states)
    trans = []
    final = {}
    for q in range(n):
        targets = range(n) if cyclic else range(q + 1, n)
        raw = []
        for d in targets:
            if rng.random() < 0.5:
                raw.append((d, rng.choice((None,) + tuple(vars)), rng.choice(WEIGHTS)))
        f = rng.choice(WEIGHTS + [F(0)])
        total = sum(w for _, _, w in raw) + f
        scale = rng.choice([F(1, 2), F(3, 4), F(9, 10)]) / total if total else F(0)
        for d, v, w in raw:
            trans.append((q, Label(w * scale, v), d))
        if f:
            final[q] = f * scale
    init_raw = {q: rng.choice(WEIGHTS) for q in range(n) if rng.random() < 0.6} or {0: F(1)}
    z = sum(init_raw.values())
    initial = {q: w / z for q, w in init_raw.items()}
    return Pga(n, trans, initial, final)


@st.composite
def pgas(draw, vars=("X", "Y"), max_states=4, cyclic=True):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_pga(random.Random(seed), vars, max_states, cyclic)


# --- random programs --------------------------------------------------------------

VARS = ("X", "Y", "Z")
CMPS = ("=", "!=", "<", "<=", ">", ">=")


class ProgramGen:
    """Random loop-free programs: <= 3 variables, nesting depth <= 4, constants <= 5."""

    def __init__(self, rng: random.Random, max_geometric=2, observe_prob=0.2, vars=VARS):
        self.rng = rng
        self.vars = vars
        self.geometric_left = max_geometric
        self.observe_prob = observe_prob

    def guard(self, depth=0):
        r = self.rng.random()
        if depth < 2 and r < 0.15:
            return Not(self.guard(depth + 1))
        if depth < 2 and r < 0.3:
            cls = And if self.rng.random() < 0.5 else Or
            return cls(tuple(self.guard(depth + 1) for _ in range(self.rng.randint(2, 3))))
        if r < 0.33:
            return TrueGuard()
        return Atom(self.rng.choice(self.vars), self.rng.choice(CMPS), self.rng.randint(0, 5))

    def rhs(self, target):
        r = self.rng.random()
        if r < 0.2:
            return Const(self.rng.randint(0, 5))
        if r < 0.3:
            return Var(self.rng.choice(self.vars))
        if r < 0.45:
            return VarPlus(self.rng.choice(self.vars), self.rng.randint(0, 5))
        if r < 0.8 or self.geometric_left == 0:
            return Bernoulli(self.rng.choice(PARAMS))
        self.geometric_left -= 1
        return Geometric(self.rng.choice(PARAMS))

    def stmt(self, depth):
        if depth < 4 and self.rng.random() < 0.2:
            return IfElse(self.guard(), self.block(depth + 1), self.block(depth + 1))
        r = self.rng.random()
        if r < self.observe_prob:
            return Observe(self.guard())
        if r < self.observe_prob + 0.05:
            return Skip()
        target = self.rng.choice(self.vars)
        return Assign(target, self.rhs(target))

    def block(self, depth, lo=1, hi=3):
        return tuple(self.stmt(depth) for _ in range(self.rng.randint(lo, hi)))

    def program(self, lo=2, hi=6):
        return Program(self.block(0, lo, hi))


def random_program(seed, **kw) -> Program:
    return ProgramGen(random.Random(seed), **kw).program()


def contains(stmts, kind):
    for s in stmts:
        if isinstance(s, kind):
            return True
        if isinstance(s, Assign) and isinstance(s.rhs, kind):
            return True
        if isinstance(s, IfElse) and (contains(s.then, kind) or contains(s.orelse, kind)):
            return True
    return False


PIRANHA = """\
P := bern(1/2);
if (P = 1) {
    R := 1
} else {
    R := bern(1/2)
};
observe(R = 1)
"""


def drawn_piranha_pga() -> Pga:
    """The normalised piranha posterior as drawn: two components with initial weight 4/3."""
    trans = [
        (0, Label(F(1, 2), "P"), 1),
        (1, Label(F(1), "R"), 2),
        (3, Label(F(1, 4), "R"), 4),
    ]
    return Pga(5, trans, {0: F(4, 3), 3: F(4, 3)}, {2: F(1), 4: F(1)})
