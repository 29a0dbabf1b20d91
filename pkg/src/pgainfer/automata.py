"""Probability generating automata and the constructions the program semantics is built from.

A PGA is a weighted automaton ``(Q, M, I, F)`` whose transition labels are
either a nonnegative rational ``r`` or ``r·X`` for a single program variable
``X``.  Read as a power series, ``I · M* · F`` is the generating function of a
(sub)distribution over the variables: taking an ``X``-transition increments
``X`` by one.

Every operation here is pure and returns a fresh automaton.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .lang.syntax import Guard, evaluate, guard_bounds

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Label:
    """Transition weight ``r`` (``var is None``) or ``r·var``."""

    weight: Fraction
    var: Optional[str] = None

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"negative label weight {self.weight}")

    def __str__(self):
        w = _fmt(self.weight)
        return w if self.var is None else f"{w}·{self.var}"


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


class Pga:
    """Weighted automaton over the power series semiring with exact rational weights.

    States are ``0 .. n_states-1``.  ``transitions`` maps ``(src, var, dst)``
    to a positive weight (``var`` is ``None`` for scalar labels), so parallel
    transitions with the same variable tag are merged on construction.
    ``initial`` and ``final`` hold the nonzero entries of ``I`` and ``F``.
    """

    __slots__ = ("n_states", "transitions", "initial", "final")

    def __init__(
        self,
        n_states: int,
        transitions: Iterable = (),
        initial: Mapping[int, Fraction] | None = None,
        final: Mapping[int, Fraction] | None = None,
    ):
        if n_states < 1:
            raise ValueError("a PGA needs at least one state")
        self.n_states = n_states
        trans: dict[tuple[int, Optional[str], int], Fraction] = {}
        for src, label, dst in transitions:
            if not isinstance(label, Label):
                label = Label(Fraction(label[0]), label[1])
            self._check_state(src)
            self._check_state(dst)
            if label.weight:
                key = (src, label.var, dst)
                trans[key] = trans.get(key, ZERO) + label.weight
        self.transitions = trans
        self.initial = self._weights(initial or {})
        self.final = self._weights(final or {})

    def _check_state(self, q):
        if not 0 <= q < self.n_states:
            raise ValueError(f"state {q} out of range 0..{self.n_states - 1}")

    def _weights(self, m):
        out = {}
        for q, w in m.items():
            self._check_state(q)
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative initial/final weight {w} at state {q}")
            if w:
                out[q] = out.get(q, ZERO) + w
        return out

    @classmethod
    def _raw(cls, n_states, transitions, initial, final):
        # trusted constructor: inputs already validated and free of zero weights
        self = object.__new__(cls)
        self.n_states = max(n_states, 1)
        self.transitions = transitions
        self.initial = initial
        self.final = final
        return self

    @property
    def states(self) -> range:
        return range(self.n_states)

    @property
    def vars(self) -> frozenset:
        return frozenset(v for (_, v, _) in self.transitions if v is not None)

    def edges(self):
        """Transitions as sorted ``(src, Label, dst)`` triples."""
        for (src, var, dst), w in sorted(self.transitions.items(), key=_edge_order):
            yield src, Label(w, var), dst

    def successors(self) -> list[list[tuple[Optional[str], int, Fraction]]]:
        out = [[] for _ in range(self.n_states)]
        for (src, var, dst), w in self.transitions.items():
            out[src].append((var, dst, w))
        return out

    def __eq__(self, other):
        if not isinstance(other, Pga):
            return NotImplemented
        return (
            self.n_states == other.n_states
            and self.transitions == other.transitions
            and self.initial == other.initial
            and self.final == other.final
        )

    def __repr__(self):
        edges = ", ".join(f"{s}-[{lab}]->{d}" for s, lab, d in self.edges())
        init = {q: _fmt(w) for q, w in sorted(self.initial.items())}
        fin = {q: _fmt(w) for q, w in sorted(self.final.items())}
        return f"Pga(n={self.n_states}, I={init}, F={fin}, edges=[{edges}])"


def _edge_order(item):
    (src, var, dst), _ = item
    return (src, dst, "" if var is None else var)


def _add(trans, key, w):
    if w:
        trans[key] = trans.get(key, ZERO) + w


def _empty() -> Pga:
    return Pga._raw(1, {}, {}, {})


# --- primitive distributions ------------------------------------------------


def dirac_pga(var: str, n: int) -> Pga:
    """Point mass ``var = n``: a chain of ``n`` transitions labelled ``1·var``."""
    if n < 0:
        raise ValueError("Dirac position must be a natural number")
    trans = {(i, var, i + 1): ONE for i in range(n)}
    return Pga._raw(n + 1, trans, {0: ONE}, {n: ONE})


def bernoulli_pga(var: str, p) -> Pga:
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"Bernoulli parameter {p} outside [0, 1]")
    return weighted_union(dirac_pga(var, 0), dirac_pga(var, 1), 1 - p, p)


def geometric_pga(var: str, p) -> Pga:
    """One state with an ``p·var`` self-loop and final weight ``1 - p``.

    Generating function ``sum_i (1-p) p^i var^i``.
    """
    p = Fraction(p)
    if not 0 <= p < 1:
        raise ValueError(f"geometric parameter {p} outside [0, 1)")
    trans = {(0, var, 0): p} if p else {}
    return Pga._raw(1, trans, {0: ONE}, {0: 1 - p})


# --- combinators --------------------------------------------------------------


def weighted_union(a: Pga, b: Pga, wa, wb) -> Pga:
    """Disjoint union with ``a``'s initial weights scaled by ``wa`` and ``b``'s by ``wb``."""
    wa, wb = Fraction(wa), Fraction(wb)
    if wa < 0 or wb < 0:
        raise ValueError("union weights must be nonnegative")
    off = a.n_states
    trans = dict(a.transitions)
    for (s, v, d), w in b.transitions.items():
        trans[(s + off, v, d + off)] = w
    initial = {q: wa * w for q, w in a.initial.items() if wa}
    initial.update({q + off: wb * w for q, w in b.initial.items() if wb})
    final = dict(a.final)
    final.update({q + off: w for q, w in b.final.items()})
    return Pga._raw(a.n_states + b.n_states, trans, initial, final)


def concatenate(a: Pga, b: Pga) -> Pga:
    """Sequential composition; the generating functions multiply.

    Each final state of ``a`` is bridged to each initial state of ``b`` by a
    scalar transition of weight ``F_a(q) * I_b(q')``.
    """
    off = a.n_states
    trans = dict(a.transitions)
    for (s, v, d), w in b.transitions.items():
        trans[(s + off, v, d + off)] = w
    for qa, f in a.final.items():
        for qb, i in b.initial.items():
            _add(trans, (qa, None, qb + off), f * i)
    final = {q + off: w for q, w in b.final.items()}
    return Pga._raw(a.n_states + b.n_states, trans, dict(a.initial), final)


def substitute_to_one(a: Pga, x: str) -> Pga:
    """Replace every label ``r·x`` by the scalar ``r`` (resets ``x`` to 0)."""
    if x not in a.vars:
        return a
    trans = {}
    for (s, v, d), w in a.transitions.items():
        _add(trans, (s, None if v == x else v, d), w)
    return Pga._raw(a.n_states, trans, dict(a.initial), dict(a.final))


def duplicate_var(a: Pga, src: str, dst: str) -> Pga:
    """Substitute ``src -> src·dst``: each ``r·src`` edge is split through a fresh state
    followed by a ``1·dst`` edge, so ``dst`` mirrors every increment of ``src``.
    """
    if dst in a.vars:
        raise ValueError(f"variable {dst!r} already occurs in the automaton")
    if src == dst:
        raise ValueError("source and destination variables must differ")
    n = a.n_states
    trans = {}
    for (s, v, d), w in a.transitions.items():
        if v == src:
            trans[(s, src, n)] = w
            trans[(n, dst, d)] = ONE
            n += 1
        else:
            trans[(s, v, d)] = w
    return Pga._raw(n, trans, dict(a.initial), dict(a.final))


def scale_initial(a: Pga, c) -> Pga:
    c = Fraction(c)
    if c < 0:
        raise ValueError("scale factor must be nonnegative")
    initial = {q: c * w for q, w in a.initial.items()} if c else {}
    return Pga._raw(a.n_states, dict(a.transitions), initial, dict(a.final))


def guard_filter(a: Pga, g: Guard) -> Pga:
    """Keep exactly the monomials of ``a`` whose degrees satisfy ``g``.

    Product of ``a`` with one saturating counter per guard variable; the
    counter for ``v`` runs over ``0 .. B+1`` where ``B`` is the largest
    constant ``v`` is compared with.  Only product states reachable from an
    initial state are built.
    """
    bounds = guard_bounds(g)
    cvars = sorted(bounds)
    slot = {v: i for i, v in enumerate(cvars)}
    caps = [bounds[v] + 1 for v in cvars]
    succ = a.successors()
    zero = (0,) * len(cvars)

    index: dict[tuple[int, tuple], int] = {}
    order: deque = deque()
    for q in sorted(a.initial):
        index[(q, zero)] = len(index)
        order.append((q, zero))
    trans = {}
    while order:
        q, c = order.popleft()
        i = index[(q, c)]
        for var, d, w in succ[q]:
            k = slot.get(var)
            if k is None:
                c2 = c
            else:
                c2 = c[:k] + (min(c[k] + 1, caps[k]),) + c[k + 1 :]
            key = (d, c2)
            j = index.get(key)
            if j is None:
                j = index[key] = len(index)
                order.append(key)
            _add(trans, (i, var, j), w)

    if not index:
        return _empty()
    initial = {index[(q, zero)]: w for q, w in a.initial.items()}
    final = {}
    for (q, c), i in index.items():
        f = a.final.get(q)
        if f and evaluate(g, dict(zip(cvars, c))):
            final[i] = f
    return Pga._raw(len(index), trans, initial, final)


# --- minimisation -------------------------------------------------------------


def _reindex(a: Pga, keep: list[int]) -> Pga:
    if not keep:
        return _empty()
    new = {q: i for i, q in enumerate(keep)}
    trans = {
        (new[s], v, new[d]): w
        for (s, v, d), w in a.transitions.items()
        if s in new and d in new
    }
    initial = {new[q]: w for q, w in a.initial.items() if q in new}
    final = {new[q]: w for q, w in a.final.items() if q in new}
    return Pga._raw(len(keep), trans, initial, final)


def _reach(starts, adjacency) -> set:
    seen = set(starts)
    todo = list(starts)
    while todo:
        q = todo.pop()
        for r in adjacency[q]:
            if r not in seen:
                seen.add(r)
                todo.append(r)
    return seen


def trim(a: Pga) -> Pga:
    """Drop states that are not both accessible and co-accessible."""
    fwd = [[] for _ in a.states]
    bwd = [[] for _ in a.states]
    for s, _, d in a.transitions:
        fwd[s].append(d)
        bwd[d].append(s)
    useful = _reach(a.initial, fwd) & _reach(a.final, bwd)
    if len(useful) == a.n_states:
        return a
    return _reindex(a, sorted(useful))


def bisim_minimize(a: Pga) -> Pga:
    """Quotient by the coarsest forward weighted bisimulation.

    Two states are merged when they have equal final weight and, for every
    variable tag and every class, equal total outgoing weight into that
    class.  Computed by signature refinement until the partition is stable.
    """
    succ = a.successors()
    cls = _renumber([a.final.get(q, ZERO) for q in a.states])
    while True:
        sigs = []
        for q in a.states:
            out = defaultdict(Fraction)
            for var, d, w in succ[q]:
                out[("" if var is None else "$" + var, cls[d])] += w
            sigs.append((cls[q], tuple(sorted(out.items()))))
        refined = _renumber(sigs)
        if max(refined) == max(cls):
            break
        cls = refined
    n = max(cls) + 1
    if n == a.n_states:
        return a

    rep = {}
    for q in a.states:
        rep.setdefault(cls[q], q)
    trans = {}
    for c, q in rep.items():
        for var, d, w in succ[q]:
            _add(trans, (c, var, cls[d]), w)
    initial = {}
    for q, w in a.initial.items():
        initial[cls[q]] = initial.get(cls[q], ZERO) + w
    final = {c: a.final[q] for c, q in rep.items() if q in a.final}
    return Pga._raw(n, trans, initial, final)


def _renumber(keys) -> list[int]:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def chain_pga(labels) -> Pga:
    """A linear chain of transitions with initial weight 1 at the start and final weight 1 at the end.

    ``labels`` is a sequence of ``(weight, var)`` pairs.
    """
    labels = list(labels)
    trans = [(i, Label(Fraction(w), v), i + 1) for i, (w, v) in enumerate(labels)]
    n = len(labels)
    return Pga(n + 1, trans, {0: ONE}, {n: ONE})
