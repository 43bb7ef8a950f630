"""Turing automata as an indexed monoidal algebra.

An automaton has an interface word (its positions, 1-based), a finite
nonempty state set and a transition relation between (state, position)
pairs, where a position is either an index into the interface word or the
distinguished anchor ``"*"``.  The anchor is never renamed, summed over or
traced; it lets automata of empty sort keep transitions.

Trace is computed by the Kleene-style elimination of interface pairs: for
each glued pair the surviving transitions are extended by chains that
alternate through the pair, expressed with an alternating matrix product
over the semiring of binary relations on the state set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InvalidArity, RankMismatch
from .perm import Obj, PermSymbol, Sort

ANCHOR = "*"
Pos = int | str
Transition = tuple[tuple[object, Pos], tuple[object, Pos]]


# -- binary relations as bit-packed boolean matrices -------------------------


@dataclass(frozen=True)
class Rel:
    """A relation over states 0..size-1; row i is a bitmask of successors."""

    size: int
    rows: tuple[int, ...]

    @staticmethod
    def empty(size: int) -> "Rel":
        return Rel(size, (0,) * size)

    @staticmethod
    def identity(size: int) -> "Rel":
        return Rel(size, tuple(1 << i for i in range(size)))

    @staticmethod
    def from_pairs(size: int, pairs: Iterable[tuple[int, int]]) -> "Rel":
        rows = [0] * size
        for i, j in pairs:
            rows[i] |= 1 << j
        return Rel(size, tuple(rows))

    def pairs(self) -> list[tuple[int, int]]:
        out = []
        for i, row in enumerate(self.rows):
            while row:
                low = row & -row
                out.append((i, low.bit_length() - 1))
                row ^= low
        return out

    def union(self, other: "Rel") -> "Rel":
        return Rel(self.size, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def compose(self, other: "Rel") -> "Rel":
        rows2 = other.rows
        out = []
        for row in self.rows:
            acc = 0
            while row:
                low = row & -row
                acc |= rows2[low.bit_length() - 1]
                row ^= low
            out.append(acc)
        return Rel(self.size, tuple(out))

    def converse(self) -> "Rel":
        rows = [0] * self.size
        for i, j in self.pairs():
            rows[j] |= 1 << i
        return Rel(self.size, tuple(rows))

    def is_empty(self) -> bool:
        return all(r == 0 for r in self.rows)


Mat = tuple[tuple[Rel, ...], ...]  # rows of relations

# the table driving the pair elimination: one relation per surviving
# interface pair (anchor included), total on its index set
LambdaTable = dict[tuple[Pos, Pos], Rel]


def _mat_mul(u: Mat, v: Mat) -> Mat:
    size = u[0][0].size
    out = []
    for row in u:
        out_row = []
        for j in range(len(v[0])):
            acc = Rel.empty(size)
            for k in range(len(v)):
                acc = acc.union(row[k].compose(v[k][j]))
            out_row.append(acc)
        out.append(tuple(out_row))
    return tuple(out)


def alt_product(u: Mat, v: Mat, alternate: bool = True) -> Mat:
    """Matrix product with the right factor's two rows swapped first.

    ``alternate=False`` gives the plain product; only the law-checker's
    self-test uses it.
    """
    if len(v) != 2:
        raise ValueError("alternating product needs a two-row right factor")
    return _mat_mul(u, (v[1], v[0]) if alternate else v)


def alt_identity(size: int, alternate: bool = True) -> Mat:
    i2: Mat = ((Rel.identity(size), Rel.empty(size)), (Rel.empty(size), Rel.identity(size)))
    return alt_product(i2, i2, alternate)


def alt_star(u: Mat, alternate: bool = True) -> Mat:
    """Least fixpoint of ``P = P0 union (P alt_product u)`` starting from the
    alternate identity; terminates on the finite lattice of relations."""
    size = u[0][0].size
    p = alt_identity(size, alternate)
    while True:
        nxt = tuple(
            tuple(a.union(b) for a, b in zip(row_p, row_q))
            for row_p, row_q in zip(p, alt_product(p, u, alternate))
        )
        if nxt == p:
            return p
        p = nxt


# -- automata -----------------------------------------------------------------


@dataclass(frozen=True)
class TuringAutomaton:
    iface: Obj
    states: frozenset
    delta: frozenset  # of Transition

    def __post_init__(self):
        if not self.states:
            raise ValueError("state set must be nonempty")
        n = len(self.iface)
        for (q, x), (r, y) in self.delta:
            for s in (q, r):
                if s not in self.states:
                    raise ValueError(f"transition mentions unknown state {s!r}")
            for z in (x, y):
                if z != ANCHOR and not (isinstance(z, int) and 1 <= z <= n):
                    raise ValueError(f"position {z!r} outside interface of size {n}")

    def state_order(self) -> list:
        return sorted(self.states, key=repr)

    def __repr__(self):
        return (
            f"<TuringAutomaton {self.iface} |Q|={len(self.states)} "
            f"|delta|={len(self.delta)}>"
        )


def identity_automaton(w: Obj) -> TuringAutomaton:
    """Single state; position i bounces to |w|+i and back. No anchor moves."""
    n = len(w)
    q = 0
    delta = set()
    for i in range(1, n + 1):
        delta.add(((q, i), (q, n + i)))
        delta.add(((q, n + i), (q, i)))
    return TuringAutomaton(w + w, frozenset({q}), frozenset(delta))


def reindex_automaton(t: TuringAutomaton, rho: PermSymbol) -> TuringAutomaton:
    if rho.dom != t.iface:
        raise RankMismatch(f"reindex: automaton iface {t.iface}, symbol domain {rho.dom}")
    sends = rho.flatten()

    def move(x: Pos) -> Pos:
        return x if x == ANCHOR else sends[x - 1] + 1

    delta = frozenset(((q, move(x)), (r, move(y))) for (q, x), (r, y) in t.delta)
    return TuringAutomaton(rho.cod, t.states, delta)


def sum_automata(t1: TuringAutomaton, t2: TuringAutomaton) -> TuringAutomaton:
    """Product states; each summand fires alone, the other state component
    rides along unchanged.  Applies to anchor moves as well."""
    shift = len(t1.iface)

    def move(x: Pos) -> Pos:
        return x if x == ANCHOR else x + shift

    delta = set()
    for (q, x), (r, y) in t1.delta:
        for q2 in t2.states:
            delta.add((((q, q2), x), ((r, q2), y)))
    for (q2, x), (r2, y) in t2.delta:
        for q in t1.states:
            delta.add((((q, q2), move(x)), ((q, r2), move(y))))
    states = frozenset(itertools.product(t1.states, t2.states))
    return TuringAutomaton(t1.iface + t2.iface, states, frozenset(delta))


def trace_automaton(
    t: TuringAutomaton,
    w: Obj,
    order: Sequence[int] | None = None,
    alternate: bool = True,
) -> TuringAutomaton:
    """Eliminate the interface pairs (i, |w|+i) by the Kleene construction.

    ``order`` fixes the elimination sequence of pair indices 1..|w|; the
    result does not depend on it.
    """
    n = len(w)
    if t.iface[: 2 * n] != w + w:
        raise RankMismatch(f"trace: iface {t.iface} does not start with {w}{w}")
    if order is None:
        order = range(1, n + 1)
    order = list(order)
    if sorted(order) != list(range(1, n + 1)):
        raise ValueError(f"order {order} is not a permutation of 1..{n}")

    states = t.state_order()
    index = {q: i for i, q in enumerate(states)}
    size = len(states)
    total = len(t.iface)

    keys: list[Pos] = list(range(1, total + 1)) + [ANCHOR]
    table: LambdaTable = {
        (x, y): Rel.empty(size) for x in keys for y in keys
    }
    grouped: dict[tuple[Pos, Pos], list[tuple[int, int]]] = {}
    for (q, x), (r, y) in t.delta:
        grouped.setdefault((x, y), []).append((index[q], index[r]))
    for xy, pairs in grouped.items():
        table[xy] = Rel.from_pairs(size, pairs)

    for i in order:
        z1, z2 = i, n + i
        mid: Mat = (
            (table[(z1, z1)], table[(z1, z2)]),
            (table[(z2, z1)], table[(z2, z2)]),
        )
        star = alt_star(mid, alternate)
        keys = [k for k in keys if k not in (z1, z2)]
        row_through = {
            x: alt_product(((table[(x, z1)], table[(x, z2)]),), star, alternate)
            for x in keys
        }
        new_table = {}
        for x in keys:
            for y in keys:
                col: Mat = ((table[(z1, y)],), (table[(z2, y)],))
                gained = alt_product(row_through[x], col, alternate)[0][0]
                new_table[(x, y)] = table[(x, y)].union(gained)
        table = new_table

    def rename(x: Pos) -> Pos:
        return x if x == ANCHOR else x - 2 * n

    delta = set()
    for (x, y), rel in table.items():
        for qi, ri in rel.pairs():
            delta.add(((states[qi], rename(x)), (states[ri], rename(y))))
    return TuringAutomaton(t.iface[2 * n :], t.states, frozenset(delta))


def compose_automata(t1, t2, a: Obj, b: Obj, c: Obj) -> TuringAutomaton:
    from .algebra import compose_in

    return compose_in(AUTOMATA_ALGEBRA, t1, t2, a, b, c)


def tensor_automata(t1, t2, a: Obj, b: Obj, c: Obj, d: Obj) -> TuringAutomaton:
    from .algebra import tensor_in

    return tensor_in(AUTOMATA_ALGEBRA, t1, t2, a, b, c, d)


def reverse(t: TuringAutomaton) -> TuringAutomaton:
    return TuringAutomaton(
        t.iface, t.states, frozenset((b, a) for a, b in t.delta)
    )


def is_deterministic(t: TuringAutomaton) -> bool:
    """At most one next state for each (state, entry, exit) triple."""
    seen = set()
    for (q, x), (r, y) in t.delta:
        key = (q, x, y)
        if key in seen:
            return False
        seen.add(key)
    return True


def atomic_switch(n: int, sort: Sort = Sort("1")) -> TuringAutomaton:
    """The n-port switch with one selected (positive) port per state.

    Entering a non-selected port exits at the selected one and moves the
    selection to the entered port; entering the selected port exits at any
    other and moves the selection there.  Every state also exchanges
    control with the anchor at every port.  For n = 1 control entering the
    single port bounces straight back.
    """
    if n < 1:
        raise InvalidArity(f"switch arity must be >= 1, got {n}")
    delta = set()
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                delta.add(((i, j), (j, i)))
                delta.add(((i, i), (j, j)))
            delta.add(((i, ANCHOR), (i, j)))
            delta.add(((i, j), (i, ANCHOR)))
        delta.add(((i, ANCHOR), (i, ANCHOR)))
    if n == 1:
        delta.add(((1, 1), (1, 1)))
    return TuringAutomaton(
        Obj(tuple(sort for _ in range(n))),
        frozenset(range(1, n + 1)),
        frozenset(delta),
    )


# -- equality up to a state bijection -----------------------------------------


def _signatures(t: TuringAutomaton) -> dict:
    sig = {q: 0 for q in t.states}
    for _ in range(len(t.states) + 1):
        out: dict = {q: [] for q in t.states}
        inc: dict = {q: [] for q in t.states}
        for (q, x), (r, y) in t.delta:
            out[q].append((x, y, sig[r], q == r))
            inc[r].append((x, y, sig[q], q == r))
        refined = {
            q: (
                sig[q],
                tuple(sorted(out[q], key=repr)),
                tuple(sorted(inc[q], key=repr)),
            )
            for q in t.states
        }
        palette = {v: i for i, v in enumerate(sorted(set(refined.values()), key=repr))}
        new = {q: palette[refined[q]] for q in t.states}
        if new == sig:
            break
        sig = new
    return sig


def equivalent_automata(t1: TuringAutomaton, t2: TuringAutomaton, witness=None) -> bool:
    """True when some state bijection carries one transition set onto the
    other; ``witness`` short-circuits the search with a candidate mapping."""
    if t1.iface != t2.iface or len(t1.states) != len(t2.states):
        return False
    if len(t1.delta) != len(t2.delta):
        return False

    def carries(mapping) -> bool:
        mapped = {
            ((mapping[q], x), (mapping[r], y)) for (q, x), (r, y) in t1.delta
        }
        return mapped == t2.delta

    if witness is not None:
        mapping = {q: witness(q) for q in t1.states}
        if set(mapping.values()) == set(t2.states) and carries(mapping):
            return True

    sig1 = _signatures(t1)
    sig2 = _signatures(t2)
    classes1: dict = {}
    classes2: dict = {}
    for q, s in sig1.items():
        classes1.setdefault(s, []).append(q)
    for q, s in sig2.items():
        classes2.setdefault(s, []).append(q)
    if set(classes1) != set(classes2):
        return False
    if any(len(classes1[s]) != len(classes2[s]) for s in classes1):
        return False

    out1: dict = {q: {} for q in t1.states}
    out2: dict = {q: {} for q in t2.states}
    for (q, x), (r, y) in t1.delta:
        out1[q].setdefault((x, y), set()).add(r)
    for (q, x), (r, y) in t2.delta:
        out2[q].setdefault((x, y), set()).add(r)

    order = sorted(t1.states, key=lambda q: (len(classes1[sig1[q]]), repr(q)))
    mapping: dict = {}
    used: set = set()

    def consistent(q, w) -> bool:
        if set(out1[q]) != set(out2[w]):
            return False
        for (x, y), succs in out1[q].items():
            image = out2[w][(x, y)]
            if len(succs) != len(image):
                return False
            for r in succs:
                if r in mapping and mapping[r] not in image:
                    return False
        for r, v in mapping.items():
            for (x, y), succs in out1[r].items():
                if q in succs and w not in out2[v].get((x, y), set()):
                    return False
        return True

    def backtrack(k: int) -> bool:
        if k == len(order):
            return carries(mapping)
        q = order[k]
        for w in classes2[sig1[q]]:
            if w in used or not consistent(q, w):
                continue
            mapping[q] = w
            used.add(w)
            if backtrack(k + 1):
                return True
            del mapping[q]
            used.remove(w)
        return False

    return backtrack(0)


# -- file format ---------------------------------------------------------------


def parse_automaton(text: str) -> TuringAutomaton:
    """Read the JSON format written by :func:`format_automaton`; states
    are arbitrary JSON scalars, positions are 1-based or ``"*"``."""
    import json

    doc = json.loads(text)
    iface = Obj.parse(doc["interface"])
    states = frozenset(doc["states"])

    def pos(x):
        return ANCHOR if x == "*" else int(x)

    delta = frozenset(
        ((q, pos(x)), (r, pos(y))) for q, x, r, y in doc["transitions"]
    )
    return TuringAutomaton(iface, states, delta)


def format_automaton(t: TuringAutomaton) -> str:
    """JSON with interface word, state list and transition quadruples.

    Scalar states are written as they are (the file then reparses); product
    states from sums are written as display-only repr strings.
    """
    import json

    plain = all(isinstance(q, (str, int, float, bool)) for q in t.states)

    def enc(q):
        return q if plain else repr(q)

    return (
        json.dumps(
            {
                "interface": str(t.iface),
                "states": sorted((enc(q) for q in t.states), key=repr),
                "transitions": sorted(
                    ([enc(q), x, enc(r), y] for (q, x), (r, y) in t.delta),
                    key=repr,
                ),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )


class AutomataAlgebra:
    """The indexed monoidal algebra of Turing automata.

    ``broken_alternation`` disables the row swap in the alternating
    product; it exists so the law-checking machinery can be shown to catch
    a wrong trace.
    """

    def __init__(self, broken_alternation: bool = False):
        self.broken_alternation = broken_alternation

    def identity(self, w: Obj):
        return identity_automaton(w)

    def sum(self, x, y):
        return sum_automata(x, y)

    def trace(self, w, x):
        return trace_automaton(x, w, alternate=not self.broken_alternation)

    def reindex(self, x, rho):
        return reindex_automaton(x, rho)

    def rank_of(self, x) -> Obj:
        return x.iface

    def equivalent(self, x, y, witness=None) -> bool:
        return equivalent_automata(x, y, witness)


AUTOMATA_ALGEBRA = AutomataAlgebra()
