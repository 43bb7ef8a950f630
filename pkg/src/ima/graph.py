"""Undirected sort-labeled multigraphs with ordered interfaces.

A graph consists of vertices labeled either by a ranked symbol, by an
interface marker carrying a serial number and a sort, or by a loop marker.
Every vertex owns an ordered list of ports (one per letter of its rank
word) and the edge set is a perfect matching on ports: each port is an
endpoint of exactly one edge, and the two endpoints of an edge carry the
same sort.  Interface vertices have one port, loop vertices none.

The operations below make the family of such graphs an indexed monoidal
algebra: reindexing permutes interface serials, sum is disjoint union,
and trace glues paired interface edges, recording any closed chain of
glued edges as a fresh loop vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import perm
from .errors import RankMismatch, UnknownSymbol
from .perm import Obj, PermSymbol, Sort

Port = tuple[int, int]  # (vertex id, 0-based port index)

# the canonical sort of single-sorted graphs (machines, solitons)
DEFAULT_SORT = Sort("1")


@dataclass(frozen=True)
class SymbolLabel:
    name: str
    rank: Obj


@dataclass(frozen=True)
class InterfaceLabel:
    serial: int  # 1-based
    sort: Sort


@dataclass(frozen=True)
class LoopLabel:
    sort: Sort


Label = SymbolLabel | InterfaceLabel | LoopLabel


def label_ports(label: Label) -> tuple[Sort, ...]:
    if isinstance(label, SymbolLabel):
        return label.rank.word
    if isinstance(label, InterfaceLabel):
        return (label.sort,)
    return ()


@dataclass(frozen=True)
class RankedAlphabet:
    """Symbol names with their rank words; a name has exactly one rank."""

    symbols: dict[str, Obj]

    @property
    def sorts(self) -> frozenset[Sort]:
        return frozenset(s for w in self.symbols.values() for s in w)

    def rank(self, name: str) -> Obj:
        try:
            return self.symbols[name]
        except KeyError:
            raise UnknownSymbol(f"symbol {name!r} is not declared") from None


class SigmaGraph:
    """Immutable value; compare with :func:`isomorphic`, not ``==``."""

    __slots__ = ("vertices", "edges", "_partner")

    def __init__(self, vertices: dict[int, Label], edges):
        self.vertices: dict[int, Label] = dict(vertices)
        self.edges: frozenset[frozenset[Port]] = frozenset(
            frozenset(e) for e in edges
        )
        partner: dict[Port, Port] = {}
        for e in self.edges:
            pair = sorted(e)
            if len(pair) != 2:
                raise ValueError(f"edge {pair} must join two distinct ports")
            p, q = pair
            partner[p] = q
            partner[q] = p
        self._partner = partner
        if __debug__:
            self._validate()

    # -- structure ------------------------------------------------------

    def ports_of(self, vid: int) -> tuple[Sort, ...]:
        return label_ports(self.vertices[vid])

    def port_sort(self, port: Port) -> Sort:
        return self.ports_of(port[0])[port[1]]

    def partner(self, port: Port) -> Port:
        return self._partner[port]

    def interface_vertices(self) -> dict[int, int]:
        """serial -> vertex id"""
        return {
            lab.serial: vid
            for vid, lab in self.vertices.items()
            if isinstance(lab, InterfaceLabel)
        }

    def internal_vertices(self) -> list[int]:
        return sorted(
            vid for vid, lab in self.vertices.items() if isinstance(lab, SymbolLabel)
        )

    def loop_vertices(self) -> list[int]:
        return sorted(
            vid for vid, lab in self.vertices.items() if isinstance(lab, LoopLabel)
        )

    def rank_word(self) -> Obj:
        ifaces = self.interface_vertices()
        return Obj(
            tuple(self.vertices[ifaces[s]].sort for s in sorted(ifaces))
        )

    def _validate(self):
        ifaces = self.interface_vertices()
        if sorted(ifaces) != list(range(1, len(ifaces) + 1)):
            raise ValueError(f"interface serials {sorted(ifaces)} have gaps")
        all_ports = {
            (vid, i) for vid in self.vertices for i in range(len(self.ports_of(vid)))
        }
        seen = set()
        for e in self.edges:
            p, q = sorted(e)
            for x in (p, q):
                if x not in all_ports:
                    raise ValueError(f"edge endpoint {x} is not a port")
                if x in seen:
                    raise ValueError(f"port {x} lies on two edges")
                seen.add(x)
            if self.port_sort(p) != self.port_sort(q):
                raise ValueError(f"edge {p}-{q} joins ports of different sorts")
        if seen != all_ports:
            raise ValueError(f"unmatched ports: {sorted(all_ports - seen)}")

    def __repr__(self):
        n = len(self.internal_vertices())
        return (
            f"<SigmaGraph {self.rank_word()} with {n} internal, "
            f"{len(self.loop_vertices())} loop, {len(self.edges)} edges>"
        )


def _renumbered(vertices: dict[int, Label], edges) -> SigmaGraph:
    order = sorted(vertices)
    remap = {old: new for new, old in enumerate(order)}
    return SigmaGraph(
        {remap[v]: lab for v, lab in vertices.items()},
        [frozenset({(remap[a], i), (remap[b], j)}) for e in edges for (a, i), (b, j) in [sorted(e)]],
    )


# -- constructors ---------------------------------------------------------


def atom(alphabet: RankedAlphabet, name: str) -> SigmaGraph:
    """The star graph of a symbol: one internal vertex whose ports hang off
    fresh interface vertices numbered in rank order."""
    rank = alphabet.rank(name)
    vertices: dict[int, Label] = {0: SymbolLabel(name, rank)}
    edges = []
    for i, sort in enumerate(rank):
        vertices[1 + i] = InterfaceLabel(1 + i, sort)
        edges.append({(0, i), (1 + i, 0)})
    return SigmaGraph(vertices, edges)


def identity_graph(w: Obj) -> SigmaGraph:
    """2|w| interfaces wired straight across; empty when w is the unit."""
    n = len(w)
    vertices: dict[int, Label] = {}
    edges = []
    for i, sort in enumerate(w):
        vertices[i] = InterfaceLabel(1 + i, sort)
        vertices[n + i] = InterfaceLabel(1 + n + i, sort)
        edges.append({(i, 0), (n + i, 0)})
    return SigmaGraph(vertices, edges)


# -- algebra operations ----------------------------------------------------


def reindex(g: SigmaGraph, rho: PermSymbol) -> SigmaGraph:
    """Relabel interface serials by the flattening of ``rho``."""
    if rho.dom != g.rank_word():
        raise RankMismatch(f"reindex: graph has rank {g.rank_word()}, symbol domain {rho.dom}")
    sends = rho.flatten()
    vertices = {
        vid: (
            InterfaceLabel(sends[lab.serial - 1] + 1, lab.sort)
            if isinstance(lab, InterfaceLabel)
            else lab
        )
        for vid, lab in g.vertices.items()
    }
    return _renumbered(vertices, g.edges)


def sum_graphs(g1: SigmaGraph, g2: SigmaGraph) -> SigmaGraph:
    """Disjoint union; the second graph's serials are shifted."""
    shift = len(g1.rank_word())
    offset = (max(g1.vertices) + 1) if g1.vertices else 0
    vertices = dict(g1.vertices)
    for vid, lab in g2.vertices.items():
        if isinstance(lab, InterfaceLabel):
            lab = InterfaceLabel(lab.serial + shift, lab.sort)
        vertices[offset + vid] = lab
    edges = list(g1.edges) + [
        frozenset({(offset + a, i), (offset + b, j)})
        for e in g2.edges
        for (a, i), (b, j) in [sorted(e)]
    ]
    return _renumbered(vertices, edges)


def trace(g: SigmaGraph, w: Obj) -> SigmaGraph:
    """Glue the edges at interface pairs (i, |w|+i) for i = 1..|w|.

    All pairs are spliced simultaneously by following chains of edges
    through the deleted interface ports.  A chain that closes on itself
    without reaching a surviving port leaves a fresh loop vertex of the
    chain's common sort.  Surviving interfaces are renumbered in order.
    """
    n = len(w)
    rank = g.rank_word()
    if rank[: 2 * n] != w + w:
        raise RankMismatch(f"trace: rank {rank} does not start with {w}{w}")
    ifaces = g.interface_vertices()
    splice: dict[Port, Port] = {}
    deleted_vids = set()
    for i in range(1, n + 1):
        a = (ifaces[i], 0)
        b = (ifaces[n + i], 0)
        splice[a] = b
        splice[b] = a
        deleted_vids.update((ifaces[i], ifaces[n + i]))
    deleted_ports = set(splice)

    new_edges = []
    used = set()
    surviving = sorted(
        (vid, i)
        for vid in g.vertices
        if vid not in deleted_vids
        for i in range(len(g.ports_of(vid)))
    )
    for p in surviving:
        if p in used:
            continue
        q = g.partner(p)
        while q in deleted_ports:
            used.add(q)
            used.add(splice[q])
            q = g.partner(splice[q])
        used.update((p, q))
        new_edges.append({p, q})

    loop_sorts = []
    for a in sorted(deleted_ports):
        if a in used:
            continue
        sort = g.port_sort(a)
        q = a
        while True:
            used.add(q)
            used.add(splice[q])
            assert g.port_sort(q) == sort, "glued chain mixes sorts"
            q = g.partner(splice[q])
            if q == a:
                break
        loop_sorts.append(sort)

    vertices: dict[int, Label] = {}
    serial_map = {}
    for s in sorted(ifaces):
        if s > 2 * n:
            serial_map[s] = len(serial_map) + 1
    for vid, lab in g.vertices.items():
        if vid in deleted_vids:
            continue
        if isinstance(lab, InterfaceLabel):
            lab = InterfaceLabel(serial_map[lab.serial], lab.sort)
        vertices[vid] = lab
    next_vid = (max(g.vertices) + 1) if g.vertices else 0
    for k, sort in enumerate(loop_sorts):
        vertices[next_vid + k] = LoopLabel(sort)
    return _renumbered(vertices, new_edges)


def compose(g1: SigmaGraph, g2: SigmaGraph, a: Obj, b: Obj, c: Obj) -> SigmaGraph:
    """Plug ``g1 : a -> b`` into ``g2 : b -> c`` along the shared ``b``."""
    from .algebra import compose_in

    return compose_in(GRAPH_ALGEBRA, g1, g2, a, b, c)


def tensor_graphs(
    g1: SigmaGraph, g2: SigmaGraph, a: Obj, b: Obj, c: Obj, d: Obj
) -> SigmaGraph:
    """Juxtapose ``g1 : a -> b`` and ``g2 : c -> d``."""
    from .algebra import tensor_in

    return tensor_in(GRAPH_ALGEBRA, g1, g2, a, b, c, d)


# -- isomorphism -----------------------------------------------------------


def _refine_colors(g: SigmaGraph) -> dict[int, tuple]:
    """Stable coloring of internal vertices by label and neighborhood."""

    def neighbor_token(vid: int, i: int, colors):
        q = g.partner((vid, i))
        lab = g.vertices[q[0]]
        if isinstance(lab, InterfaceLabel):
            return ("in", lab.serial)
        if q[0] == vid:
            return ("self", q[1])
        return ("sym", colors[q[0]], q[1])

    colors = {
        vid: (g.vertices[vid].name, str(g.vertices[vid].rank))
        for vid in g.internal_vertices()
    }
    for _ in range(len(colors) + 1):
        refined = {
            vid: (
                colors[vid],
                tuple(
                    neighbor_token(vid, i, colors)
                    for i in range(len(g.ports_of(vid)))
                ),
            )
            for vid in colors
        }
        # compress to small tokens so tuples stay shallow
        palette = {c: k for k, c in enumerate(sorted(set(refined.values()), key=repr))}
        new = {vid: (palette[refined[vid]],) for vid in refined}
        if new == colors:
            break
        colors = new
    return colors


def isomorphic(g1: SigmaGraph, g2: SigmaGraph) -> bool:
    """Label-, port-order-, sort- and serial-preserving isomorphism."""
    if g1.rank_word() != g2.rank_word():
        return False
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    loops1 = sorted(g1.vertices[v].sort for v in g1.loop_vertices())
    loops2 = sorted(g2.vertices[v].sort for v in g2.loop_vertices())
    if loops1 != loops2:
        return False

    def wires(g):
        out = set()
        for e in g.edges:
            p, q = sorted(e)
            lp, lq = g.vertices[p[0]], g.vertices[q[0]]
            if isinstance(lp, InterfaceLabel) and isinstance(lq, InterfaceLabel):
                out.add(frozenset({lp.serial, lq.serial}))
        return out

    if wires(g1) != wires(g2):
        return False

    c1 = _refine_colors(g1)
    c2 = _refine_colors(g2)
    by_color1: dict[tuple, list[int]] = {}
    by_color2: dict[tuple, list[int]] = {}
    for v, c in c1.items():
        by_color1.setdefault(c, []).append(v)
    for v, c in c2.items():
        by_color2.setdefault(c, []).append(v)
    if set(by_color1) != set(by_color2):
        return False
    if any(len(by_color1[c]) != len(by_color2[c]) for c in by_color1):
        return False

    iface1 = g1.interface_vertices()
    iface2 = g2.interface_vertices()
    mapping: dict[int, int] = {iface1[s]: iface2[s] for s in iface1}

    def edges_ok(v, w):
        """Every edge of v into already-mapped territory must exist in g2."""
        trial = dict(mapping)
        trial[v] = w
        for i in range(len(g1.ports_of(v))):
            q = g1.partner((v, i))
            if q[0] in trial:
                if frozenset({(w, i), (trial[q[0]], q[1])}) not in g2.edges:
                    return False
        return True

    order = sorted(c1, key=lambda v: (len(by_color1[c1[v]]), v))
    used: set[int] = set()

    def backtrack(k: int) -> bool:
        if k == len(order):
            return True
        v = order[k]
        for w in by_color2[c1[v]]:
            if w in used or not edges_ok(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(k + 1):
                return True
            del mapping[v]
            used.remove(w)
        return False

    return backtrack(0)


# -- decomposition into a term ----------------------------------------------


@dataclass(frozen=True)
class DecompositionPlan:
    """How a graph is rebuilt from stars: the ordered sum of atoms, wire
    pairs for interface-to-interface edges, loop markers, then one
    reindexing and one trace closing all internal edges."""

    atoms: tuple[tuple[int, str, Obj], ...]  # (vertex id, symbol, rank)
    wire_sorts: tuple[Sort, ...]  # one identity summand per iface-iface edge
    loop_sorts: tuple[Sort, ...]
    trace_word: Obj
    sends: tuple[int, ...]  # position permutation applied before the trace
    base_word: Obj

    @property
    def summand_count(self) -> int:
        return len(self.atoms) + len(self.wire_sorts) + len(self.loop_sorts)


def decomposition_plan(g: SigmaGraph) -> DecompositionPlan:
    internal = g.internal_vertices()
    offsets = {}
    acc = 0
    for vid in internal:
        offsets[vid] = acc
        acc += len(g.ports_of(vid))
    base_positions = acc

    def is_internal_port(p: Port) -> bool:
        return isinstance(g.vertices[p[0]], SymbolLabel)

    internal_edges = []
    iface_edges = {}  # serial -> internal port
    wire_edges = []
    for e in sorted(g.edges, key=sorted):
        p, q = sorted(e)
        if is_internal_port(p) and is_internal_port(q):
            internal_edges.append((p, q))
        elif is_internal_port(p) or is_internal_port(q):
            port = p if is_internal_port(p) else q
            iface = q if is_internal_port(p) else p
            iface_edges[g.vertices[iface[0]].serial] = port
        else:
            s1 = g.vertices[p[0]].serial
            s2 = g.vertices[q[0]].serial
            wire_edges.append((min(s1, s2), max(s1, s2)))
    wire_edges.sort()

    s = len(internal_edges)
    trace_word = Obj(tuple(g.port_sort(p) for p, _ in internal_edges))
    n_ext = len(g.rank_word())

    sends = [0] * (base_positions + 2 * len(wire_edges))
    for t, (p, q) in enumerate(internal_edges):
        sends[offsets[p[0]] + p[1]] = t
        sends[offsets[q[0]] + q[1]] = s + t
    for serial, port in iface_edges.items():
        sends[offsets[port[0]] + port[1]] = 2 * s + serial - 1
    for t, (s1, s2) in enumerate(wire_edges):
        sends[base_positions + 2 * t] = 2 * s + s1 - 1
        sends[base_positions + 2 * t + 1] = 2 * s + s2 - 1

    atoms = tuple(
        (vid, g.vertices[vid].name, g.vertices[vid].rank) for vid in internal
    )
    wire_sorts = tuple(g.rank_word()[s1 - 1] for s1, _ in wire_edges)
    loop_sorts = tuple(
        sorted(g.vertices[v].sort for v in g.loop_vertices())
    )
    base_word = perm.concat(
        [rank for _, _, rank in atoms]
        + [Obj.of(x, x) for x in wire_sorts]
    )
    return DecompositionPlan(
        atoms, wire_sorts, loop_sorts, trace_word, tuple(sends), base_word
    )


def decompose(g: SigmaGraph):
    """A term whose evaluation in the graph algebra rebuilds ``g``."""
    from . import term as tm

    plan = decomposition_plan(g)
    parts = [tm.Atom(name) for _, name, _ in plan.atoms]
    parts += [tm.Id(Obj.of(x)) for x in plan.wire_sorts]
    parts += [tm.Trace(Obj.of(x), tm.Id(Obj.of(x))) for x in plan.loop_sorts]
    if not parts:
        body = tm.Id(perm.UNIT)
    else:
        body = parts[0]
        for p in parts[1:]:
            body = tm.Sum(body, p)
    rho = perm.from_positions(plan.base_word, plan.sends)
    if rho.flatten() != tuple(range(len(plan.base_word))):
        body = tm.Index(body, rho)
    if plan.trace_word:
        body = tm.Trace(plan.trace_word, body)
    return body


# -- text format and DOT -----------------------------------------------------


def format_graph(g: SigmaGraph) -> str:
    lines = [f"graph {g.rank_word()}"]
    for vid in sorted(g.vertices):
        lab = g.vertices[vid]
        if isinstance(lab, SymbolLabel):
            text = f"sym:{lab.name}"
        elif isinstance(lab, InterfaceLabel):
            text = f"in:{lab.serial}:{lab.sort.name}"
        else:
            text = f"loop:{lab.sort.name}"
        lines.append(f"vertex {vid} {text}")
    for e in sorted(g.edges, key=sorted):
        (a, i), (b, j) = sorted(e)
        lines.append(f"edge {a}.{i + 1} {b}.{j + 1}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str, alphabet: RankedAlphabet | None = None) -> SigmaGraph:
    """Read the ``graph/vertex/edge`` format.

    Symbol ranks come from ``alphabet`` when given; otherwise port sorts
    are inferred by propagating interface sorts along edges, with any
    unconstrained port defaulting to the single sort of the file when
    that is unambiguous.
    """
    rank_decl = None
    raw_vertices: dict[int, str] = {}
    raw_edges: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "graph" and len(parts) == 2:
            rank_decl = Obj.parse(parts[1])
        elif parts[0] == "vertex" and len(parts) == 3:
            raw_vertices[int(parts[1])] = parts[2]
        elif parts[0] == "edge" and len(parts) == 3:
            ends = []
            for token in parts[1:]:
                vid, port = token.split(".")
                ends.append((int(vid), int(port) - 1))
            raw_edges.append((ends[0], ends[1]))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")

    degree: dict[int, int] = {v: 0 for v in raw_vertices}
    for (a, i), (b, j) in raw_edges:
        degree[a] = max(degree[a], i + 1)
        degree[b] = max(degree[b], j + 1)

    known: dict[tuple[int, int], Sort] = {}
    vertices: dict[int, Label] = {}
    pending: list[tuple[int, str]] = []
    for vid, text_label in raw_vertices.items():
        kind, _, rest = text_label.partition(":")
        if kind == "in":
            serial, _, sortname = rest.partition(":")
            lab = InterfaceLabel(int(serial), Sort(sortname))
            known[(vid, 0)] = lab.sort
            vertices[vid] = lab
        elif kind == "loop":
            vertices[vid] = LoopLabel(Sort(rest))
        elif kind == "sym":
            if alphabet is not None:
                rank = alphabet.rank(rest)
                for i, sort in enumerate(rank):
                    known[(vid, i)] = sort
                vertices[vid] = SymbolLabel(rest, rank)
            else:
                pending.append((vid, rest))
        else:
            raise ValueError(f"unknown vertex label {text_label!r}")

    if pending:
        changed = True
        while changed:
            changed = False
            for (a, b) in raw_edges:
                if a in known and b not in known:
                    known[b], changed = known[a], True
                elif b in known and a not in known:
                    known[a], changed = known[b], True
        fallback = {s for s in known.values()}
        if rank_decl is not None:
            fallback |= set(rank_decl.word)
        if len(fallback) == 1:
            default = next(iter(fallback))
        elif not fallback:
            default = DEFAULT_SORT
        else:
            default = None
        for vid, name in pending:
            sorts = []
            for i in range(degree[vid]):
                sort = known.get((vid, i), default)
                if sort is None:
                    raise ValueError(
                        f"cannot infer sort of port {vid}.{i + 1}; pass an alphabet"
                    )
                sorts.append(sort)
            vertices[vid] = SymbolLabel(name, Obj(tuple(sorts)))

    g = SigmaGraph(vertices, [frozenset({p, q}) for p, q in raw_edges])
    if rank_decl is not None and g.rank_word() != rank_decl:
        raise ValueError(
            f"declared rank {rank_decl} does not match interfaces {g.rank_word()}"
        )
    return g


def to_dot(g: SigmaGraph) -> str:
    lines = ["graph G {"]
    for vid in sorted(g.vertices):
        lab = g.vertices[vid]
        if isinstance(lab, SymbolLabel):
            lines.append(f'  v{vid} [shape=circle, label="{lab.name}"];')
        elif isinstance(lab, InterfaceLabel):
            lines.append(
                f'  v{vid} [shape=box, label="{lab.serial}:{lab.sort.name}"];'
            )
        else:
            lines.append(f'  v{vid} [shape=diamond, label="{lab.sort.name}"];')
    for e in sorted(g.edges, key=sorted):
        (a, i), (b, j) = sorted(e)
        lines.append(f'  v{a} -- v{b} [taillabel="{i + 1}", headlabel="{j + 1}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


class GraphAlgebra:
    """The indexed monoidal algebra of graphs over a fixed alphabet."""

    def identity(self, w: Obj) -> SigmaGraph:
        return identity_graph(w)

    def sum(self, x, y):
        return sum_graphs(x, y)

    def trace(self, w, x):
        return trace(x, w)

    def reindex(self, x, rho):
        return reindex(x, rho)

    def rank_of(self, x) -> Obj:
        return x.rank_word()

    def equivalent(self, x, y, witness=None) -> bool:
        return isomorphic(x, y)


GRAPH_ALGEBRA = GraphAlgebra()
