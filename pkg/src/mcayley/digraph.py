"""m-Cayley digraphs built from connection sets.

Parts are numbered from 0 in code and files. ``sets[i][j]`` holds S_{i,j};
the arcs are ``(x_i, (s*x)_j)`` for ``s`` in S_{i,j}.

Build modes:

* ``digraph``: identity not in any S_{i,i}.
* ``graph``: additionally S_{j,i} = S_{i,j}^-1.
* ``pcayley-digraph`` / ``pcayley-graph``: additionally every S_{i,i} empty.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

from .groups import FiniteGroup, generating_set
from .perms import OrbitPartition

MODES = ("digraph", "graph", "pcayley-digraph", "pcayley-graph")
MODE_ALIASES = {
    "cayley-digraph": "digraph",
    "cayley-graph": "graph",
    "cayley-graph-general": "graph",
    "pcayley": "pcayley-graph",
}


class ModeError(ValueError):
    """Connection sets violate the constraints of the requested mode."""


def normalize_mode(mode: str) -> str:
    mode = MODE_ALIASES.get(mode, mode)
    if mode not in MODES:
        raise ModeError(f"unknown mode {mode!r}")
    return mode


def is_pcayley_mode(mode: str) -> bool:
    return normalize_mode(mode).startswith("pcayley")


def is_graph_mode(mode: str) -> bool:
    return normalize_mode(mode) in ("graph", "pcayley-graph")


@dataclass(frozen=True)
class ConnectionSets:
    group: FiniteGroup
    m: int
    sets: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self) -> None:
        sets = tuple(tuple(frozenset(int(x) for x in s) for s in row) for row in self.sets)
        object.__setattr__(self, "sets", sets)
        if self.m < 1 or len(sets) != self.m or any(len(row) != self.m for row in sets):
            raise ModeError("sets must be an m x m array")
        n = self.group.order
        for row in sets:
            for s in row:
                if any(x < 0 or x >= n for x in s):
                    raise ModeError("element index out of range")

    @classmethod
    def from_lists(cls, group: FiniteGroup, sets: Sequence[Sequence[Iterable[int]]]) -> ConnectionSets:
        return cls(group, len(sets), tuple(tuple(frozenset(s) for s in row) for row in sets))

    @classmethod
    def from_dict(cls, group: FiniteGroup, m: int, entries: dict[tuple[int, int], Iterable[int]]) -> ConnectionSets:
        rows = [[frozenset() for _ in range(m)] for _ in range(m)]
        for (i, j), s in entries.items():
            rows[i][j] = frozenset(s)
        return cls.from_lists(group, rows)

    def __getitem__(self, ij: tuple[int, int]) -> frozenset[int]:
        i, j = ij
        return self.sets[i][j]

    def replace(self, entries: dict[tuple[int, int], Iterable[int]]) -> ConnectionSets:
        rows = [list(row) for row in self.sets]
        for (i, j), s in entries.items():
            rows[i][j] = frozenset(s)
        return ConnectionSets.from_lists(self.group, rows)

    def validate(self, mode: str) -> None:
        mode = normalize_mode(mode)
        inv = self.group.inverse
        for i in range(self.m):
            if 0 in self.sets[i][i]:
                raise ModeError(f"identity in S[{i}][{i}]")
            if mode.startswith("pcayley") and self.sets[i][i]:
                raise ModeError(f"S[{i}][{i}] must be empty in {mode} mode")
        if mode in ("graph", "pcayley-graph"):
            for i in range(self.m):
                for j in range(i, self.m):
                    if self.sets[j][i] != frozenset(inv[x] for x in self.sets[i][j]):
                        raise ModeError(f"S[{j}][{i}] is not the inverse of S[{i}][{j}]")

    def to_json(self, mode: str) -> dict[str, Any]:
        group: Any = self.group.name if self.group.name else self.group.to_json()
        return {
            "group": group,
            "m": self.m,
            "mode": normalize_mode(mode),
            "sets": [[sorted(s) for s in row] for row in self.sets],
        }

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> tuple[ConnectionSets, str]:
        try:
            group = FiniteGroup.from_json(data["group"])
            conn = cls.from_lists(group, data["sets"])
            mode = normalize_mode(data.get("mode", "digraph"))
        except (KeyError, TypeError) as exc:
            raise ModeError(f"malformed connection-set file: {exc}") from exc
        if "m" in data and data["m"] != conn.m:
            raise ModeError("m does not match the sets array")
        return conn, mode


class MCayleyDigraph:
    """The m-Cayley digraph of a family of connection sets."""

    __slots__ = ("_arcs", "conn", "mode", "n", "out")

    def __init__(self, conn: ConnectionSets, mode: str = "digraph") -> None:
        mode = normalize_mode(mode)
        conn.validate(mode)
        self.conn = conn
        self.mode = mode
        order = conn.group.order
        self.n = order * conn.m
        t = conn.group.table
        out = [0] * self.n
        for i, row in enumerate(conn.sets):
            for j, s_ij in enumerate(row):
                for s in s_ij:
                    for x in range(order):
                        out[i * order + x] |= 1 << (j * order + t[s][x])
        self.out = out
        self._arcs: tuple[tuple[int, int], ...] | None = None
        for s in generating_set(conn.group):
            image = [i * order + t[x][s] for i in range(conn.m) for x in range(order)]
            for u, v in self.arcs():
                if not (out[image[u]] >> image[v]) & 1:
                    raise AssertionError("right translation is not an automorphism")

    @property
    def group(self) -> FiniteGroup:
        return self.conn.group

    @property
    def m(self) -> int:
        return self.conn.m

    def has_arc(self, u: int, v: int) -> bool:
        return bool((self.out[u] >> v) & 1)

    def arcs(self) -> tuple[tuple[int, int], ...]:
        if self._arcs is None:
            self._arcs = tuple(
                (u, v) for u in range(self.n) for v in range(self.n) if (self.out[u] >> v) & 1
            )
        return self._arcs

    def arc_count(self) -> int:
        return sum(bin(b).count("1") for b in self.out)

    def adjacency_bytes(self) -> bytes:
        n = self.n
        return bytes((self.out[u] >> v) & 1 for u in range(n) for v in range(n))

    def is_symmetric(self) -> bool:
        return all(self.has_arc(v, u) for u, v in self.arcs())

    def part_of(self, v: int) -> int:
        return v // self.group.order

    def part_vertices(self, i: int) -> range:
        order = self.group.order
        return range(i * order, (i + 1) * order)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, MCayleyDigraph)
            and self.conn.group == other.conn.group
            and self.conn.sets == other.conn.sets
        )

    def __hash__(self) -> int:
        return hash(self.conn.sets)

    def __repr__(self) -> str:
        return f"MCayleyDigraph({self.group.label()}, m={self.m}, mode={self.mode}, arcs={self.arc_count()})"

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "group_order": self.group.order,
            "mode": self.mode,
            "arcs": [list(a) for a in self.arcs()],
        }

    def to_dimacs(self) -> str:
        lines = [
            f"c {self.m}-Cayley digraph of {self.group.label()}, flat 0-based vertex indices",
            f"p arc {self.n} {self.arc_count()}",
        ]
        lines.extend(f"a {u} {v}" for u, v in self.arcs())
        return "\n".join(lines) + "\n"


def build(conn: ConnectionSets, mode: str = "digraph") -> MCayleyDigraph:
    return MCayleyDigraph(conn, mode)


def load_connection_sets(path: str) -> tuple[ConnectionSets, str]:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModeError(f"{path}: invalid JSON: {exc}") from exc
    return ConnectionSets.from_json(data)


def _complement_mode(mode: str) -> str:
    return {"pcayley-digraph": "digraph", "pcayley-graph": "graph"}.get(mode, mode)


def complement(g: MCayleyDigraph) -> MCayleyDigraph:
    """Loopless complement; diagonal sets are complemented inside G minus 1."""
    order = g.group.order
    full = frozenset(range(order))
    rows = [
        [(full - s) - ({0} if i == j else set()) for j, s in enumerate(row)]
        for i, row in enumerate(g.conn.sets)
    ]
    return MCayleyDigraph(ConnectionSets.from_lists(g.group, rows), _complement_mode(g.mode))


def multipartite_complement(g: MCayleyDigraph) -> MCayleyDigraph:
    if any(g.conn.sets[i][i] for i in range(g.m)):
        raise ModeError("multipartite complement needs empty diagonal sets")
    full = frozenset(range(g.group.order))
    rows = [
        [frozenset() if i == j else full - s for j, s in enumerate(row)]
        for i, row in enumerate(g.conn.sets)
    ]
    mode = g.mode if g.mode.startswith("pcayley") else "pcayley-" + g.mode
    return MCayleyDigraph(ConnectionSets.from_lists(g.group, rows), mode)


@dataclass(frozen=True)
class Digraph:
    """A plain digraph on labelled vertices, used for induced subgraphs."""

    vertices: tuple[int, ...]
    arcs: frozenset[tuple[int, int]]

    def undirected_components(self) -> list[list[int]]:
        parent = {v: v for v in self.vertices}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.arcs:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        comps: dict[int, list[int]] = {}
        for v in self.vertices:
            comps.setdefault(find(v), []).append(v)
        return sorted(sorted(c) for c in comps.values())

    def restrict(self, vertices: Iterable[int]) -> Digraph:
        vs = tuple(sorted(set(vertices)))
        keep = set(vs)
        return Digraph(vs, frozenset(a for a in self.arcs if a[0] in keep and a[1] in keep))


def as_digraph(g: MCayleyDigraph) -> Digraph:
    return Digraph(tuple(range(g.n)), frozenset(g.arcs()))


def induced(g: MCayleyDigraph, u: Iterable[int]) -> Digraph:
    vs = tuple(sorted(set(u)))
    return Digraph(vs, frozenset((a, b) for a in vs for b in vs if g.has_arc(a, b)))


def induced_between(g: MCayleyDigraph, u: Iterable[int], v: Iterable[int]) -> Digraph:
    """Vertices U and V with the arcs running between the two sets."""
    us, vs = set(u), set(v)
    arcs = {(a, b) for a in us for b in vs if g.has_arc(a, b)}
    arcs |= {(b, a) for a in us for b in vs if g.has_arc(b, a)}
    return Digraph(tuple(sorted(us | vs)), frozenset(arcs))


def weak_components(g: MCayleyDigraph) -> OrbitPartition:
    return OrbitPartition.from_blocks(as_digraph(g).undirected_components())


def is_weakly_connected(g: MCayleyDigraph) -> bool:
    return len(weak_components(g).blocks) <= 1


def block_components(g: MCayleyDigraph) -> list[list[int]]:
    m = g.m
    parent = list(range(m))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for i in range(m):
        for j in range(m):
            if i != j and g.conn.sets[i][j]:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    comps: dict[int, list[int]] = {}
    for i in range(m):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def _is_complete_bipartite(d: Digraph, side_a: set[int], side_b: set[int]) -> bool:
    for a in side_a:
        for b in side_b:
            if (a, b) not in d.arcs or (b, a) not in d.arcs:
                return False
    edges_inside = sum(1 for x, y in d.arcs if (x in side_a) == (y in side_a))
    return edges_inside == 0 and len(d.arcs) == 2 * len(side_a) * len(side_b)


def classify_edge_type(g: MCayleyDigraph, i: int, j: int, h: Sequence[int]) -> str:
    """Tag the pair of parts as ``empty``, ``K33``, ``K22`` or ``other``."""
    if not is_graph_mode(g.mode):
        raise ModeError("edge types are defined for graph modes")
    if i == j:
        raise ValueError("parts must differ")
    sub = induced(g, list(g.part_vertices(i)) + list(g.part_vertices(j)))
    if not sub.arcs:
        return "empty"
    comps = sub.undirected_components()
    shapes = []
    for comp in comps:
        piece = sub.restrict(comp)
        side_a = {v for v in comp if g.part_of(v) == i}
        side_b = set(comp) - side_a
        if not _is_complete_bipartite(piece, side_a, side_b):
            return "other"
        shapes.append((len(side_a), len(side_b)))
    s_ij = g.conn.sets[i][j]
    t = g.group.table
    hset = frozenset(h)
    if shapes == [(3, 3), (3, 3)] and len(s_ij) == 3:
        x = min(s_ij)
        if frozenset(t[x][y] for y in hset) == s_ij:
            return "K33"
    if shapes == [(2, 2)] * 3:
        return "K22"
    return "other"


def delete_k33_edges(g: MCayleyDigraph, h: Sequence[int]) -> MCayleyDigraph:
    """Remove every pair of parts whose edge type is ``K33``."""
    changes: dict[tuple[int, int], frozenset[int]] = {}
    for i in range(g.m):
        for j in range(i + 1, g.m):
            if classify_edge_type(g, i, j, h) == "K33":
                changes[(i, j)] = frozenset()
                changes[(j, i)] = frozenset()
    return MCayleyDigraph(g.conn.replace(changes), g.mode)
