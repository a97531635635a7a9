import itertools
import json

import pytest
from conftest import CATALOG, random_instance

from mcayley.digraph import (
    ConnectionSets,
    ModeError,
    block_components,
    build,
    classify_edge_type,
    complement,
    delete_k33_edges,
    induced,
    induced_between,
    is_weakly_connected,
    load_connection_sets,
    multipartite_complement,
    weak_components,
)
from mcayley.groups import make_named_group
from mcayley.perms import right_translation
from mcayley.repro.census import iter_instances
from mcayley.repro.fixtures import fixture


def arcs_by_definition(conn):
    """Arc set straight from the definition: (x_i, y_j) iff y x^-1 in S_ij."""
    g = conn.group
    n = g.order
    out = set()
    for i, j in itertools.product(range(conn.m), repeat=2):
        for x, y in itertools.product(range(n), repeat=2):
            if g.table[y][g.inverse[x]] in conn.sets[i][j]:
                out.add((i * n + x, j * n + y))
    return out


def components(vertices, arcs):
    """Undirected components by breadth-first search."""
    nb = {v: set() for v in vertices}
    for u, v in arcs:
        nb[u].add(v)
        nb[v].add(u)
    seen, comps = set(), []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp, stack = [], [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in nb[x] - seen:
                seen.add(y)
                stack.append(y)
        comps.append(sorted(comp))
    return comps


@pytest.mark.parametrize("group,m", CATALOG)
@pytest.mark.parametrize("mode", ["digraph", "graph", "pcayley-digraph", "pcayley-graph"])
def test_arcs_match_definition(stream, group, m, mode):
    for _ in range(20):
        gamma = random_instance(stream, group, m, mode)
        arcs = set(gamma.arcs())
        assert arcs == arcs_by_definition(gamma.conn)
        g = gamma.group
        assert gamma.arc_count() == sum(len(s) for row in gamma.conn.sets for s in row) * g.order
        for s in range(g.order):
            r = right_translation(g, m, s)
            assert {(r[u], r[v]) for u, v in arcs} == arcs
        if mode.endswith("graph") and not mode.endswith("digraph"):
            assert gamma.is_symmetric()


def test_directed_cycle_on_eight_vertices():
    gamma = fixture("dir-cycle(2,2)").build()
    assert gamma.n == 8 and gamma.arc_count() == 8
    assert all(bin(b).count("1") == 1 for b in gamma.out)
    v, seen = 0, []
    for _ in range(8):
        seen.append(v)
        v = gamma.out[v].bit_length() - 1
    assert v == 0 and sorted(seen) == list(range(8))


def test_empty_sets_give_isolated_vertices():
    g = make_named_group("Z2")
    gamma = build(ConnectionSets.from_dict(g, 2, {}), "pcayley-graph")
    assert gamma.n == 4 and gamma.arc_count() == 0
    assert len(weak_components(gamma).blocks) == 4
    assert block_components(gamma) == [[0], [1]]


def test_gadget_blocks():
    gamma = fixture("cyclic-gadget(5)").build()
    n = 5
    parts = [list(gamma.part_vertices(i)) for i in range(4)]
    for a, b in ((0, 1), (2, 3)):
        d = induced(gamma, parts[a] + parts[b])
        comps = components(d.vertices, d.arcs)
        # one 10-cycle: connected, every vertex of degree 2
        assert len(comps) == 1 and len(d.arcs) == 2 * 2 * n
        assert all(sum(1 for u, _ in d.arcs if u == v) == 2 for v in d.vertices)
    mid = induced_between(gamma, parts[1], parts[2])
    assert len(mid.arcs) == 2 * n * n
    assert all((u, v) in mid.arcs for u in parts[1] for v in parts[2])


def test_mode_violations():
    z3 = make_named_group("Z3")
    with pytest.raises(ModeError):
        build(ConnectionSets.from_dict(z3, 1, {(0, 0): [0]}), "digraph")
    with pytest.raises(ModeError):
        build(ConnectionSets.from_dict(z3, 2, {(0, 1): [1]}), "graph")
    with pytest.raises(ModeError):
        build(ConnectionSets.from_dict(z3, 2, {(0, 0): [1, 2]}), "pcayley-graph")
    with pytest.raises(ModeError):
        build(ConnectionSets.from_dict(z3, 1, {(0, 0): [5]}), "digraph")
    with pytest.raises(ModeError):
        build(ConnectionSets.from_dict(z3, 1, {}), "hypergraph")
    build(ConnectionSets.from_dict(z3, 2, {(0, 1): [1], (1, 0): [2]}), "graph")


def test_complement_examples():
    z2 = make_named_group("Z2")
    empty = build(ConnectionSets.from_dict(z2, 1, {}), "digraph")
    assert set(complement(empty).arcs()) == {(0, 1), (1, 0)}
    full = build(ConnectionSets.from_dict(z2, 2, {(0, 1): [0, 1], (1, 0): [0, 1]}), "pcayley-graph")
    assert multipartite_complement(full).conn.sets[0][1] == frozenset()
    matching = build(ConnectionSets.from_dict(z2, 2, {(0, 1): [1], (1, 0): [1]}), "pcayley-graph")
    assert multipartite_complement(matching).conn.sets[0][1] == frozenset({0})
    with pytest.raises(ModeError):
        multipartite_complement(build(ConnectionSets.from_dict(z2, 1, {(0, 0): [1]}), "digraph"))


@pytest.mark.parametrize("group,m", CATALOG)
def test_complements_are_involutions(stream, group, m):
    for _ in range(30):
        gamma = random_instance(stream, group, m, "digraph")
        c = complement(gamma)
        assert complement(c) == gamma
        n = gamma.n
        assert set(c.arcs()) == {(u, v) for u in range(n) for v in range(n) if u != v} - set(gamma.arcs())
        p = random_instance(stream, group, m, "pcayley-graph")
        mc = multipartite_complement(p)
        assert multipartite_complement(mc) == p
        assert all(not mc.conn.sets[i][i] for i in range(m))


def test_induced_trivial_cases():
    gamma = fixture("F2").build()
    assert not induced(gamma, []).arcs
    assert induced(gamma, range(gamma.n)).arcs == frozenset(gamma.arcs())


def test_triangles_give_one_block_component():
    z3 = make_named_group("Z3")
    sets = {(i, j): [0] for i in range(3) for j in range(3) if i != j}
    gamma = build(ConnectionSets.from_dict(z3, 3, sets), "graph")
    assert len(weak_components(gamma).blocks) == 3
    assert block_components(gamma) == [[0, 1, 2]]


def test_double_complete_bipartite_witness():
    z2 = make_named_group("Z2")
    gamma = build(ConnectionSets.from_dict(z2, 2, {(0, 1): [0], (1, 0): [0]}), "pcayley-graph")
    assert len(weak_components(gamma).blocks) == 2
    assert block_components(gamma) == [[0, 1]]
    assert not is_weakly_connected(gamma)


def is_two_complete_bipartite(gamma):
    """Two components, each an equal split of the two parts joined completely."""
    n = gamma.group.order
    comps = components(range(gamma.n), gamma.arcs())
    if gamma.m != 2 or n % 2 or len(comps) != 2:
        return False
    arcs = set(gamma.arcs())
    for comp in comps:
        a = [v for v in comp if v < n]
        b = [v for v in comp if v >= n]
        if len(a) != n // 2 or len(b) != n // 2:
            return False
        if any((u, v) not in arcs or (v, u) not in arcs for u in a for v in b):
            return False
    return True


@pytest.mark.parametrize("group,m", [("Z2", 2), ("Z2", 3), ("Z4", 2), ("Z4", 3)])
def test_both_disconnected_forces_double_complete_bipartite(group, m):
    both = 0
    for gamma in iter_instances(group, m, "pcayley-graph"):
        mc = multipartite_complement(gamma)
        if len(components(range(gamma.n), gamma.arcs())) > 1 and len(components(range(mc.n), mc.arcs())) > 1:
            both += 1
            assert m == 2 and is_two_complete_bipartite(gamma)
        # across parts the two can never both be split
        assert len(block_components(gamma)) == 1 or len(block_components(mc)) == 1
    assert both > 0 if m == 2 else both == 0


def test_edge_types_in_d6():
    d6 = make_named_group("D6")
    h = [0, 1, 2]
    inv = d6.inverse

    def pair(s):
        return build(ConnectionSets.from_dict(d6, 2, {(0, 1): s, (1, 0): [inv[x] for x in s]}), "pcayley-graph")

    assert classify_edge_type(pair(h), 0, 1, h) == "K33"
    assert classify_edge_type(pair([3, 4, 5]), 0, 1, h) == "K33"
    assert classify_edge_type(pair([]), 0, 1, h) == "empty"
    assert classify_edge_type(pair([0, 3, 1]), 0, 1, h) == "other"
    # every 2-subset, against an independent component census
    kinds = {}
    for s in itertools.combinations(range(6), 2):
        gamma = pair(list(s))
        comps = components(range(12), gamma.arcs())
        arcs = set(gamma.arcs())
        k22 = len(comps) == 3 and all(
            len(c) == 4 and sum(1 for u in c for v in c if (u, v) in arcs) == 8 for c in comps
        )
        tag = classify_edge_type(gamma, 0, 1, h)
        assert (tag == "K22") == k22
        assert tag in ("K22", "other")
        kinds[s] = tag
    assert "K22" in kinds.values() and "other" in kinds.values()
    with pytest.raises(ModeError):
        classify_edge_type(fixture("F9").build(), 0, 1, h)


def test_delete_k33_edges():
    d6 = make_named_group("D6")
    sets = {(0, 1): [0, 1, 2], (1, 0): [0, 2, 1], (1, 2): [0, 3], (2, 1): [0, 3]}
    gamma = build(ConnectionSets.from_dict(d6, 3, sets), "pcayley-graph")
    trimmed = delete_k33_edges(gamma, [0, 1, 2])
    assert not trimmed.conn.sets[0][1] and not trimmed.conn.sets[1][0]
    assert trimmed.conn.sets[1][2] == frozenset({0, 3})


def test_json_and_dimacs(tmp_path):
    fx = fixture("F2")
    gamma = fx.build()
    path = tmp_path / "f2.json"
    path.write_text(json.dumps(gamma.conn.to_json(gamma.mode)))
    conn, mode = load_connection_sets(str(path))
    assert build(conn, mode) == gamma and mode == "digraph"
    text = gamma.to_dimacs()
    lines = [ln for ln in text.splitlines() if ln.startswith("a ")]
    assert len(lines) == 15 and "p arc 6 15" in text
    assert {tuple(map(int, ln.split()[1:])) for ln in lines} == set(gamma.arcs())
    inline = gamma.conn.to_json(gamma.mode)
    inline["group"] = gamma.group.to_json()
    assert ConnectionSets.from_json(inline)[0] == gamma.conn
