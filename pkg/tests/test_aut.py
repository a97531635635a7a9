import itertools

import pytest
from conftest import CATALOG, random_instance

from mcayley.aut import (
    ColoredDigraph,
    VertexBoundError,
    aut_mcayley,
    automorphism_group,
    colored,
    is_automorphism,
    isomorphism,
    mcayley_isomorphism,
    p_isomorphism,
)
from mcayley.digraph import ConnectionSets, build, complement
from mcayley.groups import make_named_group
from mcayley.perms import closure, right_regular, shape_tag
from mcayley.repro.census import iter_instances
from mcayley.repro.fixtures import fixture


def brute_aut(gamma, part_rule=None):
    """All vertex bijections preserving arcs (and the part rule), by exhaustion."""
    n = gamma.n
    arcs = set(gamma.arcs())
    order = gamma.group.order
    found = set()
    for p in itertools.permutations(range(n)):
        if part_rule == "fixed" and any(p[v] // order != v // order for v in range(n)):
            continue
        if part_rule == "setwise" and any(
            p[v] // order != p[(v // order) * order] // order for v in range(n)
        ):
            continue
        if all((p[u], p[v]) in arcs for u, v in arcs):
            found.add(p)
    return found


def brute_p_iso_exists(a, b):
    n, order = a.n, a.group.order
    arcs_b = set(b.arcs())
    arcs_a = a.arcs()
    if len(arcs_a) != len(arcs_b):
        return False
    for p in itertools.permutations(range(n)):
        if any(p[v] // order != p[(v // order) * order] // order for v in range(n)):
            continue
        if all((p[u], p[v]) in arcs_b for u, v in arcs_a):
            return True
    return False


SMALL = [("Z2", 2), ("Z2", 3), ("Z3", 2), ("Z2", 4), ("Z4", 2), ("Z2xZ2", 2)]


@pytest.mark.parametrize("group,m", SMALL)
def test_aut_matches_brute_force(stream, group, m):
    for k in range(12):
        gamma = random_instance(stream, group, m, "digraph" if k % 2 else "graph")
        for rule, parts in ((None, "none"), ("fixed", "fixed"), ("setwise", "setwise")):
            assert aut_mcayley(gamma, parts).element_set() == brute_aut(gamma, rule)


@pytest.mark.parametrize("group,m", CATALOG)
def test_order_equals_closure_and_contains_R(stream, group, m):
    for _ in range(15):
        gamma = random_instance(stream, group, m, "digraph")
        aut = aut_mcayley(gamma)
        assert closure(list(aut.generators), degree=gamma.n).order == aut.order
        assert all(is_automorphism(gamma, p) for p in aut.generators)
        assert right_regular(gamma.group, m).element_set() <= aut.element_set()


@pytest.mark.parametrize("group,m", CATALOG)
def test_aut_of_complement(stream, group, m):
    for _ in range(15):
        gamma = random_instance(stream, group, m, "digraph")
        assert aut_mcayley(gamma).element_set() == aut_mcayley(complement(gamma)).element_set()


def test_fixture_orders():
    f2 = aut_mcayley(fixture("F2").build())
    assert f2.order == 9 and shape_tag(f2) == "Z3^2"
    f8 = aut_mcayley(fixture("F8").build())
    assert f8.order == 18 and shape_tag(f8) == "(Z3^2):Z2"
    empty = automorphism_group(ColoredDigraph.from_arcs(4, []))
    assert empty.order == 24


def test_isomorphism_examples():
    f1 = fixture("F1")
    a, b = f1.build(), f1.build_partner()
    gamma = mcayley_isomorphism(a, b)
    assert gamma is not None and colored(a).is_isomorphism_to(colored(b), gamma)
    path = ColoredDigraph.from_arcs(3, [(0, 1), (1, 0), (1, 2), (2, 1)])
    triangle = ColoredDigraph.from_arcs(3, [(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)])
    assert isomorphism(path, triangle) is None
    assert isomorphism(path, path) is not None
    # colours must be respected
    red = ColoredDigraph.from_arcs(3, [(0, 1)], [1, 0, 0])
    blue = ColoredDigraph.from_arcs(3, [(0, 1)], [0, 0, 1])
    assert isomorphism(red, blue) is None


def test_p_isomorphism_basics():
    gamma = fixture("F4").build()
    assert p_isomorphism(gamma, gamma) is not None
    g = gamma.group
    r = right_regular(g, gamma.m)
    for x in r.elements():
        assert is_automorphism(gamma, x)


def test_p_isomorphism_against_brute_force():
    z2 = make_named_group("Z2")
    # a 2-PCayley graph and an isomorphic digraph that is not part-preserving
    gamma = build(ConnectionSets.from_dict(z2, 2, {(0, 1): [0], (1, 0): [0]}), "pcayley-graph")
    scrambled = build(ConnectionSets.from_dict(z2, 2, {(0, 0): [1], (1, 1): [1]}), "graph")
    assert mcayley_isomorphism(gamma, scrambled) is not None
    assert p_isomorphism(gamma, scrambled) is None
    assert not brute_p_iso_exists(gamma, scrambled)
    for a in iter_instances("Z3", 2, "pcayley-graph"):
        for b in iter_instances("Z3", 2, "pcayley-graph"):
            assert (p_isomorphism(a, b) is not None) == brute_p_iso_exists(a, b)


@pytest.mark.parametrize("group", ["Z2", "Z3", "Z4"])
def test_isomorphic_2pcayley_graphs_are_p_isomorphic(group):
    family = list(iter_instances(group, 2, "pcayley-graph"))
    pairs = 0
    for a, b in itertools.combinations(family, 2):
        if mcayley_isomorphism(a, b) is not None:
            pairs += 1
            assert p_isomorphism(a, b) is not None
    assert pairs > 0


def test_vertex_bound():
    gamma = fixture("cyclic-gadget(7)").build()
    with pytest.raises(VertexBoundError):
        aut_mcayley(gamma, vertex_bound=10)


def test_bound_from_environment(monkeypatch):
    monkeypatch.setenv("MCAYLEY_BOUND_AUT", "5")
    with pytest.raises(VertexBoundError):
        aut_mcayley(fixture("F2").build())
