import itertools

import pytest
from conftest import random_instance, random_nelem

from mcayley.aut import aut_mcayley
from mcayley.ci import (
    PART_ROUTE_THRESHOLD,
    check_mCI_babai,
    check_mCI_direct,
    check_mPCI_babai,
    check_mPCI_direct,
    count_part_semiregular,
    cross_validate,
    enumerate_part_semiregular,
    enumerate_semiregular,
    informative_components,
)
from mcayley.digraph import ConnectionSets, build, multipartite_complement
from mcayley.groups import FiniteGroup, groups_isomorphic, make_named_group
from mcayley.normalizer import apply_to_digraph
from mcayley.perms import (
    closure,
    compose,
    conjugate_set,
    identity,
    orbits,
    part_partition,
    right_regular,
    right_translation,
    semiregular_conjugator,
)
from mcayley.repro.census import iter_instances
from mcayley.repro.fixtures import fixture


def table_group(elements):
    """The abstract group of a set of permutations, identity first."""
    elems = sorted(elements)
    index = {p: k for k, p in enumerate(elems)}
    return FiniteGroup(tuple(tuple(index[compose(a, b)] for b in elems) for a in elems))


def brute_semiregular(aut, g, parts=None):
    """Subgroups of order |G| generated by at most two elements, kept when
    every non-identity element is fixed-point-free and the group is G."""
    n = aut.degree
    ident = identity(n)
    pool = [p for p in aut.elements() if p != ident and all(p[x] != x for x in range(n))]
    found = set()
    for size in (1, 2):
        for gens in itertools.combinations(pool, size):
            elems = naive_closure(list(gens), g.order)
            if elems is None or len(elems) != g.order:
                continue
            if any(q != ident and any(q[x] == x for x in range(n)) for q in elems):
                continue
            if parts is not None and orbits(closure(list(gens))) != parts:
                continue
            if groups_isomorphic(table_group(elems), g) is not None:
                found.add(elems)
    return found


def naive_closure(gens, limit):
    seen = {identity(len(gens[0]))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = compose(p, s)
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
                    if len(seen) > limit:
                        return None
        frontier = nxt
    return frozenset(seen)


@pytest.mark.parametrize("fid", ["F2", "F4", "F9", "cyclic-gadget(5)"])
def test_enumerate_semiregular_matches_brute_force(fid):
    gamma = fixture(fid).build()
    aut = aut_mcayley(gamma)
    g = gamma.group
    got = {w.key for w in enumerate_semiregular(aut, g, gamma.m)}
    assert got == brute_semiregular(aut, g)
    parts = part_partition(g.order, gamma.m)
    got_parts = {w.key for w in enumerate_semiregular(aut, g, gamma.m, parts)}
    assert got_parts == brute_semiregular(aut, g, parts)
    assert got_parts == {w.key for w in enumerate_part_semiregular(gamma)} or any(
        gamma.conn.sets[i][i] for i in range(gamma.m)
    )


def test_f2_witnesses_are_the_listed_pair():
    fx = fixture("F2")
    gamma = fx.build()
    keys = {w.key for w in enumerate_semiregular(aut_mcayley(gamma), gamma.group, 2)}
    ab = closure([fx.listed["ab"]]).element_set()
    ab_inv = closure([fx.listed["ab^-1"]]).element_set()
    assert keys == {ab, ab_inv}
    assert right_regular(gamma.group, 2).element_set() in keys


def test_gadget_cyclic_witnesses():
    fx = fixture("cyclic-gadget(5)")
    gamma = fx.build()
    witnesses = {w.key for w in enumerate_part_semiregular(gamma)}
    listed = [closure([p]).element_set() for name, p in fx.listed.items() if name.startswith("alpha1*")]
    assert len(listed) == 4 and set(listed) <= witnesses


def test_empty_z2_single_witness():
    z2 = make_named_group("Z2")
    gamma = build(ConnectionSets.from_dict(z2, 1, {}), "digraph")
    ws = enumerate_semiregular(aut_mcayley(gamma), z2, 1)
    assert [w.key for w in ws] == [right_regular(z2, 1).element_set()]
    assert check_mCI_babai(gamma).verdict


def test_witness_isomorphisms_are_homomorphisms():
    gamma = fixture("F4").build()
    g = gamma.group
    for w in enumerate_part_semiregular(gamma):
        for p, q in itertools.product(w.subgroup.elements(), repeat=2):
            assert w.iso_to_G[compose(p, q)] == g.table[w.iso_to_G[p]][w.iso_to_G[q]]


def test_mci_examples():
    f2 = check_mCI_babai(fixture("F2").build())
    assert not f2.verdict and f2.witness["kind"] == "non-conjugate"
    assert f2.stats["reverified_by_scan"] == 9
    cycle = check_mCI_babai(fixture("dir-cycle(2,2)").build())
    assert cycle.verdict and cycle.witness["kind"] == "conjugators"


def test_conjugators_really_conjugate():
    for gamma in iter_instances("Z3", 2, "graph"):
        report = check_mCI_babai(gamma)
        assert report.verdict
        keys = {w.key for w in enumerate_semiregular(aut_mcayley(gamma), gamma.group, 2)}
        r = right_regular(gamma.group, 2).element_set()
        images = {conjugate_set(r, tuple(c)) for c in report.witness["conjugators"]}
        assert images == keys


@pytest.mark.parametrize("fid", ["F4", "F5", "F6", "F7", "F8", "F9", "F10", "cyclic-gadget(5)", "cyclic-gadget(7)"])
def test_negative_fixtures_fail_mpci(fid):
    assert not check_mPCI_babai(fixture(fid).build()).verdict


def test_mpci_rejects_diagonal():
    with pytest.raises(ValueError):
        check_mPCI_babai(fixture("F2").build())
    with pytest.raises(ValueError):
        check_mPCI_babai(fixture("F9").build(), route="sideways")


def test_z2_2pcayley_graphs_all_pass():
    assert all(check_mPCI_babai(d).verdict for d in iter_instances("Z2", 2, "pcayley-graph"))


ROUTE_FAMILIES = [
    ("Z2", 2, "pcayley-digraph"), ("Z2", 3, "pcayley-graph"), ("Z3", 2, "pcayley-digraph"),
    ("Z3", 3, "pcayley-graph"), ("Z4", 2, "pcayley-graph"), ("Z2xZ2", 2, "pcayley-graph"),
    ("D6", 2, "pcayley-graph"), ("Z5", 2, "pcayley-graph"), ("Z6", 2, "pcayley-graph"),
]


@pytest.mark.parametrize("group,m,mode", ROUTE_FAMILIES)
def test_routes_agree(group, m, mode):
    for gamma in iter_instances(group, m, mode):
        reports = {r: check_mPCI_babai(gamma, route=r) for r in ("elements", "parts", "count")}
        verdicts = {r: rep.verdict for r, rep in reports.items()}
        assert len(set(verdicts.values())) == 1, verdicts
        sizes = {rep.stats["subgroups_enumerated"] for rep in reports.values()}
        assert len(sizes) == 1
        assert count_part_semiregular(gamma) == len(enumerate_part_semiregular(gamma))


@pytest.mark.parametrize("fid", ["F3", "F4", "F5", "F6", "F7", "F8", "F9", "F10"])
def test_routes_agree_on_fixtures(fid):
    gamma = fixture(fid).build()
    parts = enumerate_part_semiregular(gamma)
    assert count_part_semiregular(gamma) == len(parts)
    fixing = aut_mcayley(gamma, "fixed")
    if fixing.order <= PART_ROUTE_THRESHOLD:
        scan = enumerate_semiregular(fixing, gamma.group, gamma.m, part_partition(gamma.group.order, gamma.m))
        assert {w.key for w in scan} == {w.key for w in parts}
    assert check_mPCI_babai(gamma, route="count").verdict == check_mPCI_babai(gamma, route="parts").verdict


def test_informative_components():
    gamma = fixture("F4").build()
    assert informative_components(gamma) == [[0, 1, 2, 3]]
    z3 = make_named_group("Z3")
    loose = build(ConnectionSets.from_dict(z3, 3, {(0, 1): [0, 1, 2], (1, 0): [0, 1, 2]}), "pcayley-graph")
    assert informative_components(loose) == [[0], [1], [2]]
    # three free parts: 1 * 1 * 1 * |Aut Z3|^2 subgroups
    assert count_part_semiregular(loose) == 4 == len(enumerate_part_semiregular(loose))


def test_direct_examples(stream):
    g = make_named_group("D6")
    for _ in range(10):
        gamma = random_instance(stream, g, 2, "digraph")
        sigma = apply_to_digraph(random_nelem(stream, g, 2), gamma)
        rep = check_mCI_direct(gamma, sigma)
        assert rep.verdict and rep.witness["kind"] == "normalizer-element"
        assert check_mCI_direct(gamma, gamma).verdict
    f1 = fixture("F1")
    rep = check_mCI_direct(f1.build(), f1.build_partner())
    assert not rep.verdict and any("diagonal" in note for note in rep.notes)
    scan = check_mCI_direct(f1.build(), f1.build_partner(), fix_first=False, method="scan")
    assert not scan.verdict and scan.stats["elements_scanned"] == 324


def test_direct_vacuous_when_unrelated():
    z3 = make_named_group("Z3")
    a = build(ConnectionSets.from_dict(z3, 2, {}), "pcayley-graph")
    b = build(ConnectionSets.from_dict(z3, 2, {(0, 1): [0], (1, 0): [0]}), "pcayley-graph")
    rep = check_mPCI_direct(a, b)
    assert rep.verdict and rep.vacuous


def relabel(gamma, c):
    """Sets of the digraph obtained by moving vertex v to c[v]."""
    n, m = gamma.group.order, gamma.m
    arcs = {(c[u], c[v]) for u, v in gamma.arcs()}
    rows = [[{y for y in range(n) if (i * n, j * n + y) in arcs} for j in range(m)] for i in range(m)]
    return ConnectionSets.from_lists(gamma.group, rows)


@pytest.mark.parametrize("fid", ["F4", "F5", "F9"])
def test_direct_fails_on_standardized_witness(fid):
    gamma = fixture(fid).build()
    g, m = gamma.group, gamma.m
    reference = right_regular(g, m)
    bad = [w for w in enumerate_part_semiregular(gamma) if w.key != reference.element_set()]
    report = check_mPCI_babai(gamma, route="elements")
    outside = {tuple(map(tuple, report.witness["subgroup"]["elements"]))}
    witness = next(w for w in bad if tuple(w.subgroup.elements()) in outside)
    iso = {p: right_translation(g, m, x) for p, x in witness.iso_to_G.items()}
    c = semiregular_conjugator(witness.subgroup, reference, iso)
    sigma = build(relabel(gamma, c), gamma.mode)
    assert set(sigma.arcs()) == {(c[u], c[v]) for u, v in gamma.arcs()}
    assert not check_mPCI_direct(gamma, sigma).verdict
    assert not check_mPCI_direct(gamma, sigma, fix_first=False, method="scan").verdict


@pytest.mark.parametrize("group,mode", [("Z3", "pcayley-digraph"), ("Z4", "pcayley-graph")])
def test_direct_mc_consistency(stream, group, mode):
    family = list(iter_instances(group, 2, mode))
    for _ in range(60):
        a, b = stream.choice(family), stream.choice(family)
        one = check_mPCI_direct(a, b)
        two = check_mPCI_direct(multipartite_complement(a), multipartite_complement(b))
        assert (one.verdict, one.vacuous) == (two.verdict, two.vacuous)


@pytest.mark.parametrize("group,m,mode", [("Z3", 3, "pcayley-graph"), ("D6", 2, "pcayley-graph"),
                                          ("Z2", 3, "pcayley-digraph"), ("Z4", 2, "pcayley-graph")])
def test_babai_mc_invariance(group, m, mode):
    for gamma in iter_instances(group, m, mode):
        assert check_mPCI_babai(gamma).verdict == check_mPCI_babai(multipartite_complement(gamma)).verdict


CROSS = [
    ("Z2", 2, "digraph", "mCI"), ("Z3", 2, "digraph", "mCI"), ("Z4", 2, "graph", "mCI"),
    ("Z2xZ2", 2, "graph", "mCI"), ("Z3", 2, "graph", "mCI"), ("Z2", 3, "graph", "mCI"),
    ("Z2", 2, "pcayley-digraph", "mPCI"), ("Z3", 2, "pcayley-graph", "mPCI"),
    ("Z4", 2, "pcayley-graph", "mPCI"), ("Z2xZ2", 2, "pcayley-digraph", "mPCI"),
    ("Z2", 3, "pcayley-digraph", "mPCI"),
]


@pytest.mark.parametrize("group,m,mode,prop", CROSS)
def test_cross_validation(group, m, mode, prop):
    result = cross_validate(list(iter_instances(group, m, mode)), prop)
    assert result["agree"]


def test_cross_validation_single_instance():
    # sigma: gamma relabelled so that the non-conjugate witness becomes R(G)
    gamma = fixture("F2").build()
    g = gamma.group
    reference = right_regular(g, 2)
    witness = next(w for w in enumerate_semiregular(aut_mcayley(gamma), g, 2) if w.key != reference.element_set())
    iso = {p: right_translation(g, 2, x) for p, x in witness.iso_to_G.items()}
    sigma = build(relabel(gamma, semiregular_conjugator(witness.subgroup, reference, iso)), gamma.mode)
    result = cross_validate([gamma, sigma], "mCI")
    assert result["agree"]
    assert result["rows"][0] == {"babai": False, "direct": False, "counterexample": 1}
