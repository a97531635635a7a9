import itertools

import pytest

from mcayley.groups import (
    FiniteGroup,
    GroupError,
    automorphism_group,
    cyclic,
    dihedral,
    generating_set,
    groups_isomorphic,
    inner_automorphism,
    is_group_automorphism,
    make_named_group,
    subgroup_generated,
)

NAMES = ["Z1", "Z2", "Z3", "Z4", "Z5", "Z6", "Z2xZ2", "Z3xZ3", "D6", "D8", "S3"]


def brute_automorphisms(g):
    """Every bijection fixing 0 that respects the table (feasible for order <= 8)."""
    n = g.order
    found = []
    for rest in itertools.permutations(range(1, n)):
        images = (0,) + rest
        if all(images[g.table[a][b]] == g.table[images[a]][images[b]] for a in range(n) for b in range(n)):
            found.append(images)
    return sorted(found)


@pytest.mark.parametrize("name", NAMES)
def test_named_groups_are_groups(name):
    g = make_named_group(name)
    n = g.order
    assert all(g.table[x][g.inverse[x]] == 0 == g.table[g.inverse[x]][x] for x in range(n))
    assert len(subgroup_generated(g, generating_set(g))) == n


@pytest.mark.parametrize("name,order", [("Z3", 2), ("D6", 6), ("Z2xZ2", 6), ("Z4", 2), ("Z6", 2),
                                        ("Z3xZ3", 48), ("Z1", 1), ("Z2", 1), ("Z5", 4)])
def test_automorphism_group_orders(name, order):
    assert len(automorphism_group(make_named_group(name))) == order


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z4", "Z2xZ2", "D6", "Z5", "Z6", "D8"])
def test_automorphisms_match_brute_force(name):
    g = make_named_group(name)
    assert [a.images for a in automorphism_group(g)] == brute_automorphisms(g)


def test_dihedral_numbering():
    d6 = make_named_group("D6")
    a, b = 1, 3
    assert d6.element_order(a) == 3 and d6.element_order(b) == 2
    # b a b = a^-1, and b a^i is element 3 + i
    assert d6.table[d6.table[b][a]][b] == d6.inverse[a]
    for i in range(3):
        power = subgroup_generated(d6, [a])[i] if i else 0
        assert d6.table[b][power] == 3 + i


def test_cyclic_product_numbering():
    g = make_named_group("Z3xZ3")
    x, y = 1, 3
    for u in range(3):
        for v in range(3):
            xu = 0
            for _ in range(u):
                xu = g.table[xu][x]
            yv = 0
            for _ in range(v):
                yv = g.table[yv][y]
            assert g.table[xu][yv] == u + 3 * v


def test_subgroup_generated():
    assert subgroup_generated(make_named_group("Z6"), [2]) == [0, 2, 4]
    assert subgroup_generated(make_named_group("D6"), [1]) == [0, 1, 2]
    assert subgroup_generated(make_named_group("Z5"), []) == [0]


def test_inner_automorphisms():
    d6 = make_named_group("D6")
    inn = {inner_automorphism(d6, x).images for x in range(6)}
    assert len(inn) == 6  # D6 has trivial centre
    assert all(is_group_automorphism(d6, images) for images in inn)
    z4 = make_named_group("Z4")
    assert all(inner_automorphism(z4, x).is_identity() for x in range(4))


def test_isomorphism_detection():
    assert groups_isomorphic(cyclic(6), make_named_group("Z2xZ3")) is not None
    assert groups_isomorphic(cyclic(4), make_named_group("Z2xZ2")) is None
    assert groups_isomorphic(dihedral(6), make_named_group("S3")) is not None
    assert groups_isomorphic(dihedral(6), cyclic(6)) is None
    iso = groups_isomorphic(dihedral(6), make_named_group("S3"))
    s3 = make_named_group("S3")
    d6 = dihedral(6)
    assert all(iso[d6.table[a][b]] == s3.table[iso[a]][iso[b]] for a in range(6) for b in range(6))


def test_bad_tables_rejected():
    with pytest.raises(GroupError):
        FiniteGroup(((0, 1), (0, 1)))
    with pytest.raises(GroupError):
        FiniteGroup(((1, 0), (0, 1)))  # 0 is not the identity
    with pytest.raises(GroupError):
        make_named_group("Q8")
    # a Latin square with identity that is not associative
    loop = (
        (0, 1, 2, 3, 4),
        (1, 0, 3, 4, 2),
        (2, 4, 0, 1, 3),
        (3, 2, 4, 0, 1),
        (4, 3, 1, 2, 0),
    )
    with pytest.raises(GroupError):
        FiniteGroup(loop)


def test_json_round_trip():
    g = make_named_group("D6")
    again = FiniteGroup.from_json(g.to_json())
    assert again == g
    assert FiniteGroup.from_json("Z2xZ2") == make_named_group("Z2xZ2")


def test_order_bound():
    with pytest.raises(GroupError):
        automorphism_group(cyclic(30))
