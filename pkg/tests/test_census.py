import json

import pytest

from mcayley.digraph import ModeError, build
from mcayley.groups import make_named_group
from mcayley.normalizer import apply_to_digraph, enumerate_N
from mcayley.repro.census import (
    BudgetExceeded,
    CensusUnsupported,
    InstanceSpace,
    OrbitTool,
    ShardSpec,
    census,
    check_instance,
    merge,
    run_shard,
    shard_path,
)

SPACES = [
    ("Z2", 2, "digraph"), ("Z2", 2, "graph"), ("Z3", 2, "pcayley-graph"), ("Z3", 3, "pcayley-graph"),
    ("Z4", 2, "graph"), ("Z2xZ2", 2, "pcayley-digraph"), ("D6", 2, "pcayley-graph"), ("Z3", 2, "digraph"),
]


def expected_bits(g, m, mode):
    """Atom count from first principles."""
    n = g.order
    inv = g.inverse
    off = n * m * (m - 1)
    if mode.endswith("graph") and not mode.endswith("digraph"):
        off //= 2
        involutions = sum(1 for x in range(1, n) if inv[x] == x)
        diag = (involutions + (n - 1 - involutions) // 2) * m
    else:
        diag = (n - 1) * m
    return off + (0 if mode.startswith("pcayley") else diag)


@pytest.mark.parametrize("group,m,mode", SPACES)
def test_instance_space_is_a_bijection(group, m, mode):
    g = make_named_group(group)
    space = InstanceSpace(g, m, mode)
    assert space.nbits == expected_bits(g, m, mode)
    seen = set()
    for i in range(space.total):
        conn = space.decode(i)
        conn.validate(mode)
        assert space.encode(conn) == i
        seen.add(conn)
    assert len(seen) == space.total


def test_pcayley_graph_counts():
    for group, m in [("Z3", 2), ("Z3", 3), ("D6", 2), ("Z3", 4)]:
        g = make_named_group(group)
        assert InstanceSpace(g, m, "pcayley-graph").total == 2 ** (g.order * m * (m - 1) // 2)


@pytest.mark.parametrize("group,m,mode", SPACES[:6])
def test_orbits_are_normalizer_orbits(group, m, mode):
    g = make_named_group(group)
    space = InstanceSpace(g, m, mode)
    tool = OrbitTool(space.atom_permutations(), space.nbits)
    elements = list(enumerate_N(g, m))
    for i in range(0, space.total, max(1, space.total // 40)):
        gamma = space.build(i)
        direct = {space.encode(apply_to_digraph(e, gamma).conn) for e in elements}
        assert set(int(x) for x in tool.orbit(i)) == direct


def test_orbit_representatives_share_verdicts():
    space = InstanceSpace(make_named_group("Z3"), 2, "digraph")
    tool = OrbitTool(space.atom_permutations(), space.nbits)
    for i in range(0, space.total, 17):
        rep = tool.canonical(i)
        a, b = check_instance(space.build(i)), check_instance(space.build(rep))
        assert a.verdict == b.verdict and a.stats["aut_order"] == b.stats["aut_order"]


def test_encode_rejects_foreign_sets():
    space = InstanceSpace(make_named_group("Z3"), 2, "pcayley-graph")
    other = InstanceSpace(make_named_group("Z3"), 2, "digraph").decode(1)
    with pytest.raises(ModeError):
        space.encode(other)
    with pytest.raises(ValueError):
        space.decode(space.total)


def test_census_counts_and_aggregate(tmp_path):
    r = census("Z3", 3, "pcayley-graph", directory=tmp_path)
    assert (r.total, r.passing, r.aggregate) == (512, 512, True)
    assert r.summary_line() == "Z3 m=3 pcayley-graph: 512/512 mPCI"
    bad = census("Z2", 2, "digraph", directory=tmp_path)
    assert not bad.aggregate and bad.passing == 58 and bad.total == 64
    # every failing representative really fails
    space = InstanceSpace(make_named_group("Z2"), 2, "digraph")
    for i in bad.failing():
        assert not check_instance(space.build(i)).verdict


def test_sharding_matches_single_run(tmp_path):
    one = census("Z3", 2, "digraph", shards=1, directory=tmp_path / "a")
    four = census("Z3", 2, "digraph", shards=4, directory=tmp_path / "b")
    assert one.representatives == four.representatives
    assert one.to_json() == {**four.to_json(), "shards": 1}


def test_parallel_workers(tmp_path):
    serial = census("D6", 2, "pcayley-graph", shards=2, directory=tmp_path / "s")
    pooled = census("D6", 2, "pcayley-graph", shards=2, workers=2, directory=tmp_path / "p")
    assert serial.representatives == pooled.representatives


def test_budget_and_resume(tmp_path):
    spec = ShardSpec(0, 1)
    with pytest.raises(BudgetExceeded):
        run_shard("Z3", 2, "digraph", spec, tmp_path, budget_s=0.0)
    path = shard_path(tmp_path, make_named_group("Z3"), 2, "digraph", spec)
    records = [json.loads(line) for line in path.read_text().splitlines()]
    assert "checkpoint" in records[-1]
    # a torn line from a crash is dropped on resume
    with path.open("a") as fh:
        fh.write('{"instance_index": 9')
    summary = run_shard("Z3", 2, "digraph", spec, tmp_path, resume=True)
    assert summary["complete"]
    resumed = merge("Z3", 2, "digraph", 1, tmp_path)
    fresh = census("Z3", 2, "digraph", directory=tmp_path / "fresh")
    assert resumed.representatives == fresh.representatives
    # resuming a finished shard returns its summary without work
    assert run_shard("Z3", 2, "digraph", spec, tmp_path, resume=True) == summary


def test_shard_records(tmp_path):
    run_shard("Z3", 2, "pcayley-graph", ShardSpec(0, 1), tmp_path)
    path = shard_path(tmp_path, make_named_group("Z3"), 2, "pcayley-graph", ShardSpec(0, 1))
    lines = [json.loads(x) for x in path.read_text().splitlines()]
    reps = [x for x in lines if "instance_index" in x]
    assert [x["instance_index"] for x in reps] == sorted(x["instance_index"] for x in reps)
    assert all(set(x) >= {"instance_index", "sets_bits", "aut_order", "verdict", "orbit_size"} for x in reps)
    assert sum(x["orbit_size"] for x in reps) == 8
    assert lines[-1]["complete"]


def test_shard_spec():
    assert ShardSpec.parse("2/4") == ShardSpec(2, 4)
    for bad in ("4/4", "x", "1/0"):
        with pytest.raises(ValueError):
            ShardSpec.parse(bad)
    total = 1000
    pieces = [ShardSpec(k, 7).bounds(total) for k in range(7)]
    assert pieces[0][0] == 0 and pieces[-1][1] == total
    assert all(a[1] == b[0] for a, b in zip(pieces, pieces[1:]))


def test_envelope(tmp_path):
    with pytest.raises(CensusUnsupported):
        census("Z3", 5, "pcayley-graph", directory=tmp_path)
    with pytest.raises(CensusUnsupported):
        census("D6", 4, "pcayley-graph", directory=tmp_path)
    with pytest.raises(CensusUnsupported):
        census("Z3", 4, "pcayley-graph", directory=tmp_path)


def test_verdict_of_any_instance(tmp_path):
    r = census("Z2", 2, "digraph", directory=tmp_path)
    space = InstanceSpace(make_named_group("Z2"), 2, "digraph")
    for i in range(space.total):
        assert r.verdict_of(i) == check_instance(build(space.decode(i), "digraph")).verdict
