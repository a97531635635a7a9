"""Exhaustive census of the m-Cayley digraphs of a small group.

An instance is a bit vector over *atoms*. An atom is one element of one
connection set:

* off-diagonal slots ``(i, j)``, one atom per group element; in graph modes
  only ``i < j`` is stored and S_{j,i} is the inverse set;
* diagonal slots (non-P modes only), one atom per non-identity element, or
  per inverse pair ``{s, s^-1}`` in graph mode.

Bit ``k`` of the instance index is atom ``k``. Every element of the
normalizer N permutes the atoms, and the CI verdicts and Aut(gamma) order
are N-invariant (``gamma^n`` is isomorphic to ``gamma`` by ``n``, which
fixes R(G)). The census therefore checks one representative per N-orbit,
the least index in it, and weights its verdict by the orbit size.

Shards split the index range into contiguous pieces; a shard owns the
representatives that fall in its range. Each shard writes a JSON-lines
file: one record per representative in increasing index order, optional
checkpoint records, and a closing summary record.
"""

from __future__ import annotations

import json
import os
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..ci import CiReport, check_mCI_babai, check_mPCI_babai
from ..digraph import (
    ConnectionSets,
    MCayleyDigraph,
    build,
    is_graph_mode,
    is_pcayley_mode,
    normalize_mode,
)
from ..groups import FiniteGroup, make_named_group
from ..normalizer import enumerate_N

MAX_BITS = 24
LONG_RUN_BITS = 16
# instance spaces above LONG_RUN_BITS that run without the long-run flag
ALLOWED_LARGE = {("Z2", 4, "pcayley-digraph"), ("D6", 3, "pcayley-graph")}


class CensusError(RuntimeError):
    pass


class CensusUnsupported(CensusError):
    pass


class BudgetExceeded(CensusError):
    pass


@dataclass(frozen=True)
class Atom:
    i: int
    j: int
    elements: tuple[int, ...]


class InstanceSpace:
    """Bijection between ``range(2**nbits)`` and the connection-set families of one mode."""

    def __init__(self, group: FiniteGroup, m: int, mode: str) -> None:
        self.group = group
        self.m = m
        self.mode = normalize_mode(mode)
        graph = is_graph_mode(self.mode)
        inv = group.inverse
        n = group.order
        atoms: list[Atom] = []
        if not is_pcayley_mode(self.mode):
            for i in range(m):
                done: set[int] = set()
                for s in range(1, n):
                    if s in done:
                        continue
                    if graph:
                        pair = tuple(sorted({s, inv[s]}))
                        done.update(pair)
                        atoms.append(Atom(i, i, pair))
                    else:
                        atoms.append(Atom(i, i, (s,)))
        for i in range(m):
            for j in range(m):
                if i == j or (graph and i > j):
                    continue
                atoms.extend(Atom(i, j, (s,)) for s in range(n))
        self.atoms = tuple(atoms)
        self.nbits = len(atoms)
        self.total = 1 << self.nbits
        self._where: dict[tuple[int, int, tuple[int, ...]], int] = {}
        for k, a in enumerate(atoms):
            self._where[(a.i, a.j, a.elements)] = k
            if graph and a.i != a.j:
                self._where[(a.j, a.i, (inv[a.elements[0]],))] = k

    def decode(self, index: int) -> ConnectionSets:
        if not 0 <= index < self.total:
            raise ValueError(f"instance index {index} out of range")
        m = self.m
        inv = self.group.inverse
        rows: list[list[set[int]]] = [[set() for _ in range(m)] for _ in range(m)]
        graph = is_graph_mode(self.mode)
        for k, a in enumerate(self.atoms):
            if index >> k & 1:
                rows[a.i][a.j].update(a.elements)
                if graph and a.i != a.j:
                    rows[a.j][a.i].update(inv[s] for s in a.elements)
        return ConnectionSets.from_lists(self.group, rows)

    def encode(self, conn: ConnectionSets) -> int:
        conn.validate(self.mode)
        index = 0
        for k, a in enumerate(self.atoms):
            if set(a.elements) <= conn.sets[a.i][a.j]:
                index |= 1 << k
        if self.decode(index) != conn:
            raise ValueError("connection sets are not in this instance space")
        return index

    def build(self, index: int) -> MCayleyDigraph:
        return build(self.decode(index), self.mode)

    def atom_permutations(self) -> list[tuple[int, ...]]:
        """The distinct permutations of the atoms induced by N, identity first."""
        g = self.group
        t = g.table
        inv = g.inverse
        seen: dict[tuple[int, ...], None] = {}
        for e in enumerate_N(g, self.m):
            a = e.alpha.images
            image = []
            for atom in self.atoms:
                gi, gj_inv = e.left[atom.i], inv[e.left[atom.j]]
                elems = tuple(sorted({a[t[t[gj_inv][s]][gi]] for s in atom.elements}))
                image.append(self._where[(e.sigma[atom.i], e.sigma[atom.j], elems)])
            seen.setdefault(tuple(image), None)
        ident = tuple(range(self.nbits))
        perms = [ident] + [p for p in seen if p != ident]
        return perms


class OrbitTool:
    """Images of an instance index under every atom permutation, via byte lookup tables."""

    def __init__(self, perms: list[tuple[int, ...]], nbits: int) -> None:
        self.nbits = nbits
        self.nbytes = max(1, (nbits + 7) // 8)
        lut = np.zeros((self.nbytes, 256, len(perms)), dtype=np.uint64)
        for b in range(self.nbytes):
            for t in range(8):
                k = 8 * b + t
                if k >= nbits:
                    break
                targets = np.array([np.uint64(1) << np.uint64(p[k]) for p in perms], dtype=np.uint64)
                has = (np.arange(256) >> t) & 1 == 1
                lut[b, has, :] |= targets
        self.lut = lut

    def images(self, index: int) -> np.ndarray:
        out = self.lut[0, index & 0xFF].copy()
        for b in range(1, self.nbytes):
            out |= self.lut[b, (index >> (8 * b)) & 0xFF]
        return out

    def canonical(self, index: int) -> int:
        return int(self.images(index).min())

    def orbit(self, index: int) -> np.ndarray:
        return np.unique(self.images(index))


@dataclass(frozen=True)
class ShardSpec:
    k: int
    n: int

    @classmethod
    def parse(cls, text: str) -> ShardSpec:
        try:
            k, n = (int(x) for x in text.split("/"))
        except ValueError as exc:
            raise ValueError(f"shard must look like k/n, got {text!r}") from exc
        if not (n >= 1 and 0 <= k < n):
            raise ValueError(f"shard {text!r} out of range")
        return cls(k, n)

    def bounds(self, total: int) -> tuple[int, int]:
        return self.k * total // self.n, (self.k + 1) * total // self.n


def property_for(mode: str) -> str:
    return "mPCI" if is_pcayley_mode(mode) else "mCI"


def check_instance(gamma: MCayleyDigraph) -> CiReport:
    if is_pcayley_mode(gamma.mode):
        return check_mPCI_babai(gamma)
    return check_mCI_babai(gamma)


def _check_supported(group: FiniteGroup, m: int, mode: str, nbits: int, long_run: bool) -> None:
    if nbits > MAX_BITS:
        raise CensusUnsupported(f"{group.label()} m={m} {mode}: 2^{nbits} instances is beyond the supported envelope")
    if nbits > LONG_RUN_BITS and (group.label(), m, mode) not in ALLOWED_LARGE and not long_run:
        raise CensusUnsupported(f"{group.label()} m={m} {mode}: 2^{nbits} instances needs the long-run flag")


def shard_path(directory: str | os.PathLike, group: FiniteGroup, m: int, mode: str, shard: ShardSpec) -> Path:
    return Path(directory) / f"census_{group.label()}_m{m}_{mode}_shard{shard.k}of{shard.n}.jsonl"


def _read_records(path: Path) -> list[dict[str, Any]]:
    records = []
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                try:
                    records.append(json.loads(line))
                except json.JSONDecodeError:
                    break  # a torn final line from an interrupted run
    return records


def _resume_point(records: list[dict[str, Any]], lo: int) -> int:
    cursor = lo
    for rec in records:
        if "instance_index" in rec:
            cursor = max(cursor, rec["instance_index"] + 1)
        elif "checkpoint" in rec:
            cursor = max(cursor, rec["checkpoint"])
    return cursor


def run_shard(
    group: FiniteGroup | str,
    m: int,
    mode: str,
    shard: ShardSpec = ShardSpec(0, 1),
    directory: str | os.PathLike = ".",
    resume: bool = False,
    budget_s: float | None = None,
    long_run: bool = False,
    check: Callable[[MCayleyDigraph], CiReport] = check_instance,
) -> dict[str, Any]:
    """Process one shard and return its summary record."""
    if isinstance(group, str):
        group = make_named_group(group)
    mode = normalize_mode(mode)
    space = InstanceSpace(group, m, mode)
    _check_supported(group, m, mode, space.nbits, long_run)
    tool = OrbitTool(space.atom_permutations(), space.nbits)
    lo, hi = shard.bounds(space.total)
    path = shard_path(directory, group, m, mode, shard)
    path.parent.mkdir(parents=True, exist_ok=True)
    cursor = lo
    if resume and path.exists():
        records = _read_records(path)
        for rec in records:
            if rec.get("complete"):
                return rec
        cursor = _resume_point(records, lo)
        # rewrite without any torn tail
        with path.open("w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
        mode_flag = "a"
    else:
        mode_flag = "w"
    start = time.monotonic()
    seen = bytearray(hi - lo)
    marks = np.frombuffer(seen, dtype=np.uint8)
    with path.open(mode_flag) as fh:
        pos = cursor - lo
        while True:
            pos = seen.find(0, pos)
            if pos < 0:
                break
            i = lo + pos
            orbit = tool.orbit(i)
            inside = orbit[(orbit >= lo) & (orbit < hi)].astype(np.int64) - lo
            marks[inside] = 1
            if int(orbit[0]) == i:
                report = check(space.build(i))
                rec: dict[str, Any] = {
                    "instance_index": i,
                    "sets_bits": format(i, f"0{space.nbits}b") if space.nbits else "",
                    "orbit_size": int(orbit.size),
                    "aut_order": report.stats.get("aut_order"),
                    "verdict": report.verdict,
                }
                if not report.verdict and report.witness is not None:
                    rec["witness"] = report.witness.get("subgroup", {}).get("generators")
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
            pos += 1
            if budget_s is not None and time.monotonic() - start > budget_s:
                nxt = seen.find(0, pos)
                if nxt >= 0:
                    fh.write(json.dumps({"checkpoint": lo + nxt}, sort_keys=True) + "\n")
                    fh.flush()
                    raise BudgetExceeded(f"shard {shard.k}/{shard.n} stopped at index {lo + nxt}; rerun with resume")
        summary = {
            "complete": True,
            "group": group.label(),
            "m": m,
            "mode": mode,
            "shard": [shard.k, shard.n],
            "range": [lo, hi],
            "nbits": space.nbits,
        }
        fh.write(json.dumps(summary, sort_keys=True) + "\n")
    return summary


@dataclass
class CensusResult:
    group: str
    m: int
    mode: str
    property: str
    nbits: int
    total: int
    shards: int
    representatives: dict[int, dict[str, Any]] = field(default_factory=dict)

    @property
    def covered(self) -> int:
        return sum(r["orbit_size"] for r in self.representatives.values())

    @property
    def passing(self) -> int:
        return sum(r["orbit_size"] for r in self.representatives.values() if r["verdict"])

    @property
    def complete(self) -> bool:
        return self.covered == self.total

    @property
    def aggregate(self) -> bool:
        return self.complete and self.passing == self.total

    def verdict_of(self, index: int, tool: OrbitTool | None = None) -> bool:
        """Verdict of any instance, through its orbit representative."""
        if tool is None:
            space = InstanceSpace(make_named_group(self.group), self.m, self.mode)
            tool = OrbitTool(space.atom_permutations(), space.nbits)
        return bool(self.representatives[tool.canonical(index)]["verdict"])

    def failing(self) -> list[int]:
        return sorted(i for i, r in self.representatives.items() if not r["verdict"])

    def summary_line(self) -> str:
        return f"{self.group} m={self.m} {self.mode}: {self.passing}/{self.total} {self.property}"

    def to_json(self, include_representatives: bool = False) -> dict[str, Any]:
        out: dict[str, Any] = {
            "group": self.group,
            "m": self.m,
            "mode": self.mode,
            "property": self.property,
            "nbits": self.nbits,
            "total": self.total,
            "covered": self.covered,
            "passing": self.passing,
            "orbits": len(self.representatives),
            "complete": self.complete,
            "aggregate": self.aggregate,
            "shards": self.shards,
            "failing_representatives": self.failing(),
        }
        if include_representatives:
            out["representatives"] = [self.representatives[i] for i in sorted(self.representatives)]
        return out


def merge(
    group: FiniteGroup | str, m: int, mode: str, shards: int, directory: str | os.PathLike = "."
) -> CensusResult:
    """Combine the shard files of one census."""
    if isinstance(group, str):
        group = make_named_group(group)
    mode = normalize_mode(mode)
    space = InstanceSpace(group, m, mode)
    result = CensusResult(group.label(), m, mode, property_for(mode), space.nbits, space.total, shards)
    for k in range(shards):
        path = shard_path(directory, group, m, mode, ShardSpec(k, shards))
        if not path.exists():
            continue
        for rec in _read_records(path):
            if "instance_index" in rec:
                result.representatives[rec["instance_index"]] = rec
    return result


def _shard_task(args: tuple) -> dict[str, Any]:
    group, m, mode, k, n, directory, resume, budget_s, long_run = args
    try:
        return run_shard(group, m, mode, ShardSpec(k, n), directory, resume, budget_s, long_run)
    except BudgetExceeded as exc:
        return {"complete": False, "shard": [k, n], "error": str(exc)}


def census(
    group: FiniteGroup | str,
    m: int,
    mode: str,
    shards: int = 1,
    workers: int = 1,
    directory: str | os.PathLike = ".",
    resume: bool = False,
    budget_s: float | None = None,
    long_run: bool = False,
) -> CensusResult:
    """Run every shard (in a process pool when ``workers > 1``) and merge."""
    label = group if isinstance(group, str) else group.label()
    if not isinstance(group, str):
        label = group.name or group.label()
    tasks = [(label, m, mode, k, shards, str(directory), resume, budget_s, long_run) for k in range(shards)]
    if workers > 1 and shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_shard_task, tasks))
    else:
        summaries = [_shard_task(t) for t in tasks]
    result = merge(label, m, mode, shards, directory)
    incomplete = [s for s in summaries if not s.get("complete")]
    if incomplete:
        raise BudgetExceeded("; ".join(s["error"] for s in incomplete))
    if not result.complete:
        raise CensusError(f"merged census covers {result.covered} of {result.total} instances")
    return result


def iter_instances(group: FiniteGroup | str, m: int, mode: str) -> Iterator[MCayleyDigraph]:
    """Every instance of a small space in index order (for cross-checks)."""
    if isinstance(group, str):
        group = make_named_group(group)
    space = InstanceSpace(group, m, mode)
    for i in range(space.total):
        yield space.build(i)
