"""Small classification statements checked at census scale.

Three bundles:

* censuses whose aggregate verdict is claimed (trivial group, Z2 in the
  PCayley digraph modes, Z3 as a 2-CI group) and one that must fail (Z2 is
  not 2-DCI, since only the trivial group is m-DCI);
* the negative fixtures F1-F10, each of which must reproduce its failure;
* consistency: Z3 sits inside D6 and both pass the 3-PCI census, and a
  passing census at m implies a passing one at m - 1.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass, field
from typing import Any

from ..groups import (
    FiniteGroup,
    groups_isomorphic,
    make_named_group,
    subgroup_generated,
)
from .census import CensusResult, census
from .fixtures import run_fixture


@dataclass
class Claim:
    name: str
    expected: bool
    actual: bool
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.expected == self.actual

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "expected": self.expected, "actual": self.actual,
                "detail": self.detail, "passed": self.passed}


@dataclass
class TheoremReport:
    claims: list[Claim] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def to_json(self) -> dict[str, Any]:
        return {"claims": [c.to_json() for c in self.claims], "passed": self.passed}

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}" for c in self.claims]


# (group, m, mode, aggregate verdict expected)
CENSUS_CLAIMS: tuple[tuple[str, int, str, bool], ...] = (
    ("Z1", 2, "digraph", True),
    ("Z1", 3, "digraph", True),
    ("Z2", 2, "pcayley-digraph", True),
    ("Z2", 3, "pcayley-digraph", True),
    ("Z2", 2, "digraph", False),
    ("Z3", 2, "graph", True),
    ("Z3", 2, "pcayley-graph", True),
    ("Z3", 3, "pcayley-graph", True),
    ("D6", 2, "pcayley-graph", True),
    ("D6", 3, "pcayley-graph", True),
)

NEGATIVE_FIXTURES = ("F1", "F2", "F3", "F4", "F5", "F6", "F7", "F8", "F9", "F10")


def verify_small_theorems(directory: str | None = None, workers: int = 1) -> TheoremReport:
    report = TheoremReport()
    results: dict[tuple[str, int, str], CensusResult] = {}
    with tempfile.TemporaryDirectory() as scratch:
        where = directory or scratch
        for name, m, mode, want in CENSUS_CLAIMS:
            r = census(name, m, mode, directory=where, workers=workers)
            results[(name, m, mode)] = r
            report.claims.append(Claim(
                f"census {name} m={m} {mode}", want, r.aggregate, f"{r.passing}/{r.total} {r.property}"))

    for fid in NEGATIVE_FIXTURES:
        fr = run_fixture(fid)
        detail = "all expectations reproduced" if fr.passed else "; ".join(fr.diffs())
        report.claims.append(Claim(f"fixture {fid} fails as constructed", True, fr.passed, detail))

    d6 = make_named_group("D6")
    z3 = make_named_group("Z3")
    sub = sorted(subgroup_generated(d6, [1]))
    inside = len(sub) == 3 and groups_isomorphic(z3, _restrict(d6, sub)) is not None
    both = results[("Z3", 3, "pcayley-graph")].aggregate and results[("D6", 3, "pcayley-graph")].aggregate
    report.claims.append(Claim(
        "Z3 <= D6 and both pass the 3-PCI census", True, inside and both,
        f"<a> has order {len(sub)}; Z3 and D6 censuses pass: {both}",
    ))

    for (name, m, mode), r in sorted(results.items()):
        lower = results.get((name, m - 1, mode))
        if lower is None or not r.aggregate:
            continue
        report.claims.append(Claim(
            f"{name} {mode}: passing at m={m} implies passing at m={m - 1}", True, lower.aggregate,
            f"m={m}: {r.passing}/{r.total}, m={m - 1}: {lower.passing}/{lower.total}",
        ))
    return report


def _restrict(g: FiniteGroup, elements: list[int]) -> FiniteGroup:
    """The subgroup on ``elements`` (identity first) as a group in its own right."""
    index = {x: k for k, x in enumerate(elements)}
    table = [[index[g.table[x][y]] for y in elements] for x in elements]
    return FiniteGroup(table, name=f"{g.label()}-sub")
