"""Degree-6 permutation groups containing a regular D6.

Points are 0..5 and carry the right-regular action of D6 with ``a^i -> i``
and ``b a^i -> 3 + i``. Under that action ``a`` is ``(0 1 2)(3 4 5)`` and
``b`` is ``(0 3)(1 5)(2 4)``; the blocks of size 3 are ``{0,1,2}`` and
``{3,4,5}``, and the blocks of size 2 are the left cosets of the three
subgroups of order 2.

The four groups with ``9 | |M|`` are built from explicit generators and also
found again by walking every overgroup of the fixed D6 inside S6, so the
table rows are checked against an exhaustive list rather than a chosen one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

from ..ci import conjugacy_orbit, enumerate_semiregular
from ..groups import FiniteGroup, make_named_group
from ..perms import (
    Perm,
    PermGroup,
    closure,
    is_normal_subgroup,
    is_primitive,
    is_transitive,
    perm_order,
    right_regular,
)

DEGREE = 6


@dataclass
class Table1Row:
    name: str
    order: int
    primitive: bool
    conjugate: bool
    normal: bool
    unique: bool
    regular_count: int
    expected: tuple[bool, bool, bool, bool]
    contains_fixed: bool
    overgroups_matched: int

    @property
    def flags(self) -> tuple[bool, bool, bool, bool]:
        return (self.primitive, self.conjugate, self.normal, self.unique)

    @property
    def passed(self) -> bool:
        return self.flags == self.expected and self.contains_fixed and self.overgroups_matched > 0

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "primitive": self.primitive,
            "conjugate": self.conjugate,
            "normal": self.normal,
            "unique": self.unique,
            "regular_D6_count": self.regular_count,
            "expected": list(self.expected),
            "overgroups_matched": self.overgroups_matched,
            "passed": self.passed,
        }


@dataclass
class Table1Report:
    rows: list[Table1Row]
    overgroup_orders: list[int]
    sylow3_groups: int
    sylow3_conjugate: bool
    unmatched: list[int] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            all(r.passed for r in self.rows)
            and self.sylow3_conjugate
            and not self.unmatched
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "rows": [r.to_json() for r in self.rows],
            "overgroup_orders": self.overgroup_orders,
            "order3_sylow_overgroups": self.sylow3_groups,
            "order3_sylow_all_conjugate": self.sylow3_conjugate,
            "unmatched_orders_divisible_by_9": self.unmatched,
            "passed": self.passed,
        }

    def lines(self) -> list[str]:
        def yn(b: bool) -> str:
            return "Y" if b else "N"

        out = []
        for r in self.rows:
            flags = "/".join(yn(b) for b in r.flags)
            want = "/".join(yn(b) for b in r.expected)
            status = "PASS" if r.passed else "FAIL"
            out.append(f"{status} {r.name} (order {r.order}): {flags} expected {want}")
        status = "PASS" if self.sylow3_conjugate else "FAIL"
        out.append(
            f"{status} all regular D6 conjugate in the {self.sylow3_groups} overgroups "
            "with a Sylow 3-subgroup of order 3"
        )
        return out


def _dihedral() -> FiniteGroup:
    return make_named_group("D6")


def fixed_regular_d6() -> PermGroup:
    return right_regular(_dihedral(), 1)


def _left(g: FiniteGroup, x: int) -> Perm:
    inv = g.inverse[x]
    return tuple(g.table[inv][y] for y in range(g.order))


def _cycle_perm(*cyc: tuple[int, ...]) -> Perm:
    p = list(range(DEGREE))
    for c in cyc:
        for k, v in enumerate(c):
            p[v] = c[(k + 1) % len(c)]
    return tuple(p)


def explicit_groups() -> dict[str, PermGroup]:
    """The four table groups, each generated together with the fixed D6."""
    g = _dihedral()
    d6 = list(fixed_regular_d6().generators)
    a, b = 1, 3
    return {
        "S6": closure([_cycle_perm((0, 1)), _cycle_perm((0, 1, 2, 3, 4, 5))] + d6),
        # full stabilizer of the blocks {0,1,2}, {3,4,5}
        "(S3xS3):Z2": closure(d6 + [_cycle_perm((0, 1))]),
        # right translations by D6 and the left translation by a
        "(Z3xZ3):Z2": closure(d6 + [_left(g, a)]),
        # right and left translations by D6
        "(Z3xZ3):(Z2xZ2)": closure(d6 + [_left(g, a), _left(g, b)]),
    }


EXPECTED: dict[str, tuple[bool, bool, bool, bool]] = {
    "S6": (True, True, False, False),
    "(S3xS3):Z2": (False, True, False, False),
    "(Z3xZ3):Z2": (False, True, True, True),
    "(Z3xZ3):(Z2xZ2)": (False, False, True, False),
}


def overgroups(base: PermGroup) -> list[PermGroup]:
    """Every subgroup of S6 containing ``base``.

    Each overgroup arises from a smaller one by adding a single element, and
    adding any element of a right coset ``Mg`` gives the same group, so one
    representative per coset is enough.
    """
    symmetric = list(itertools.permutations(range(DEGREE)))
    found = {base.element_set(): base}
    queue = [base]
    while queue:
        current = queue.pop()
        covered = set(current.element_set())
        elems = current.elements()
        for g in symmetric:
            if g in covered:
                continue
            covered.update(tuple(h[i] for i in g) for h in elems)
            bigger = closure(list(current.generators) + [g])
            key = bigger.element_set()
            if key not in found:
                found[key] = bigger
                queue.append(bigger)
    return sorted(found.values(), key=lambda p: (p.order, p.elements()))


@dataclass
class _Profile:
    primitive: bool
    conjugate: bool
    normal: bool
    unique: bool
    regular_count: int


def _profile(m: PermGroup, d6: FiniteGroup, fixed: PermGroup) -> _Profile:
    regular = [w.key for w in enumerate_semiregular(m, d6, 1)]
    orbit = conjugacy_orbit(fixed.element_set(), m.generators)
    conjugate = all(r in orbit for r in regular)
    normal = any(is_normal_subgroup(PermGroup(DEGREE, list(r), elements=r), m) for r in regular)
    return _Profile(is_primitive(m), conjugate, normal, len(regular) == 1, len(regular))


def _has_order_four(m: PermGroup) -> bool:
    return any(perm_order(p) == 4 for p in m.elements())


def _row_name(m: PermGroup) -> str | None:
    """Which table row an overgroup belongs to, from its order and shape."""
    if m.order == 720:
        return "S6"
    if m.order == 72 and not is_primitive(m):
        return "(S3xS3):Z2"
    if m.order == 18:
        return "(Z3xZ3):Z2"
    if m.order == 36 and not _has_order_four(m):
        return "(Z3xZ3):(Z2xZ2)"
    return None


def verify_table1() -> Table1Report:
    d6 = _dihedral()
    fixed = fixed_regular_d6()
    fixed_set = fixed.element_set()
    over = overgroups(fixed)
    assert all(is_transitive(m) for m in over)

    profiles = {m.element_set(): _profile(m, d6, fixed) for m in over}
    by_row: dict[str, list[_Profile]] = {}
    unmatched = []
    for m in over:
        if m.order % 9:
            continue
        name = _row_name(m)
        if name is None:
            unmatched.append(m.order)
        else:
            by_row.setdefault(name, []).append(profiles[m.element_set()])

    rows = []
    for name, m in explicit_groups().items():
        p = profiles.get(m.element_set()) or _profile(m, d6, fixed)
        same = [q for q in by_row.get(name, []) if (q.primitive, q.conjugate, q.normal, q.unique)
                == (p.primitive, p.conjugate, p.normal, p.unique)]
        # a row counts as reproduced only if every overgroup of that type agrees
        matched = len(same) if len(same) == len(by_row.get(name, [])) else 0
        rows.append(Table1Row(
            name=name, order=m.order, primitive=p.primitive, conjugate=p.conjugate,
            normal=p.normal, unique=p.unique, regular_count=p.regular_count,
            expected=EXPECTED[name], contains_fixed=fixed_set <= m.element_set(),
            overgroups_matched=matched,
        ))

    small = [m for m in over if m.order % 9]
    return Table1Report(
        rows=rows,
        overgroup_orders=[m.order for m in over],
        sylow3_groups=len(small),
        sylow3_conjugate=all(profiles[m.element_set()].conjugate for m in small),
        unmatched=unmatched,
    )
