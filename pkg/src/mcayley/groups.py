"""Finite groups given by multiplication tables.

Element 0 is always the identity. Products follow the table convention
``table[a][b] = a*b``.

Element numbering of the named families:

* ``Zk``: element ``i`` is ``x**i``.
* ``ZjxZk``: element ``u + j*v`` is ``x**u * y**v`` where ``x`` generates
  the ``Zj`` factor and ``y`` the ``Zk`` factor.
* ``Dn`` (dihedral of order ``n = 2k``): elements ``0..k-1`` are ``a**i``,
  elements ``k..2k-1`` are ``b * a**i``; ``b*a*b = a**-1``.
* ``Sn`` (``n <= 4``): permutations of ``range(n)`` in lexicographic order,
  multiplied left to right (``p*q`` applies ``p`` first).
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cache
from typing import Any, TypeVar

DEFAULT_ORDER_BOUND = 24

T = TypeVar("T")


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    name: str | None = field(default=None, compare=False)
    inverse: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        if n == 0:
            raise GroupError("empty table")
        for row in table:
            if len(row) != n or sorted(row) != list(range(n)):
                raise GroupError("table rows must be permutations of 0..n-1")
        for x in range(n):
            if table[0][x] != x or table[x][0] != x:
                raise GroupError("element 0 must be the identity")
        if n <= 64:
            for a in range(n):
                ra = table[a]
                for b in range(n):
                    rab = table[ra[b]]
                    rb = table[b]
                    for c in range(n):
                        if rab[c] != ra[rb[c]]:
                            raise GroupError(f"not associative at {(a, b, c)}")
        inv = tuple(table[x].index(0) for x in range(n))
        object.__setattr__(self, "inverse", inv)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.table[y][x]
            k += 1
        return k

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def label(self) -> str:
        return self.name or f"G{self.order}"

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "order": self.order, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict[str, Any] | str) -> FiniteGroup:
        if isinstance(data, str):
            return make_named_group(data)
        table = data["table"]
        if "order" in data and data["order"] != len(table):
            raise GroupError("order does not match table size")
        return cls(tuple(tuple(r) for r in table), name=data.get("name"))


@dataclass(frozen=True)
class GroupAutomorphism:
    images: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.images[x]

    def then(self, other: GroupAutomorphism) -> GroupAutomorphism:
        """Apply ``self`` first, then ``other``."""
        return GroupAutomorphism(tuple(other.images[y] for y in self.images))

    def inverse(self) -> GroupAutomorphism:
        inv = [0] * len(self.images)
        for x, y in enumerate(self.images):
            inv[y] = x
        return GroupAutomorphism(tuple(inv))

    def is_identity(self) -> bool:
        return all(x == y for x, y in enumerate(self.images))

    @classmethod
    def identity_of(cls, g: FiniteGroup) -> GroupAutomorphism:
        return cls(tuple(range(g.order)))


def _table_from_mul(elements: Sequence[T], mul: Callable[[T, T], T], name: str) -> FiniteGroup:
    index = {e: i for i, e in enumerate(elements)}
    return FiniteGroup(
        tuple(tuple(index[mul(a, b)] for b in elements) for a in elements), name=name
    )


def cyclic(k: int) -> FiniteGroup:
    if k < 1:
        raise GroupError("cyclic order must be positive")
    return FiniteGroup(tuple(tuple((a + b) % k for b in range(k)) for a in range(k)), name=f"Z{k}")


def cyclic_product(j: int, k: int) -> FiniteGroup:
    if j < 1 or k < 1:
        raise GroupError("factor orders must be positive")
    elements = [(u, v) for v in range(k) for u in range(j)]
    return _table_from_mul(
        elements, lambda a, b: ((a[0] + b[0]) % j, (a[1] + b[1]) % k), f"Z{j}xZ{k}"
    )


def dihedral(n: int) -> FiniteGroup:
    if n < 2 or n % 2:
        raise GroupError(f"dihedral order must be even and >= 2, got {n}")
    k = n // 2
    elements = [(e, i) for e in range(2) for i in range(k)]

    def mul(p: tuple[int, int], q: tuple[int, int]) -> tuple[int, int]:
        # (b^e a^i)(b^f a^j) = b^(e+f) a^(i*(-1)^f + j)
        e, i = p
        f, j = q
        return ((e + f) % 2, ((-i if f else i) + j) % k)

    return _table_from_mul(elements, mul, f"D{n}")


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= 4:
        raise GroupError("symmetric groups supported for n <= 4")
    elements = list(itertools.permutations(range(n)))
    return _table_from_mul(elements, lambda p, q: tuple(q[p[x]] for x in range(n)), f"S{n}")


_TOKEN_PATTERNS: list[tuple[re.Pattern[str], Callable[..., FiniteGroup]]] = [
    (re.compile(r"Z(\d+)x[Z](\d+)"), lambda j, k: cyclic_product(int(j), int(k))),
    (re.compile(r"Z(\d+)"), lambda k: cyclic(int(k))),
    (re.compile(r"D(\d+)"), lambda n: dihedral(int(n))),
    (re.compile(r"S(\d+)"), lambda n: symmetric(int(n))),
]


@cache
def make_named_group(name: str) -> FiniteGroup:
    token = name.strip().replace("×", "x")
    aliases = {"Z2^2": "Z2xZ2", "Z3^2": "Z3xZ3", "1": "Z1"}
    token = aliases.get(token, token)
    for pattern, build in _TOKEN_PATTERNS:
        match = pattern.fullmatch(token)
        if match:
            return build(*match.groups())
    raise GroupError(f"unknown group token {name!r}")


def subgroup_generated(g: FiniteGroup, gens: Sequence[int]) -> list[int]:
    seen = {0}
    frontier = [0]
    t = g.table
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = t[x][s]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return sorted(seen)


@cache
def generating_set(g: FiniteGroup) -> tuple[int, ...]:
    """A smallest generating set, first in lexicographic order of index tuples."""
    if g.order == 1:
        return ()
    candidates = range(1, g.order)
    for size in range(1, g.order):
        for combo in itertools.combinations(candidates, size):
            if len(subgroup_generated(g, combo)) == g.order:
                return combo
    raise AssertionError("unreachable")


def extend_homomorphism(
    g: FiniteGroup,
    gens: Sequence[int],
    images: Sequence[T],
    mul: Callable[[T, T], T],
    identity: T,
) -> list[T] | None:
    """Extend ``gens[k] -> images[k]`` to a map on all of ``g``.

    Returns the list of images indexed by element, or None when the
    assignment is not a homomorphism or ``gens`` does not generate ``g``.
    """
    n = g.order
    result: list[Any] = [None] * n
    result[0] = identity
    frontier = [0]
    t = g.table
    count = 1
    while frontier:
        nxt = []
        for x in frontier:
            px = result[x]
            for s, ps in zip(gens, images):
                y = t[x][s]
                py = mul(px, ps)
                if result[y] is None:
                    result[y] = py
                    nxt.append(y)
                    count += 1
                elif result[y] != py:
                    return None
        frontier = nxt
    if count != n:
        return None
    # Every edge x -> x*s of the Cayley graph was checked, so by induction on
    # word length result[a*b] == result[a]*result[b] for all a, b.
    return result


def _check_bound(g: FiniteGroup, bound: int) -> None:
    if g.order > bound:
        raise GroupError(f"group order {g.order} exceeds bound {bound}")


@cache
def _automorphisms(g: FiniteGroup) -> tuple[GroupAutomorphism, ...]:
    gens = generating_set(g)
    orders = [g.element_order(x) for x in range(g.order)]
    choices = [[y for y in range(1, g.order) if orders[y] == orders[s]] for s in gens]
    found = []
    for imgs in itertools.product(*choices):
        if len(set(imgs)) != len(imgs):
            continue
        ext = extend_homomorphism(g, gens, imgs, g.mul, 0)
        if ext is not None and len(set(ext)) == g.order:
            found.append(GroupAutomorphism(tuple(ext)))
    found.sort(key=lambda a: a.images)
    return tuple(found)


def automorphism_group(g: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND) -> list[GroupAutomorphism]:
    _check_bound(g, bound)
    return list(_automorphisms(g))


def inner_automorphism(g: FiniteGroup, x: int) -> GroupAutomorphism:
    """Conjugation ``y -> x^-1 y x``."""
    xi = g.inverse[x]
    return GroupAutomorphism(tuple(g.table[g.table[xi][y]][x] for y in range(g.order)))


def groups_isomorphic(
    g: FiniteGroup, h: FiniteGroup, bound: int = DEFAULT_ORDER_BOUND
) -> tuple[int, ...] | None:
    _check_bound(g, bound)
    _check_bound(h, bound)
    if g.order != h.order or g.is_abelian() != h.is_abelian():
        return None
    gens = generating_set(g)
    g_orders = [g.element_order(x) for x in range(g.order)]
    h_orders = [h.element_order(x) for x in range(h.order)]
    if sorted(g_orders) != sorted(h_orders):
        return None
    choices = [[y for y in range(h.order) if h_orders[y] == g_orders[s]] for s in gens]
    for imgs in itertools.product(*choices):
        ext = extend_homomorphism(g, gens, imgs, h.mul, 0)
        if ext is not None and len(set(ext)) == g.order:
            return tuple(ext)
    return None


def is_group_automorphism(g: FiniteGroup, images: Sequence[int]) -> bool:
    n = g.order
    if len(images) != n or sorted(images) != list(range(n)) or images[0] != 0:
        return False
    t = g.table
    return all(images[t[a][b]] == t[images[a]][images[b]] for a in range(n) for b in range(n))
