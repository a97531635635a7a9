"""Permutations on V = G x {parts}, permutation groups and the classical oracles.

A permutation is a tuple ``p`` with ``p[x]`` the image of point ``x``.
Products act on the right: ``compose(p, q)`` applies ``p`` first, so
``x^(pq) = (x^p)^q`` and conjugation is ``h^c = c^-1 h c``.

Vertex ``x_i`` (element ``x``, part ``i`` counted from 0) has flat index
``i*|G| + x``.
"""

from __future__ import annotations

import itertools
import math
import os
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from . import _kernels
from .groups import FiniteGroup, generating_set

Perm = tuple[int, ...]


class ElementBoundError(RuntimeError):
    """An enumeration would exceed the configured element bound."""


def default_element_bound() -> int:
    return int(os.environ.get("MCAYLEY_BOUND_ELEMENTS", "2000000"))


def identity(n: int) -> Perm:
    return tuple(range(n))


def compose(p: Perm, q: Perm) -> Perm:
    return tuple([q[x] for x in p])


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for x, y in enumerate(p):
        inv[y] = x
    return tuple(inv)


def conjugate(h: Perm, c: Perm) -> Perm:
    """``c^-1 h c``: maps ``c[x]`` to ``c[h[x]]``."""
    out = [0] * len(h)
    for x, y in enumerate(h):
        out[c[x]] = c[y]
    return tuple(out)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    result = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        x = p[start]
        while x != start:
            cyc.append(x)
            seen[x] = True
            x = p[x]
        result.append(tuple(cyc))
    return result


def perm_order(p: Perm) -> int:
    return math.lcm(*(len(c) for c in cycles(p))) if p else 1


def semiregular_order(p: Perm) -> int:
    """Common cycle length if all cycles of ``p`` have equal length, else 0."""
    n = len(p)
    if n == 0:
        return 1
    length = 1
    x = p[0]
    while x != 0:
        x = p[x]
        length += 1
    seen = bytearray(n)
    for start in range(n):
        if seen[start]:
            continue
        k = 0
        x = start
        while True:
            seen[x] = 1
            x = p[x]
            k += 1
            if x == start:
                break
        if k != length:
            return 0
    return length


@dataclass(frozen=True)
class OrbitPartition:
    blocks: tuple[tuple[int, ...], ...]

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> OrbitPartition:
        return cls(tuple(sorted(tuple(sorted(b)) for b in blocks)))

    @property
    def degree(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self) -> list[int]:
        where = [0] * self.degree
        for i, b in enumerate(self.blocks):
            for x in b:
                where[x] = i
        return where

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]


def part_partition(order: int, m: int) -> OrbitPartition:
    return OrbitPartition(tuple(tuple(range(i * order, (i + 1) * order)) for i in range(m)))


class PermGroup:
    """A permutation group given by generators, with lazily enumerated elements."""

    __slots__ = ("_elements", "_order", "_set", "degree", "generators")

    def __init__(
        self,
        degree: int,
        generators: Iterable[Sequence[int]] = (),
        elements: Iterable[Perm] | None = None,
        order: int | None = None,
    ) -> None:
        self.degree = degree
        self.generators = tuple(tuple(g) for g in generators)
        for g in self.generators:
            if len(g) != degree or sorted(g) != list(range(degree)):
                raise ValueError("generator is not a permutation of the right degree")
        self._elements: tuple[Perm, ...] | None = None
        self._set: frozenset[Perm] | None = None
        self._order = order
        if elements is not None:
            self._store(elements)

    def _store(self, elements: Iterable[Perm]) -> None:
        self._elements = tuple(sorted(elements))
        self._set = frozenset(self._elements)
        self._order = len(self._elements)

    def elements(self, bound: int | None = None) -> tuple[Perm, ...]:
        if self._elements is None:
            bound = default_element_bound() if bound is None else bound
            if self._order is not None and self._order > bound:
                raise ElementBoundError(f"group of order {self._order} exceeds bound {bound}")
            found = _kernels.closure(list(self.generators), self.degree, bound)
            if found is None:
                raise ElementBoundError(f"group exceeds element bound {bound}")
            self._store(found)
        return self._elements  # type: ignore[return-value]

    def element_set(self, bound: int | None = None) -> frozenset[Perm]:
        self.elements(bound)
        return self._set  # type: ignore[return-value]

    def has_elements(self) -> bool:
        return self._elements is not None

    @property
    def order(self) -> int:
        if self._order is None:
            self.elements()
        return self._order  # type: ignore[return-value]

    def __contains__(self, p: object) -> bool:
        return p in self.element_set()

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self._order}, ngens={len(self.generators)})"

    def same_elements(self, other: PermGroup) -> bool:
        return self.element_set() == other.element_set()

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data: Mapping) -> PermGroup:
        return cls(int(data["degree"]), data["generators"])


def closure(gens: Sequence[Perm], bound: int | None = None, degree: int | None = None) -> PermGroup:
    if degree is None:
        if not gens:
            raise ValueError("degree required for an empty generator list")
        degree = len(gens[0])
    group = PermGroup(degree, gens)
    group.elements(bound)
    return group


def group_from_elements(degree: int, elements: Iterable[Perm]) -> PermGroup:
    """Wrap a known element list; generators are picked greedily in element order."""
    elems = tuple(sorted(set(elements)))
    gens: list[Perm] = []
    reached = {identity(degree)}
    for e in elems:
        if e not in reached:
            gens.append(e)
            reached = set(_kernels.closure(gens, degree, len(elems)) or ())
    return PermGroup(degree, gens, elements=elems)


def right_regular(g: FiniteGroup, m: int) -> PermGroup:
    """R(G) on m parts: ``x_i -> (xg)_i``."""
    if m < 1:
        raise ValueError("m must be positive")
    n = g.order
    t = g.table
    elems = [tuple(i * n + t[x][s] for i in range(m) for x in range(n)) for s in range(n)]
    gens = [elems[s] for s in generating_set(g)]
    return PermGroup(n * m, gens, elements=elems)


def right_translation(g: FiniteGroup, m: int, s: int) -> Perm:
    n = g.order
    return tuple(i * n + g.table[x][s] for i in range(m) for x in range(n))


def _orbits_from_generators(degree: int, gens: Sequence[Perm]) -> OrbitPartition:
    parent = list(range(degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x, y in enumerate(g):
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    blocks: dict[int, list[int]] = {}
    for x in range(degree):
        blocks.setdefault(find(x), []).append(x)
    return OrbitPartition.from_blocks(blocks.values())


def orbits(p: PermGroup) -> OrbitPartition:
    gens = p.generators if p.generators or not p.has_elements() else p.elements()
    return _orbits_from_generators(p.degree, gens)


def is_semiregular(p: PermGroup, bound: int | None = None) -> bool:
    ident = identity(p.degree)
    return all(
        e == ident or all(e[x] != x for x in range(p.degree)) for e in p.elements(bound)
    )


def is_subgroup_of(h: PermGroup, a: PermGroup) -> bool:
    aset = a.element_set()
    return all(x in aset for x in h.elements())


def conjugate_set(elements: Iterable[Perm], c: Perm) -> frozenset[Perm]:
    return frozenset(conjugate(h, c) for h in elements)


def conjugate_subgroup_search(a: PermGroup, h1: PermGroup, h2: PermGroup) -> Perm | None:
    """First ``c`` in ``a`` (lexicographic order) with ``h1^c = h2``."""
    if not (is_subgroup_of(h1, a) and is_subgroup_of(h2, a)):
        raise ValueError("h1 and h2 must be subgroups of a")
    target = h2.element_set()
    if h1.order != h2.order:
        return None
    gens = h1.generators or h1.elements()
    for c in a.elements():
        if all(conjugate(x, c) in target for x in gens):
            return c
    return None


def _check_small(n: int) -> None:
    if n > 8:
        raise ValueError(f"brute-force oracle limited to degree 8, got {n}")


def brute_normalizer(n: int, h: PermGroup) -> PermGroup:
    _check_small(n)
    hset = h.element_set()
    gens = h.generators or h.elements()
    found = [
        s for s in itertools.permutations(range(n)) if all(conjugate(x, s) in hset for x in gens)
    ]
    return group_from_elements(n, found)


def brute_centralizer(n: int, h: PermGroup) -> PermGroup:
    _check_small(n)
    gens = h.generators or h.elements()
    found = [
        s for s in itertools.permutations(range(n)) if all(compose(x, s) == compose(s, x) for x in gens)
    ]
    return group_from_elements(n, found)


def semiregular_conjugator(
    h1: PermGroup, h2: PermGroup, iso: Mapping[Perm, Perm]
) -> Perm:
    """``sigma`` with ``h1^sigma = h2``, mapping ``a_i^g`` to ``b_i^iso(g)``.

    Base points ``a_i`` and ``b_i`` are the least points of the orbits of
    ``h1`` and ``h2``, orbits taken in order of their least points.
    """
    if h1.degree != h2.degree:
        raise ValueError("degrees differ")
    if not (is_semiregular(h1) and is_semiregular(h2)):
        raise ValueError("inputs must be semiregular")
    o1, o2 = orbits(h1), orbits(h2)
    if len(o1.blocks) != len(o2.blocks):
        raise ValueError("orbit counts differ")
    sigma = [-1] * h1.degree
    for b1, b2 in zip(o1.blocks, o2.blocks):
        a, b = b1[0], b2[0]
        for g in h1.elements():
            sigma[g[a]] = iso[g][b]
    result = tuple(sigma)
    if sorted(result) != list(range(h1.degree)):
        raise ValueError("iso is not an isomorphism of semiregular groups")
    if conjugate_set(h1.elements(), result) != h2.element_set():
        raise AssertionError("conjugator check failed")
    return result


def minimal_block(gens: Sequence[Perm], degree: int, a: int, b: int) -> list[int]:
    """Smallest block of imprimitivity containing ``a`` and ``b``."""
    parent = list(range(degree))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        u, v = queue.pop()
        for g in gens:
            ru, rv = find(g[u]), find(g[v])
            if ru != rv:
                parent[rv] = ru
                queue.append((g[u], g[v]))
    root = find(a)
    return [x for x in range(degree) if find(x) == root]


def is_transitive(p: PermGroup) -> bool:
    return len(orbits(p).blocks) == 1


def is_primitive(p: PermGroup) -> bool:
    if not is_transitive(p):
        return False
    gens = p.generators or p.elements()
    return all(len(minimal_block(gens, p.degree, 0, x)) == p.degree for x in range(1, p.degree))


def is_normal_subgroup(h: PermGroup, a: PermGroup) -> bool:
    """``h`` is normalized by every generator of ``a`` (``h`` must lie in ``a``)."""
    hset = h.element_set()
    hgens = h.generators or h.elements()
    agens = a.generators or a.elements()
    return all(conjugate(x, c) in hset for c in agens for x in hgens)


def is_abelian(p: PermGroup) -> bool:
    gens = p.generators or p.elements()
    return all(compose(x, y) == compose(y, x) for x in gens for y in gens)


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        while n % d == 0:
            out.append(d)
            n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def shape_tag(p: PermGroup) -> str:
    """A coarse isomorphism-type label for small groups.

    ``Zn`` for cyclic, ``Zp^k`` for elementary abelian, ``(Zp^k):Z2`` for an
    elementary abelian odd-order subgroup of index 2, else a generic label.
    """
    n = p.order
    if n == 1:
        return "Z1"
    elems = p.elements()
    orders = [perm_order(e) for e in elems]
    primes = _prime_factors(n)
    if is_abelian(p):
        if max(orders) == n:
            return f"Z{n}"
        if len(set(primes)) == 1 and max(orders) == primes[0]:
            return f"Z{primes[0]}^{len(primes)}"
        return f"abelian({n})"
    odd = [q for q in primes if q != 2]
    if primes.count(2) == 1 and len(set(odd)) == 1:
        q = odd[0]
        core = [e for e, o in zip(elems, orders) if q % o == 0]
        if len(core) == n // 2:
            sub = closure(core, bound=n, degree=p.degree)
            if sub.order == len(core) and is_abelian(sub):
                return f"(Z{q}^{len(odd)}):Z2"
    return f"nonabelian({n})"
