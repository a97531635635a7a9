"""Automorphism groups and isomorphisms of small coloured digraphs."""

from __future__ import annotations

import math
import os
from collections.abc import Sequence
from dataclasses import dataclass

from . import _kernels
from .digraph import MCayleyDigraph
from .perms import Perm, PermGroup


class VertexBoundError(RuntimeError):
    pass


def default_vertex_bound() -> int:
    return int(os.environ.get("MCAYLEY_BOUND_AUT", "64"))


@dataclass(frozen=True)
class ColoredDigraph:
    n: int
    adjacency: bytes
    colors: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.adjacency) != self.n * self.n or len(self.colors) != self.n:
            raise ValueError("adjacency or colors have the wrong size")

    @classmethod
    def from_arcs(cls, n: int, arcs, colors: Sequence[int] | None = None) -> ColoredDigraph:
        adj = bytearray(n * n)
        for u, v in arcs:
            if u != v:
                adj[u * n + v] = 1
        return cls(n, bytes(adj), tuple(colors) if colors is not None else (0,) * n)

    def has_arc(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u * self.n + v])

    def is_isomorphism_to(self, other: ColoredDigraph, gamma: Sequence[int]) -> bool:
        n = self.n
        if other.n != n or sorted(gamma) != list(range(n)):
            return False
        if any(self.colors[v] != other.colors[gamma[v]] for v in range(n)):
            return False
        a, b = self.adjacency, other.adjacency
        return all(a[u * n + v] == b[gamma[u] * n + gamma[v]] for u in range(n) for v in range(n))


def colored(g: MCayleyDigraph, parts: str = "none") -> ColoredDigraph:
    """Colour ``g`` for the automorphism search.

    ``parts`` is ``none`` (plain), ``fixed`` (each part its own colour, so
    automorphisms fix every part) or ``setwise`` (one extra vertex per part
    joined to its members, so automorphisms permute the parts).
    """
    n = g.n
    if parts == "none":
        return ColoredDigraph(n, g.adjacency_bytes(), (0,) * n)
    if parts == "fixed":
        return ColoredDigraph(n, g.adjacency_bytes(), tuple(g.part_of(v) for v in range(n)))
    if parts == "setwise":
        size = n + g.m
        adj = bytearray(size * size)
        base = g.adjacency_bytes()
        for u in range(n):
            adj[u * size:u * size + n] = base[u * n:(u + 1) * n]
        for v in range(n):
            adj[(n + g.part_of(v)) * size + v] = 1
        return ColoredDigraph(size, bytes(adj), (0,) * n + (1,) * g.m)
    raise ValueError(f"unknown parts option {parts!r}")


def automorphism_group(
    g: ColoredDigraph, vertex_bound: int | None = None, restrict_to: int | None = None
) -> PermGroup:
    """Aut(g) as generators with exact order; elements are enumerated on demand.

    ``restrict_to`` keeps only the action on the first ``restrict_to`` points,
    which must be an invariant set (used for the part-vertex encoding).
    """
    bound = default_vertex_bound() if vertex_bound is None else vertex_bound
    size = g.n if restrict_to is None else restrict_to
    if size > bound:
        raise VertexBoundError(f"{size} vertices exceed bound {bound}")
    gens, _base, orbit_sizes = _kernels.automorphisms(g.n, g.adjacency, list(g.colors))
    for gamma in gens:
        if not g.is_isomorphism_to(g, gamma):
            raise AssertionError("search returned a non-automorphism")
    order = math.prod(orbit_sizes)
    if restrict_to is not None:
        gens = [tuple(gamma[:restrict_to]) for gamma in gens]
        return PermGroup(restrict_to, gens, order=order)
    return PermGroup(g.n, gens, order=order)


def aut_mcayley(g: MCayleyDigraph, parts: str = "none", vertex_bound: int | None = None) -> PermGroup:
    """Aut(g), the subgroup fixing every part, or the subgroup permuting the parts."""
    cd = colored(g, parts)
    return automorphism_group(cd, vertex_bound, restrict_to=g.n if parts == "setwise" else None)


def isomorphism(g: ColoredDigraph, h: ColoredDigraph, vertex_bound: int | None = None) -> Perm | None:
    bound = default_vertex_bound() if vertex_bound is None else vertex_bound
    if g.n != h.n:
        return None
    if g.n > bound:
        raise VertexBoundError(f"{g.n} vertices exceed bound {bound}")
    gamma = _kernels.isomorphism(g.n, g.adjacency, list(g.colors), h.adjacency, list(h.colors))
    if gamma is not None and not g.is_isomorphism_to(h, gamma):
        raise AssertionError("search returned a non-isomorphism")
    return gamma


def mcayley_isomorphism(g: MCayleyDigraph, h: MCayleyDigraph) -> Perm | None:
    return isomorphism(colored(g), colored(h))


def p_isomorphism(g: MCayleyDigraph, h: MCayleyDigraph) -> Perm | None:
    """An isomorphism carrying every part of ``g`` onto a part of ``h``."""
    if g.group.order != h.group.order or g.m != h.m:
        return None
    gamma = isomorphism(colored(g, "setwise"), colored(h, "setwise"), vertex_bound=default_vertex_bound() + g.m)
    return None if gamma is None else tuple(gamma[: g.n])


def is_automorphism(g: MCayleyDigraph, p: Sequence[int]) -> bool:
    out = g.out
    return all(((out[p[u]] >> p[v]) & 1) for u, v in g.arcs()) and len(p) == g.n
