"""The normalizer N of R(G) in Sym(V) in closed form.

An element is a triple ``(left, alpha, sigma)`` standing for
``L_1(g_1)...L_m(g_m) alpha sigma``. It acts on vertices by

    x_i -> ((g_i^-1 x)^alpha)_{i^sigma}

where ``sigma[i]`` is the image of part ``i`` (parts from 0). Products are
read left to right, matching the permutation convention of ``perms``.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Any

from .digraph import ConnectionSets, MCayleyDigraph
from .groups import (
    FiniteGroup,
    GroupAutomorphism,
    automorphism_group,
    inner_automorphism,
)
from .perms import ElementBoundError, Perm, default_element_bound


@dataclass(frozen=True)
class NormalizerElement:
    left: tuple[int, ...]
    alpha: GroupAutomorphism
    sigma: tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.left)

    def to_json(self) -> dict[str, list[int]]:
        return {"left": list(self.left), "alpha": list(self.alpha.images), "sigma": list(self.sigma)}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> NormalizerElement:
        return cls(tuple(data["left"]), GroupAutomorphism(tuple(data["alpha"])), tuple(data["sigma"]))


def normalizer_order(g: FiniteGroup, m: int) -> int:
    return g.order**m * math.factorial(m) * len(automorphism_group(g))


def centralizer_order(g: FiniteGroup, m: int) -> int:
    return g.order**m * math.factorial(m)


def kernel_order(g: FiniteGroup, m: int) -> int:
    return g.order**m * len(automorphism_group(g))


def identity_element(g: FiniteGroup, m: int) -> NormalizerElement:
    return NormalizerElement((0,) * m, GroupAutomorphism.identity_of(g), tuple(range(m)))


def left_element(g: FiniteGroup, m: int, i: int, x: int) -> NormalizerElement:
    """L_i(x): ``x_i -> (x^-1 y)_i`` on part ``i``, identity elsewhere."""
    left = [0] * m
    left[i] = x
    return NormalizerElement(tuple(left), GroupAutomorphism.identity_of(g), tuple(range(m)))


def alpha_element(g: FiniteGroup, m: int, alpha: GroupAutomorphism) -> NormalizerElement:
    return NormalizerElement((0,) * m, alpha, tuple(range(m)))


def sigma_element(g: FiniteGroup, m: int, sigma: Sequence[int]) -> NormalizerElement:
    return NormalizerElement((0,) * m, GroupAutomorphism.identity_of(g), tuple(sigma))


def right_element(g: FiniteGroup, m: int, x: int) -> NormalizerElement:
    """R(x) written as L_1(x^-1)...L_m(x^-1) Inn(x)."""
    return NormalizerElement((g.inverse[x],) * m, inner_automorphism(g, x), tuple(range(m)))


def nelem_to_permutation(e: NormalizerElement, g: FiniteGroup) -> Perm:
    n = g.order
    t = g.table
    inv = g.inverse
    a = e.alpha.images
    out = [0] * (n * e.m)
    for i, gi in enumerate(e.left):
        row = t[inv[gi]]
        base = e.sigma[i] * n
        for x in range(n):
            out[i * n + x] = base + a[row[x]]
    return tuple(out)


def nelem_compose(e1: NormalizerElement, e2: NormalizerElement, g: FiniteGroup) -> NormalizerElement:
    """``e1`` then ``e2``: left_i = g_i * (g'_{i^sigma})^(alpha^-1)."""
    ainv = e1.alpha.inverse().images
    t = g.table
    left = tuple(t[gi][ainv[e2.left[e1.sigma[i]]]] for i, gi in enumerate(e1.left))
    return NormalizerElement(
        left, e1.alpha.then(e2.alpha), tuple(e2.sigma[s] for s in e1.sigma)
    )


def nelem_inverse(e: NormalizerElement, g: FiniteGroup) -> NormalizerElement:
    # Solve e * f = 1: beta = alpha^-1, tau = sigma^-1 and
    # 1 = g_i * (h_{i^sigma})^(alpha^-1)  =>  h_{i^sigma} = (g_i^-1)^alpha.
    m = e.m
    tau = [0] * m
    left = [0] * m
    a = e.alpha.images
    for i, si in enumerate(e.sigma):
        tau[si] = i
        left[si] = a[g.inverse[e.left[i]]]
    return NormalizerElement(tuple(left), e.alpha.inverse(), tuple(tau))


def decompose(p: Sequence[int], g: FiniteGroup, m: int) -> NormalizerElement | None:
    """Read ``(left, alpha, sigma)`` off a vertex permutation; None if ``p`` is not in N."""
    n = g.order
    if len(p) != n * m:
        return None
    sigma = []
    images = []
    for i in range(m):
        block = p[i * n:(i + 1) * n]
        part = block[0] // n
        if any(v // n != part for v in block):
            return None
        sigma.append(part)
        images.append([v - part * n for v in block])
    if sorted(sigma) != list(range(m)):
        return None
    t = g.table
    inv = g.inverse
    # f_i(x) = c_i * x^alpha with c_i = f_i(1) = (g_i^-1)^alpha
    c0 = images[0][0]
    alpha_images = tuple(t[inv[c0]][y] for y in images[0])
    aut_index = _aut_index(g)
    if alpha_images not in aut_index:
        return None
    alpha = GroupAutomorphism(alpha_images)
    ainv = alpha.inverse().images
    left = []
    for f in images:
        c = f[0]
        if any(f[x] != t[c][alpha_images[x]] for x in range(n)):
            return None
        left.append(inv[ainv[c]])
    return NormalizerElement(tuple(left), alpha, tuple(sigma))


_AUT_INDEX: dict[FiniteGroup, dict[tuple[int, ...], int]] = {}


def _aut_index(g: FiniteGroup) -> dict[tuple[int, ...], int]:
    if g not in _AUT_INDEX:
        _AUT_INDEX[g] = {a.images: k for k, a in enumerate(automorphism_group(g))}
    return _AUT_INDEX[g]


def sort_key(e: NormalizerElement, g: FiniteGroup) -> tuple:
    return (e.left, _aut_index(g)[e.alpha.images], e.sigma)


def _check_enum_bound(count: int, bound: int | None) -> None:
    bound = default_element_bound() if bound is None else bound
    if count > bound:
        raise ElementBoundError(f"enumeration of {count} elements exceeds bound {bound}")


def _stream(
    g: FiniteGroup,
    m: int,
    fixed_left: dict[int, int] | None = None,
    identity_alpha: bool = False,
    sigma_filter=None,
) -> Iterator[NormalizerElement]:
    auts = automorphism_group(g)
    if identity_alpha:
        auts = [a for a in auts if a.is_identity()]
    sigmas = [s for s in itertools.permutations(range(m)) if sigma_filter is None or sigma_filter(s)]
    ranges = [
        (fixed_left[i],) if fixed_left and i in fixed_left else range(g.order) for i in range(m)
    ]
    for left in itertools.product(*ranges):
        for a in auts:
            for s in sigmas:
                yield NormalizerElement(left, a, s)


def enumerate_N(g: FiniteGroup, m: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    _check_enum_bound(normalizer_order(g, m), bound)
    return _stream(g, m)


def enumerate_C(g: FiniteGroup, m: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    _check_enum_bound(centralizer_order(g, m), bound)
    return _stream(g, m, identity_alpha=True)


def enumerate_K(g: FiniteGroup, m: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    _check_enum_bound(kernel_order(g, m), bound)
    ident = tuple(range(m))
    return _stream(g, m, sigma_filter=lambda s: s == ident)


def stabilizer_N1r(g: FiniteGroup, m: int, r: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    """Stabilizer of the vertex 1_r."""
    _check_enum_bound(normalizer_order(g, m) // (g.order * m), bound)
    return _stream(g, m, fixed_left={r: 0}, sigma_filter=lambda s: s[r] == r)


def blockstab_NGr(g: FiniteGroup, m: int, r: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    """Setwise stabilizer of the part G_r."""
    _check_enum_bound(normalizer_order(g, m) // m, bound)
    return _stream(g, m, sigma_filter=lambda s: s[r] == r)


def stabilizer_K1r(g: FiniteGroup, m: int, r: int, bound: int | None = None) -> Iterator[NormalizerElement]:
    _check_enum_bound(kernel_order(g, m) // g.order, bound)
    ident = tuple(range(m))
    return _stream(g, m, fixed_left={r: 0}, sigma_filter=lambda s: s == ident)


def transform_sets(e: NormalizerElement, conn: ConnectionSets) -> ConnectionSets:
    """T_{i^sigma, j^sigma} = (g_j^-1 S_{i,j} g_i)^alpha."""
    g = conn.group
    t = g.table
    inv = g.inverse
    a = e.alpha.images
    m = conn.m
    rows: list[list[frozenset[int]]] = [[frozenset()] * m for _ in range(m)]
    for i in range(m):
        gi = e.left[i]
        for j in range(m):
            gj_inv = inv[e.left[j]]
            rows[e.sigma[i]][e.sigma[j]] = frozenset(a[t[t[gj_inv][s]][gi]] for s in conn.sets[i][j])
    return ConnectionSets.from_lists(g, rows)


def apply_to_digraph(e: NormalizerElement, gamma: MCayleyDigraph) -> MCayleyDigraph:
    return MCayleyDigraph(transform_sets(e, gamma.conn), gamma.mode)


def transform_sets_translated(
    left: Sequence[int], alpha: GroupAutomorphism, sigma: Sequence[int], conn: ConnectionSets
) -> ConnectionSets:
    """The same family written as T_{i^sigma, j^sigma} = g_j S_{i,j}^alpha g_i^-1.

    It agrees with ``transform_sets`` after substituting g_i -> (g_i^-1)^alpha.
    """
    g = conn.group
    t = g.table
    inv = g.inverse
    a = alpha.images
    m = conn.m
    rows: list[list[frozenset[int]]] = [[frozenset()] * m for _ in range(m)]
    for i in range(m):
        for j in range(m):
            rows[sigma[i]][sigma[j]] = frozenset(
                t[t[left[j]][a[s]]][inv[left[i]]] for s in conn.sets[i][j]
            )
    return ConnectionSets.from_lists(g, rows)


def _filtered(
    conn: ConnectionSets,
    target: ConnectionSets,
    alphas: Sequence[GroupAutomorphism],
    sigmas: Sequence[tuple[int, ...]],
    fixed_left: dict[int, int] | None = None,
    first_only: bool = False,
) -> list[NormalizerElement]:
    """All ``(left, alpha, sigma)`` mapping ``conn`` to ``target``.

    For each ``(alpha, sigma)`` the left factors are assigned part by part,
    and every pair (i, j) is checked as soon as both g_i and g_j are fixed.
    """
    g = conn.group
    t = g.table
    inv = g.inverse
    m = conn.m
    n = g.order
    src = conn.sets
    found: list[NormalizerElement] = []
    sizes_ok = {
        s: all(len(src[i][j]) == len(target.sets[s[i]][s[j]]) for i in range(m) for j in range(m))
        for s in sigmas
    }
    for alpha in alphas:
        a = alpha.images
        for sigma in sigmas:
            if not sizes_ok[sigma]:
                continue
            left = [0] * m

            def ok(i: int, j: int) -> bool:
                gi, gj_inv = left[i], inv[left[j]]
                want = target.sets[sigma[i]][sigma[j]]
                return all(a[t[t[gj_inv][s]][gi]] in want for s in src[i][j])

            def assign(k: int) -> bool:
                if k == m:
                    found.append(NormalizerElement(tuple(left), alpha, sigma))
                    return first_only
                choices = (fixed_left[k],) if fixed_left and k in fixed_left else range(n)
                for x in choices:
                    left[k] = x
                    if ok(k, k) and all(ok(i, k) and ok(k, i) for i in range(k)):
                        if assign(k + 1):
                            return True
                return False

            if assign(0) and first_only:
                return found
    return found


def find_normalizer_map(
    gamma: MCayleyDigraph, sigma_graph: MCayleyDigraph, fix_first: bool = True
) -> NormalizerElement | None:
    """Some n in N with gamma^n = sigma_graph, or None.

    With ``fix_first`` the search keeps g_1 = 1, which loses nothing since
    right translations are automorphisms of ``gamma``.
    """
    g = gamma.group
    m = gamma.m
    found = _filtered(
        gamma.conn,
        sigma_graph.conn,
        automorphism_group(g),
        list(itertools.permutations(range(m))),
        fixed_left={0: 0} if fix_first else None,
        first_only=True,
    )
    return found[0] if found else None


@dataclass
class FilteredSubgroups:
    N_tilde: list[NormalizerElement]
    C_tilde: list[NormalizerElement]
    K_tilde: list[NormalizerElement]
    N_tilde_1r: list[NormalizerElement]
    N_tilde_Gr: list[NormalizerElement]
    K_tilde_1r: list[NormalizerElement]
    Sbar_m: list[tuple[int, ...]]
    AutBar_G: list[GroupAutomorphism]
    r: int = 0

    def orders(self) -> dict[str, int]:
        return {
            "N_tilde": len(self.N_tilde),
            "C_tilde": len(self.C_tilde),
            "K_tilde": len(self.K_tilde),
            "N_tilde_1r": len(self.N_tilde_1r),
            "N_tilde_Gr": len(self.N_tilde_Gr),
            "K_tilde_1r": len(self.K_tilde_1r),
            "Sbar_m": len(self.Sbar_m),
            "AutBar_G": len(self.AutBar_G),
        }


def filtered_subgroups(gamma: MCayleyDigraph, r: int = 0) -> FilteredSubgroups:
    """The elements of N preserving gamma, and the subgroups cut out of them."""
    g = gamma.group
    m = gamma.m
    auts = automorphism_group(g)
    sigmas = list(itertools.permutations(range(m)))
    n_tilde = _filtered(gamma.conn, gamma.conn, auts, sigmas)
    n_tilde.sort(key=lambda e: sort_key(e, g))
    ident = tuple(range(m))
    return FilteredSubgroups(
        N_tilde=n_tilde,
        C_tilde=[e for e in n_tilde if e.alpha.is_identity()],
        K_tilde=[e for e in n_tilde if e.sigma == ident],
        N_tilde_1r=[e for e in n_tilde if e.left[r] == 0 and e.sigma[r] == r],
        N_tilde_Gr=[e for e in n_tilde if e.sigma[r] == r],
        K_tilde_1r=[e for e in n_tilde if e.left[r] == 0 and e.sigma == ident],
        Sbar_m=sorted({e.sigma for e in n_tilde}),
        AutBar_G=sorted({e.alpha for e in n_tilde}, key=lambda a: a.images),
        r=r,
    )
