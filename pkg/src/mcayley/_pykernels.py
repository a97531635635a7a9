"""Pure-Python search kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors it
step for step so both backends return identical results.

Graphs are passed as ``n`` plus a ``bytes`` adjacency matrix (``adj[u*n+v]``
nonzero iff ``u -> v``) and a color list. Partitions are ordered lists of
sorted cells. Every operation on them depends only on cell positions and
neighbour counts, never on vertex labels, so the search is label-invariant.
"""

from __future__ import annotations

BACKEND = "python"


def _neighbours(n, adj):
    out_nb = [[v for v in range(n) if adj[u * n + v]] for u in range(n)]
    in_nb = [[u for u in range(n) if adj[u * n + v]] for v in range(n)]
    return out_nb, in_nb


def _initial_cells(colors):
    by_color = {}
    for v, c in enumerate(colors):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


def _refine(cells, n, out_nb, in_nb):
    cells = list(cells)
    changed = True
    while changed:
        changed = False
        k = 0
        while k < len(cells):
            cnt_out = [0] * n
            cnt_in = [0] * n
            for w in cells[k]:
                for u in in_nb[w]:
                    cnt_out[u] += 1
                for u in out_nb[w]:
                    cnt_in[u] += 1
            new = []
            for cell in cells:
                if len(cell) > 1:
                    groups = {}
                    for x in cell:
                        groups.setdefault(cnt_out[x] * (n + 1) + cnt_in[x], []).append(x)
                    if len(groups) > 1:
                        changed = True
                        for key in sorted(groups):
                            new.append(groups[key])
                        continue
                new.append(cell)
            cells = new
            k += 1
    return cells


def _trace(cells, n, out_nb, in_nb):
    # Quotient matrix of an equitable partition; on a discrete partition it
    # is the adjacency matrix in cell order.
    cell_of = [0] * n
    for i, cell in enumerate(cells):
        for v in cell:
            cell_of[v] = i
    m = len(cells)
    rows = []
    for cell in cells:
        x = cell[0]
        row_out = [0] * m
        row_in = [0] * m
        for v in out_nb[x]:
            row_out[cell_of[v]] += 1
        for v in in_nb[x]:
            row_in[cell_of[v]] += 1
        rows.append((len(cell), tuple(row_out), tuple(row_in)))
    return tuple(rows)


def _target(cells):
    best, size = -1, 1
    for i, cell in enumerate(cells):
        if len(cell) > size:
            best, size = i, len(cell)
    return best


def _individualize(cells, t, w):
    cell = cells[t]
    return cells[:t] + [[w], [x for x in cell if x != w]] + cells[t + 1:]


class _FirstPath:
    def __init__(self, n, adj, colors):
        self.n = n
        self.out_nb, self.in_nb = _neighbours(n, adj)
        cells = _refine(_initial_cells(colors), n, self.out_nb, self.in_nb)
        self.partitions = [cells]
        self.traces = [_trace(cells, n, self.out_nb, self.in_nb)]
        self.base = []
        self.targets = []
        while len(cells) < n:
            t = _target(cells)
            v = cells[t][0]
            self.base.append(v)
            self.targets.append(t)
            cells = _refine(_individualize(cells, t, v), n, self.out_nb, self.in_nb)
            self.partitions.append(cells)
            self.traces.append(_trace(cells, n, self.out_nb, self.in_nb))
        self.leaf = [cell[0] for cell in cells]


def _search(path, cells, depth, out_nb, in_nb):
    """Depth-first search for a leaf whose trace matches the first path."""
    n = path.n
    cells = _refine(cells, n, out_nb, in_nb)
    if _trace(cells, n, out_nb, in_nb) != path.traces[depth]:
        return None
    if depth == len(path.base):
        gamma = [0] * n
        for i, cell in enumerate(cells):
            gamma[path.leaf[i]] = cell[0]
        return tuple(gamma)
    t = path.targets[depth]
    for w in cells[t]:
        found = _search(path, _individualize(cells, t, w), depth + 1, out_nb, in_nb)
        if found is not None:
            return found
    return None


def _orbit(v, gens):
    seen = {v}
    stack = [v]
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def automorphisms(n, adj, colors):
    """Return ``(generators, base, orbit_sizes)`` of the automorphism group.

    The generators form a strong generating set relative to ``base``; the
    group order is the product of ``orbit_sizes``.
    """
    if n == 0:
        return [], [], []
    path = _FirstPath(n, adj, colors)
    out_nb, in_nb = path.out_nb, path.in_nb
    gens = []
    orbit_sizes = []
    for level in reversed(range(len(path.base))):
        cells = path.partitions[level]
        t = path.targets[level]
        v = path.base[level]
        orbit = _orbit(v, gens)
        for w in cells[t]:
            if w in orbit:
                continue
            gamma = _search(path, _individualize(cells, t, w), level + 1, out_nb, in_nb)
            if gamma is not None:
                gens.append(gamma)
                orbit = _orbit(v, gens)
        orbit_sizes.append(len(orbit))
    orbit_sizes.reverse()
    return gens, list(path.base), orbit_sizes


def isomorphism(n, adj1, colors1, adj2, colors2):
    """Return ``gamma`` with ``u -> v`` in graph 1 iff ``gamma[u] -> gamma[v]`` in 2."""
    if sorted(colors1) != sorted(colors2):
        return None
    if n == 0:
        return ()
    path = _FirstPath(n, adj1, colors1)
    out2, in2 = _neighbours(n, adj2)
    return _search(path, _initial_cells(colors2), 0, out2, in2)


def closure(gens, degree, bound):
    """All products of ``gens``; None if more than ``bound`` elements."""
    ident = tuple(range(degree))
    seen = {ident}
    found = [ident]
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for s in gens:
                c = tuple([s[x] for x in e])
                if c not in seen:
                    seen.add(c)
                    found.append(c)
                    nxt.append(c)
                    if len(found) > bound:
                        return None
        frontier = nxt
    return found
