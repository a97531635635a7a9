# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; a line-by-line mirror of ``_pykernels``."""

from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memcpy, memset

BACKEND = "cython"


cdef struct Graph:
    int n
    int* out_start
    int* out_list
    int* in_start
    int* in_list


cdef struct Part:
    int ncells
    int* lab
    int* cstart
    int* clen


cdef struct Trace:
    int length
    int* data


cdef Graph* graph_new(int n, const unsigned char[:] adj) except NULL:
    cdef Graph* g = <Graph*>malloc(sizeof(Graph))
    cdef int u, v, k, arcs = 0
    g.n = n
    for u in range(n * n):
        if adj[u]:
            arcs += 1
    g.out_start = <int*>malloc((n + 1) * sizeof(int))
    g.in_start = <int*>malloc((n + 1) * sizeof(int))
    g.out_list = <int*>malloc((arcs + 1) * sizeof(int))
    g.in_list = <int*>malloc((arcs + 1) * sizeof(int))
    k = 0
    for u in range(n):
        g.out_start[u] = k
        for v in range(n):
            if adj[u * n + v]:
                g.out_list[k] = v
                k += 1
    g.out_start[n] = k
    k = 0
    for v in range(n):
        g.in_start[v] = k
        for u in range(n):
            if adj[u * n + v]:
                g.in_list[k] = u
                k += 1
    g.in_start[n] = k
    return g


cdef void graph_free(Graph* g):
    free(g.out_start)
    free(g.in_start)
    free(g.out_list)
    free(g.in_list)
    free(g)


cdef Part part_new(int n):
    cdef Part p
    cdef int* block = <int*>malloc((3 * n + 1) * sizeof(int))
    p.ncells = 0
    p.lab = block
    p.cstart = block + n
    p.clen = block + 2 * n
    return p


cdef void part_free(Part p):
    free(p.lab)


cdef Part part_copy(Part src, int n):
    cdef Part p = part_new(n)
    memcpy(p.lab, src.lab, (3 * n + 1) * sizeof(int))
    p.ncells = src.ncells
    return p


cdef Part individualize(Part src, int n, int t, int w):
    # cells[:t] + [[w], cell minus w] + cells[t+1:]
    cdef Part p = part_new(n)
    cdef int i, j, s, k
    memcpy(p.lab, src.lab, n * sizeof(int))
    for i in range(t):
        p.cstart[i] = src.cstart[i]
        p.clen[i] = src.clen[i]
    s = src.cstart[t]
    p.lab[s] = w
    k = s + 1
    for j in range(s, s + src.clen[t]):
        if src.lab[j] != w:
            p.lab[k] = src.lab[j]
            k += 1
    p.cstart[t] = s
    p.clen[t] = 1
    p.cstart[t + 1] = s + 1
    p.clen[t + 1] = src.clen[t] - 1
    for i in range(t + 1, src.ncells):
        p.cstart[i + 1] = src.cstart[i]
        p.clen[i + 1] = src.clen[i]
    p.ncells = src.ncells + 1
    return p


cdef void refine(Part* p, Graph* g, int* cnt_out, int* cnt_in, int* keys,
                 int* new_lab, int* new_start, int* new_len):
    cdef int n = g.n
    cdef int changed = 1
    cdef int k, i, j, q, w, u, x, key, tmpk, tmpx, start, length, nnew, pos, groups
    while changed:
        changed = 0
        k = 0
        while k < p.ncells:
            memset(cnt_out, 0, n * sizeof(int))
            memset(cnt_in, 0, n * sizeof(int))
            for q in range(p.cstart[k], p.cstart[k] + p.clen[k]):
                w = p.lab[q]
                for j in range(g.in_start[w], g.in_start[w + 1]):
                    cnt_out[g.in_list[j]] += 1
                for j in range(g.out_start[w], g.out_start[w + 1]):
                    cnt_in[g.out_list[j]] += 1
            nnew = 0
            pos = 0
            for i in range(p.ncells):
                start = p.cstart[i]
                length = p.clen[i]
                for q in range(length):
                    x = p.lab[start + q]
                    new_lab[pos + q] = x
                    keys[q] = cnt_out[x] * (n + 1) + cnt_in[x]
                if length > 1:
                    # stable insertion sort by key; vertices stay ascending
                    for q in range(1, length):
                        tmpk = keys[q]
                        tmpx = new_lab[pos + q]
                        j = q - 1
                        while j >= 0 and keys[j] > tmpk:
                            keys[j + 1] = keys[j]
                            new_lab[pos + j + 1] = new_lab[pos + j]
                            j -= 1
                        keys[j + 1] = tmpk
                        new_lab[pos + j + 1] = tmpx
                    groups = 1
                    new_start[nnew] = pos
                    for q in range(1, length):
                        if keys[q] != keys[q - 1]:
                            new_len[nnew] = pos + q - new_start[nnew]
                            nnew += 1
                            new_start[nnew] = pos + q
                            groups += 1
                    new_len[nnew] = pos + length - new_start[nnew]
                    nnew += 1
                    if groups > 1:
                        changed = 1
                else:
                    new_start[nnew] = pos
                    new_len[nnew] = length
                    nnew += 1
                pos += length
            memcpy(p.lab, new_lab, n * sizeof(int))
            memcpy(p.cstart, new_start, nnew * sizeof(int))
            memcpy(p.clen, new_len, nnew * sizeof(int))
            p.ncells = nnew
            k += 1


cdef Trace trace_of(Part* p, Graph* g, int* cell_of):
    cdef Trace tr
    cdef int m = p.ncells
    cdef int width = 1 + 2 * m
    cdef int i, j, x, q
    cdef int* row
    tr.length = m * width
    tr.data = <int*>calloc(tr.length + 1, sizeof(int))
    for i in range(m):
        for q in range(p.cstart[i], p.cstart[i] + p.clen[i]):
            cell_of[p.lab[q]] = i
    for i in range(m):
        row = tr.data + i * width
        row[0] = p.clen[i]
        x = p.lab[p.cstart[i]]
        for j in range(g.out_start[x], g.out_start[x + 1]):
            row[1 + cell_of[g.out_list[j]]] += 1
        for j in range(g.in_start[x], g.in_start[x + 1]):
            row[1 + m + cell_of[g.in_list[j]]] += 1
    return tr


cdef int trace_equal(Trace a, Trace b):
    cdef int i
    if a.length != b.length:
        return 0
    for i in range(a.length):
        if a.data[i] != b.data[i]:
            return 0
    return 1


cdef int target_cell(Part* p):
    cdef int best = -1, size = 1, i
    for i in range(p.ncells):
        if p.clen[i] > size:
            best = i
            size = p.clen[i]
    return best


cdef struct Work:
    int* cnt_out
    int* cnt_in
    int* keys
    int* new_lab
    int* new_start
    int* new_len
    int* cell_of


cdef Work work_new(int n):
    cdef Work w
    w.cnt_out = <int*>malloc((n + 1) * sizeof(int))
    w.cnt_in = <int*>malloc((n + 1) * sizeof(int))
    w.keys = <int*>malloc((n + 1) * sizeof(int))
    w.new_lab = <int*>malloc((n + 1) * sizeof(int))
    w.new_start = <int*>malloc((n + 1) * sizeof(int))
    w.new_len = <int*>malloc((n + 1) * sizeof(int))
    w.cell_of = <int*>malloc((n + 1) * sizeof(int))
    return w


cdef void work_free(Work w):
    free(w.cnt_out)
    free(w.cnt_in)
    free(w.keys)
    free(w.new_lab)
    free(w.new_start)
    free(w.new_len)
    free(w.cell_of)


cdef void do_refine(Part* p, Graph* g, Work* w):
    refine(p, g, w.cnt_out, w.cnt_in, w.keys, w.new_lab, w.new_start, w.new_len)


cdef class _FirstPath:
    cdef int n
    cdef int depth
    cdef Graph* g
    cdef Work w
    cdef Part* parts
    cdef Trace* traces
    cdef int* base
    cdef int* targets
    cdef int* leaf

    def __cinit__(self, int n, const unsigned char[:] adj, list cells):
        cdef int i, t, v
        cdef Part p, q
        self.n = n
        self.g = graph_new(n, adj)
        self.w = work_new(n)
        self.parts = <Part*>malloc((n + 1) * sizeof(Part))
        self.traces = <Trace*>malloc((n + 1) * sizeof(Trace))
        self.base = <int*>malloc((n + 1) * sizeof(int))
        self.targets = <int*>malloc((n + 1) * sizeof(int))
        self.leaf = <int*>malloc((n + 1) * sizeof(int))
        p = load_cells(cells, n)
        do_refine(&p, self.g, &self.w)
        self.depth = 0
        self.parts[0] = p
        self.traces[0] = trace_of(&p, self.g, self.w.cell_of)
        while p.ncells < n:
            t = target_cell(&p)
            v = p.lab[p.cstart[t]]
            self.base[self.depth] = v
            self.targets[self.depth] = t
            q = individualize(p, n, t, v)
            do_refine(&q, self.g, &self.w)
            self.depth += 1
            self.parts[self.depth] = q
            self.traces[self.depth] = trace_of(&q, self.g, self.w.cell_of)
            p = q
        for i in range(n):
            self.leaf[i] = p.lab[i]

    def __dealloc__(self):
        cdef int i
        if self.parts != NULL:
            for i in range(self.depth + 1):
                part_free(self.parts[i])
                free(self.traces[i].data)
            free(self.parts)
            free(self.traces)
        free(self.base)
        free(self.targets)
        free(self.leaf)
        work_free(self.w)
        if self.g != NULL:
            graph_free(self.g)


cdef Part load_cells(list cells, int n):
    cdef Part p = part_new(n)
    cdef int pos = 0, i = 0
    for cell in cells:
        p.cstart[i] = pos
        p.clen[i] = len(cell)
        for x in cell:
            p.lab[pos] = x
            pos += 1
        i += 1
    p.ncells = i
    return p


cdef int search(_FirstPath path, Part cells, int depth, Graph* g, Work* w, int* gamma):
    """Consumes ``cells``; on success fills ``gamma`` and returns 1."""
    cdef Trace tr
    cdef int ok, i, t, q, found
    cdef Part child
    do_refine(&cells, g, w)
    tr = trace_of(&cells, g, w.cell_of)
    ok = trace_equal(tr, path.traces[depth])
    free(tr.data)
    if not ok:
        part_free(cells)
        return 0
    if depth == path.depth:
        for i in range(path.n):
            gamma[path.leaf[i]] = cells.lab[i]
        part_free(cells)
        return 1
    t = path.targets[depth]
    found = 0
    for q in range(cells.cstart[t], cells.cstart[t] + cells.clen[t]):
        child = individualize(cells, path.n, t, cells.lab[q])
        if search(path, child, depth + 1, g, w, gamma):
            found = 1
            break
    part_free(cells)
    return found


cdef int orbit_of(int v, list gens, int n, char* mark):
    cdef int size = 1, x
    memset(mark, 0, n)
    mark[v] = 1
    stack = [v]
    while stack:
        x = stack.pop()
        for gen in gens:
            y = gen[x]
            if not mark[y]:
                mark[y] = 1
                size += 1
                stack.append(y)
    return size


def _initial_cells(colors):
    by_color = {}
    for v, c in enumerate(colors):
        by_color.setdefault(c, []).append(v)
    return [by_color[c] for c in sorted(by_color)]


def automorphisms(int n, adj, colors):
    """Return ``(generators, base, orbit_sizes)``; see ``_pykernels``."""
    if n == 0:
        return [], [], []
    cdef const unsigned char[:] a = adj
    cdef _FirstPath path = _FirstPath(n, a, _initial_cells(colors))
    cdef int level, t, v, q, w
    cdef int* gamma = <int*>malloc(n * sizeof(int))
    cdef char* mark = <char*>malloc(n)
    cdef Part cells
    gens = []
    orbit_sizes = []
    try:
        for level in range(path.depth - 1, -1, -1):
            cells = path.parts[level]
            t = path.targets[level]
            v = path.base[level]
            size = orbit_of(v, gens, n, mark)
            for q in range(cells.cstart[t], cells.cstart[t] + cells.clen[t]):
                w = cells.lab[q]
                if mark[w]:
                    continue
                if search(path, individualize(cells, n, t, w), level + 1,
                          path.g, &path.w, gamma):
                    gens.append(tuple([gamma[i] for i in range(n)]))
                    size = orbit_of(v, gens, n, mark)
            orbit_sizes.append(size)
    finally:
        free(gamma)
        free(mark)
    orbit_sizes.reverse()
    return gens, [path.base[i] for i in range(path.depth)], orbit_sizes


def isomorphism(int n, adj1, colors1, adj2, colors2):
    if sorted(colors1) != sorted(colors2):
        return None
    if n == 0:
        return ()
    cdef const unsigned char[:] a1 = adj1
    cdef const unsigned char[:] a2 = adj2
    cdef _FirstPath path = _FirstPath(n, a1, _initial_cells(colors1))
    cdef Graph* g2 = graph_new(n, a2)
    cdef Work w = work_new(n)
    cdef int* gamma = <int*>malloc(n * sizeof(int))
    result = None
    try:
        if search(path, load_cells(_initial_cells(colors2), n), 0, g2, &w, gamma):
            result = tuple([gamma[i] for i in range(n)])
    finally:
        free(gamma)
        work_free(w)
        graph_free(g2)
    return result


def closure(gens, int degree, long bound):
    cdef int i, ngen = len(gens)
    cdef int* gs = <int*>malloc((ngen * degree + 1) * sizeof(int))
    cdef int* buf = <int*>malloc((degree + 1) * sizeof(int))
    cdef int k
    for k in range(ngen):
        s = gens[k]
        for i in range(degree):
            gs[k * degree + i] = s[i]
    ident = tuple(range(degree))
    seen = {ident}
    found = [ident]
    frontier = [ident]
    try:
        while frontier:
            nxt = []
            for e in frontier:
                for i in range(degree):
                    buf[i] = e[i]
                for k in range(ngen):
                    c = tuple([gs[k * degree + buf[i]] for i in range(degree)])
                    if c not in seen:
                        seen.add(c)
                        found.append(c)
                        nxt.append(c)
                        if len(found) > bound:
                            return None
            frontier = nxt
    finally:
        free(gs)
        free(buf)
    return found
