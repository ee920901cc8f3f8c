# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled edge-subset kernel; same contract and visiting order as ``_kernels_py``."""

ctypedef unsigned long long u64

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

cdef int MAX_BITS = 64


cdef inline int _popcount(u64 x) nogil:
    return __builtin_popcountll(x)


cdef struct Ctx:
    int n_nodes
    int n_pairs
    int max_edges
    int init
    int end
    bint constrained
    long long limit
    long long examined
    u64 need_in
    u64 need_out
    int src[64]
    int tgt[64]
    u64 src_suffix[65]
    u64 tgt_suffix[65]


cdef u64 _reach(u64* adj, int start) nogil:
    cdef u64 reached = 0
    cdef u64 frontier = (<u64>1) << start
    cdef u64 nxt, x, low
    while frontier:
        nxt = 0
        x = frontier
        while x:
            low = x & (~x + 1)
            nxt |= adj[__builtin_ctzll(x)]
            x ^= low
        nxt &= ~reached
        reached |= nxt
        frontier = nxt
    return reached


cdef bint _leaf_ok(Ctx* c, u64 chosen) nogil:
    cdef u64 adj[64]
    cdef u64 radj[64]
    cdef int i, p, a, b
    cdef u64 x = chosen, low
    for i in range(c.n_nodes):
        adj[i] = 0
        radj[i] = 0
    while x:
        low = x & (~x + 1)
        p = __builtin_ctzll(x)
        a = c.src[p]
        b = c.tgt[p]
        adj[a] |= (<u64>1) << b
        radj[b] |= (<u64>1) << a
        x ^= low
    if (_reach(adj, c.init) & c.need_in) != c.need_in:
        return False
    return (_reach(radj, c.end) & c.need_out) == c.need_out


cdef bint _visit(Ctx* c, list found, int p, int count, u64 has_in, u64 has_out, u64 chosen) except -1:
    cdef u64 missing_in = c.need_in & ~has_in
    cdef u64 missing_out = c.need_out & ~has_out
    cdef int room
    if (missing_in & ~c.tgt_suffix[p]) or (missing_out & ~c.src_suffix[p]):
        return True
    room = c.max_edges - count
    if _popcount(missing_in) > room or _popcount(missing_out) > room:
        return True
    if p == c.n_pairs:
        c.examined += 1
        if 0 <= c.limit < c.examined:
            return False
        if not c.constrained or _leaf_ok(c, chosen):
            found.append(chosen)
        return True
    if count < c.max_edges:
        if not _visit(c, found, p + 1, count + 1,
                      has_in | ((<u64>1) << c.tgt[p]),
                      has_out | ((<u64>1) << c.src[p]),
                      chosen | ((<u64>1) << p)):
            return False
    return _visit(c, found, p + 1, count, has_in, has_out, chosen)


def edge_subsets(int n_nodes, pairs, int max_edges, int init=-1, int end=-1, long long limit=-1):
    """See ``pbgt._kernels_py.edge_subsets``. Handles at most 64 nodes and 64 pairs."""
    cdef Ctx c
    cdef int p, n_pairs = len(pairs)
    if n_nodes > MAX_BITS or n_pairs > MAX_BITS:
        raise ValueError("compiled kernel handles at most 64 nodes and 64 pairs")
    c.n_nodes = n_nodes
    c.n_pairs = n_pairs
    c.max_edges = max_edges
    c.init = init
    c.end = end
    c.constrained = init >= 0 and end >= 0
    c.limit = limit
    c.examined = 0
    cdef u64 full = ((<u64>1) << n_nodes) - 1 if n_nodes < 64 else <u64>0xFFFFFFFFFFFFFFFF
    c.need_in = (full & ~((<u64>1) << init)) if c.constrained else 0
    c.need_out = (full & ~((<u64>1) << end)) if c.constrained else 0
    for p in range(n_pairs):
        c.src[p] = pairs[p][0]
        c.tgt[p] = pairs[p][1]
    c.src_suffix[n_pairs] = 0
    c.tgt_suffix[n_pairs] = 0
    for p in range(n_pairs - 1, -1, -1):
        c.src_suffix[p] = c.src_suffix[p + 1] | ((<u64>1) << c.src[p])
        c.tgt_suffix[p] = c.tgt_suffix[p + 1] | ((<u64>1) << c.tgt[p])
    found = []
    _visit(&c, found, 0, 0, 0, 0, 0)
    return found, c.examined
