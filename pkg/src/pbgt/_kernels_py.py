"""Pure-Python edge-subset kernel. ``_speedups.pyx`` mirrors it step for step."""

from __future__ import annotations


def _reach(adj: list[int], start: int) -> int:
    reached = 0
    frontier = 1 << start
    while frontier:
        nxt = 0
        x = frontier
        while x:
            low = x & -x
            nxt |= adj[low.bit_length() - 1]
            x ^= low
        nxt &= ~reached
        reached |= nxt
        frontier = nxt
    return reached


def edge_subsets(
    n_nodes: int,
    pairs: list[tuple[int, int]],
    max_edges: int,
    init: int = -1,
    end: int = -1,
    limit: int = -1,
) -> tuple[list[int], int]:
    """Enumerate subsets of ``pairs`` (as bitmasks over pair indices) of size <= ``max_edges``.

    With ``init``/``end`` given (a Form's sibling set), only subsets in which
    every node except ``init`` is reachable from ``init`` and every node except
    ``end`` reaches ``end`` are kept. Without them (a Group) every subset is
    kept. Returns ``(masks, examined)`` where ``examined`` counts complete
    subsets tested; the search stops once ``examined`` exceeds a non-negative
    ``limit``.
    """
    n_pairs = len(pairs)
    full = (1 << n_nodes) - 1
    constrained = init >= 0 and end >= 0
    need_in = full & ~(1 << init) if constrained else 0
    need_out = full & ~(1 << end) if constrained else 0
    src_suffix = [0] * (n_pairs + 1)
    tgt_suffix = [0] * (n_pairs + 1)
    for p in range(n_pairs - 1, -1, -1):
        a, b = pairs[p]
        src_suffix[p] = src_suffix[p + 1] | (1 << a)
        tgt_suffix[p] = tgt_suffix[p + 1] | (1 << b)

    found: list[int] = []
    examined = 0

    def leaf(chosen: int) -> None:
        adj = [0] * n_nodes
        radj = [0] * n_nodes
        x = chosen
        while x:
            low = x & -x
            a, b = pairs[low.bit_length() - 1]
            adj[a] |= 1 << b
            radj[b] |= 1 << a
            x ^= low
        if (_reach(adj, init) & need_in) == need_in and (_reach(radj, end) & need_out) == need_out:
            found.append(chosen)

    def visit(p: int, count: int, has_in: int, has_out: int, chosen: int) -> bool:
        nonlocal examined
        missing_in = need_in & ~has_in
        missing_out = need_out & ~has_out
        if missing_in & ~tgt_suffix[p] or missing_out & ~src_suffix[p]:
            return True
        room = max_edges - count
        if missing_in.bit_count() > room or missing_out.bit_count() > room:
            return True
        if p == n_pairs:
            examined += 1
            if 0 <= limit < examined:
                return False
            if constrained:
                leaf(chosen)
            else:
                found.append(chosen)
            return True
        a, b = pairs[p]
        if count < max_edges:
            if not visit(p + 1, count + 1, has_in | (1 << b), has_out | (1 << a), chosen | (1 << p)):
                return False
        return visit(p + 1, count, has_in, has_out, chosen)

    visit(0, 0, 0, 0, 0)
    return found, examined
