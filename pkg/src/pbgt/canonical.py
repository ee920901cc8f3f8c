"""Canonical labels for model graphs, used to deduplicate isomorphic instances.

A model is flattened into a vertex-coloured digraph with labelled arcs:
elements and connectors are vertices, and every connector edge becomes its
own vertex hanging off the connector. Ownership arcs out of a Group carry
the child's position, because execution order inside a Group is meaningful.
Arcs out of a Form carry no position. Element ids, display labels and list
order inside Forms never reach the encoding.

The label is the lexicographically least encoding over all leaves of an
individualisation/refinement search, so two graphs get equal labels exactly
when they are isomorphic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .model import Children, Connector, Element, ElementKind, ModelGraph

_KIND_RANK = {
    ElementKind.MODEL: 0,
    ElementKind.INIT: 1,
    ElementKind.END: 2,
    ElementKind.BEHAVIOUR: 3,
    ElementKind.FORM: 4,
    ElementKind.GROUP: 5,
}
_PREFIX = {
    ElementKind.MODEL: "M",
    ElementKind.INIT: "I",
    ElementKind.END: "E",
    ElementKind.BEHAVIOUR: "B",
    ElementKind.FORM: "F",
    ElementKind.GROUP: "G",
}

_ELEMENT, _CONNECTOR, _EDGE = 0, 1, 2


@dataclass
class _Flat:
    colors: list[tuple]  # initial vertex colours
    out: list[list[tuple[str, int]]]
    inn: list[list[tuple[str, int]]]
    arcs: list[tuple[int, str, int]]
    n_elements: int
    edge_vertex: list[tuple[int, int]]  # (connector index, edge index) per edge vertex


def _flatten(graph: ModelGraph) -> _Flat:
    colors: list[tuple] = []
    index: dict[str, int] = {}
    for e in graph.elements:
        index[e.id] = len(colors)
        info = e.behaviour
        colors.append(
            (
                _ELEMENT,
                _KIND_RANK[e.kind],
                (info.pattern or "") if info else "",
                (info.widget or "") if info else "",
                int(e.id == graph.root),
            )
        )
    n_elements = len(colors)
    arcs: list[tuple[int, str, int]] = []
    kinds = {e.id: e.kind for e in graph.elements}
    for c in graph.children:
        p = index[c.parent]
        ordered = kinds[c.parent] is ElementKind.GROUP
        for i, s in enumerate(c.structs):
            arcs.append((p, f"s{i}" if ordered else "s", index[s]))
        for i, b in enumerate(c.behaviours):
            arcs.append((p, f"b{i}" if ordered else "b", index[b]))
        if c.init is not None:
            arcs.append((p, "i", index[c.init]))
        if c.end is not None:
            arcs.append((p, "e", index[c.end]))
    edge_vertex = []
    for ci, conn in enumerate(graph.connectors):
        cv = len(colors)
        colors.append((_CONNECTOR, conn.kind.value, "", "", 0))
        for ei, (a, b) in enumerate(conn.edges):
            ev = len(colors)
            colors.append((_EDGE, "", "", "", 0))
            edge_vertex.append((ci, ei))
            arcs.append((cv, "has", ev))
            arcs.append((ev, "src", index[a]))
            arcs.append((ev, "tgt", index[b]))
    n = len(colors)
    out: list[list[tuple[str, int]]] = [[] for _ in range(n)]
    inn: list[list[tuple[str, int]]] = [[] for _ in range(n)]
    for u, lab, w in arcs:
        out[u].append((lab, w))
        inn[w].append((lab, u))
    return _Flat(colors, out, inn, arcs, n_elements, edge_vertex)


def _rank(values: list) -> list[int]:
    table = {v: i for i, v in enumerate(sorted(set(values)))}
    return [table[v] for v in values]


def _refine(colors: list[int], flat: _Flat) -> list[int]:
    n_cells = len(set(colors))
    out, inn = flat.out, flat.inn
    while True:
        sigs = [
            (
                colors[v],
                tuple(sorted((lab, colors[w]) for lab, w in out[v])),
                tuple(sorted((lab, colors[u]) for lab, u in inn[v])),
            )
            for v in range(len(colors))
        ]
        new = _rank(sigs)
        k = max(new, default=-1) + 1
        if k == n_cells:
            return new
        colors, n_cells = new, k


def _encode(colors: list[int], flat: _Flat) -> tuple:
    order = sorted(range(len(colors)), key=colors.__getitem__)
    vertex_part = tuple(flat.colors[v] for v in order)
    arc_part = tuple(sorted((colors[u], lab, colors[w]) for u, lab, w in flat.arcs))
    return vertex_part, arc_part


def _search(flat: _Flat) -> tuple[tuple, list[int]]:
    best: list = [None, None]
    n = len(flat.colors)

    def visit(colors: list[int]) -> None:
        colors = _refine(colors, flat)
        counts: dict[int, int] = {}
        for c in colors:
            counts[c] = counts.get(c, 0) + 1
        split = min((c for c, k in counts.items() if k > 1), default=None)
        if split is None:
            enc = _encode(colors, flat)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, colors
            return
        for v in range(n):
            if colors[v] != split:
                continue
            branch = [2 * c + 1 for c in colors]
            branch[v] = 2 * colors[v]
            visit(branch)

    visit(_rank(flat.colors))
    return best[0], best[1]


def canonical_form(graph: ModelGraph) -> bytes:
    """Isomorphism-invariant label of ``graph`` (which must pass the RI rules)."""
    enc, _ = _search(_flatten(graph))
    return json.dumps(enc, separators=(",", ":")).encode("ascii")


def canonical_graph(graph: ModelGraph) -> tuple[bytes, ModelGraph]:
    """The canonical label together with a canonically relabelled copy.

    Ids become kind prefixes plus a rank (``M``, ``I1``, ``B2``, ``C1``...),
    Form children are listed in canonical order, Group children keep theirs,
    connectors and their edges follow the canonical order too. Isomorphic
    inputs produce identical copies.
    """
    flat = _flatten(graph)
    enc, colors = _search(flat)
    label = json.dumps(enc, separators=(",", ":")).encode("ascii")

    n_el = flat.n_elements
    el_order = sorted(range(n_el), key=colors.__getitem__)
    new_id: dict[str, str] = {}
    counters: dict[ElementKind, int] = {}
    elements = []
    for v in el_order:
        e = graph.elements[v]
        counters[e.kind] = counters.get(e.kind, 0) + 1
        k = counters[e.kind]
        nid = "M" if e.kind is ElementKind.MODEL and k == 1 else f"{_PREFIX[e.kind]}{k}"
        new_id[e.id] = nid
        elements.append(Element(nid, e.kind, e.behaviour))
    rank = {graph.elements[v].id: colors[v] for v in range(n_el)}

    children = []
    for c in sorted(graph.children, key=lambda c: rank[c.parent]):
        ordered = graph.by_id[c.parent].kind is ElementKind.GROUP
        structs = list(c.structs) if ordered else sorted(c.structs, key=rank.__getitem__)
        behaviours = list(c.behaviours) if ordered else sorted(c.behaviours, key=rank.__getitem__)
        children.append(
            Children(
                new_id[c.parent],
                tuple(new_id[s] for s in structs),
                tuple(new_id[b] for b in behaviours),
                None if c.init is None else new_id[c.init],
                None if c.end is None else new_id[c.end],
            )
        )

    edge_rank: dict[tuple[int, int], int] = {}
    conn_rank: dict[int, int] = {}
    v = n_el
    for ci, conn in enumerate(graph.connectors):
        conn_rank[ci] = colors[v]
        v += 1
        for ei in range(len(conn.edges)):
            edge_rank[(ci, ei)] = colors[v]
            v += 1
    connectors = []
    for k, ci in enumerate(sorted(conn_rank, key=conn_rank.__getitem__), 1):
        conn = graph.connectors[ci]
        eis = sorted(range(len(conn.edges)), key=lambda ei: edge_rank[(ci, ei)])
        edges = tuple((new_id[conn.edges[ei][0]], new_id[conn.edges[ei][1]]) for ei in eis)
        connectors.append(Connector(f"C{k}", conn.kind, edges))

    return label, ModelGraph(tuple(elements), tuple(children), tuple(connectors), new_id[graph.root])
