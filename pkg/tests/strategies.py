"""Hypothesis strategies for model graphs, plus relabelling helpers."""

from __future__ import annotations

import random
from functools import lru_cache

from hypothesis import strategies as st

from pbgt.finder import Scope, enumerate_instances
from pbgt.model import BehaviourInfo, Children, Connector, ConnectorKind, Element, ElementKind, ModelGraph

OWNED_KINDS = [ElementKind.INIT, ElementKind.END, ElementKind.BEHAVIOUR, ElementKind.GROUP, ElementKind.FORM]
STRUCTURAL = (ElementKind.MODEL, ElementKind.FORM, ElementKind.GROUP)


@st.composite
def random_graphs(draw, max_elements: int = 8) -> ModelGraph:
    """Referentially sound but otherwise arbitrary graphs (usually ill-formed)."""
    n = draw(st.integers(1, max_elements - 1))
    kinds = [ElementKind.MODEL] + draw(st.lists(st.sampled_from(OWNED_KINDS), min_size=n, max_size=n))
    ids = ["m"] + [f"x{i}" for i in range(1, n + 1)]
    structural = [i for i, k in enumerate(kinds) if k in STRUCTURAL]
    slots = {s: {"structs": [], "behaviours": [], "init": None, "end": None} for s in structural}

    def place(child: int, owner: int) -> None:
        slot = slots[owner]
        kind = kinds[child]
        if kind is ElementKind.INIT:
            if slot["init"] is None:
                slot["init"] = ids[child]
        elif kind is ElementKind.END:
            if slot["end"] is None:
                slot["end"] = ids[child]
        elif kind is ElementKind.BEHAVIOUR:
            slot["behaviours"].append(ids[child])
        else:
            slot["structs"].append(ids[child])

    for child in range(1, n + 1):
        owner = draw(st.one_of(st.none(), st.sampled_from(structural)))
        if owner is not None:
            place(child, owner)
        if draw(st.integers(0, 9)) == 0:
            place(child, draw(st.sampled_from(structural)))

    patterns = st.one_of(st.none(), st.sampled_from(["Login", "Call", "Sort"]))
    elements = []
    for i, k in enumerate(kinds):
        info = BehaviourInfo(pattern=draw(patterns)) if k is ElementKind.BEHAVIOUR else None
        elements.append(Element(ids[i], k, info))

    children = tuple(
        Children(ids[s], tuple(v["structs"]), tuple(v["behaviours"]), v["init"], v["end"])
        for s, v in slots.items()
        if v["structs"] or v["behaviours"] or v["init"] or v["end"] or draw(st.booleans())
    )

    pairs = st.tuples(st.sampled_from(ids), st.sampled_from(ids))
    connectors = []
    for c in range(draw(st.integers(0, 4))):
        edges = draw(st.lists(pairs, min_size=1, max_size=3, unique=True))
        kind = draw(st.sampled_from(list(ConnectorKind)))
        connectors.append(Connector(f"c{c}", kind, tuple(edges)))
    return ModelGraph(tuple(elements), children, tuple(connectors), "m")


@lru_cache(maxsize=None)
def wellformed_pool() -> tuple[ModelGraph, ...]:
    """Every well-formed instance of a few small scopes."""
    pool: list[ModelGraph] = []
    for scope in (
        Scope(max_behaviour=3, max_connector=3, max_edges_per_connector=2),
        Scope(max_behaviour=3, max_group=1, max_connector=3, max_edges_per_connector=2),
        Scope(max_behaviour=2, max_form=1, max_connector=4, max_edges_per_connector=2),
    ):
        pool.extend(g for g in enumerate_instances(scope) if len(g.elements) <= 8)
    return tuple(pool)


def wellformed_graphs() -> st.SearchStrategy[ModelGraph]:
    return st.sampled_from(wellformed_pool())


def relabel(graph: ModelGraph, seed: int, *, rename: bool = True) -> ModelGraph:
    """An isomorphic copy: ids renamed, element, entry, connector and edge order shuffled.

    Group child lists keep their order since it carries meaning.
    """
    rng = random.Random(seed)
    names = [e.id for e in graph.elements] + [c.id for c in graph.connectors]
    fresh = [f"n{i}" for i in range(len(names))]
    rng.shuffle(fresh)
    new = dict(zip(names, fresh)) if rename else {n: n for n in names}

    def shuffled(seq):
        seq = list(seq)
        rng.shuffle(seq)
        return seq

    elements = [Element(new[e.id], e.kind, e.behaviour, e.label) for e in shuffled(graph.elements)]
    kinds = {e.id: e.kind for e in graph.elements}
    children = []
    for c in shuffled(graph.children):
        keep = kinds.get(c.parent) is ElementKind.GROUP
        structs = c.structs if keep else shuffled(c.structs)
        behaviours = c.behaviours if keep else shuffled(c.behaviours)
        children.append(
            Children(
                new[c.parent],
                tuple(new[s] for s in structs),
                tuple(new[b] for b in behaviours),
                None if c.init is None else new[c.init],
                None if c.end is None else new[c.end],
            )
        )
    connectors = [
        Connector(new[c.id], c.kind, tuple((new[a], new[b]) for a, b in shuffled(c.edges)))
        for c in shuffled(graph.connectors)
    ]
    return ModelGraph(tuple(elements), tuple(children), tuple(connectors), new[graph.root])


def from_rep(rep) -> ModelGraph:
    """Model graph for a reference-enumerator instance."""
    kind = rep.kind_of
    elements = tuple(Element(a, ElementKind(k)) for a, k in rep.kind)
    entries = {}
    for owner, rel, child, idx in sorted(rep.owns, key=lambda f: (f[0], f[1], f[3], f[2])):
        entries.setdefault(owner, {"structs": [], "behaviours": [], "init": None, "end": None})
        slot = entries[owner]
        if rel in ("init", "end"):
            slot[rel] = child
        else:
            slot[rel].append(child)
    children = tuple(Children(o, tuple(v["structs"]), tuple(v["behaviours"]), v["init"], v["end"])
                     for o, v in sorted(entries.items()))
    connectors = tuple(Connector(f"c{i}", ConnectorKind(k), edges) for i, (k, edges) in enumerate(rep.connectors))
    root = next(a for a in kind if kind[a] == "Model")
    return ModelGraph(elements, children, connectors, root)
