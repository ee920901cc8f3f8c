"""Well-formedness rules over a :class:`~pbgt.model.ModelGraph`.

Rules come in two tiers. ``RI*`` rules check referential integrity (ids
resolve, kinds fit the slot they occupy); when any of them fires, the
structural ``F*`` and connector ``LC*`` rules are not evaluated because their
answers would be meaningless. Otherwise every rule runs and every violation
is reported, so a caller always sees the complete set.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .model import (
    FORM_KINDS,
    STRUCTURAL_KINDS,
    ElementKind,
    ModelGraph,
    UnknownElementError,
)

RULES: dict[str, str] = {
    "RI1": "ids are unique across elements and connectors",
    "RI2": "every referenced id names an element",
    "RI3": "owned elements have the kind their slot requires",
    "RI4": "the root is the one and only Model element",
    "RI5": "only Behaviour elements carry pattern/widget information",
    "RI6": "each structural element has at most one children entry",
    "F1": "every element except the root has exactly one parent",
    "F2": "the root Model has no parent",
    "F3": "every structural element is reachable from the root through innerStructs",
    "F4": "every structural element owns at least one Behaviour",
    "F5": "every Group owns at least two Behaviours",
    "F6": "every Form owns exactly one Init and one End; Groups own neither",
    "LC1": "a connector never links an element to itself (sources and targets are disjoint)",
    "LC2": "an End is never a connector source and an Init is never a connector target",
    "LC3": "a connector touches at most one Init/End element",
    "LC4": "no ordered pair of elements is linked more than once",
    "LC5": "linked elements share the same parent",
    "LC6": "every child of a Form lies on a path from its Init to its End",
    "LC-F": "a connector maps each source to at most one target",
    "LC-M": "no connector touches the root Model",
}

RULE_ORDER = {rule: i for i, rule in enumerate(RULES)}

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    rule: str
    subjects: tuple[str, ...]
    message: str
    severity: str = ERROR
    # (line, column) in the source document, when one exists
    location: Optional[tuple[int, int]] = None

    def sort_key(self):
        return (RULE_ORDER.get(self.rule.split("/")[-1], len(RULE_ORDER)), self.rule, self.subjects, self.message)

    def to_line(self) -> str:
        return f"{self.rule}\t{','.join(self.subjects)}\t{self.message}"


def _sorted(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


# --- ownership and reachability -------------------------------------------


def owners(graph: ModelGraph, element: str) -> tuple[str, ...]:
    """All owners of ``element``; more or fewer than one only in ill-formed graphs."""
    if element not in graph.by_id:
        raise UnknownElementError(element)
    return graph.owners.get(element, ())


def parent(graph: ModelGraph, element: str) -> Optional[str]:
    """The unique owner of ``element``, or None for the root.

    Ill-formed graphs may give an element zero or several owners; those cases
    also return None and :func:`owners` tells them apart.
    """
    found = owners(graph, element)
    return found[0] if len(found) == 1 else None


def _closure(succ: dict[str, frozenset[str]], start: str) -> set[str]:
    seen: set[str] = set()
    stack = list(succ.get(start, ()))
    while stack:
        x = stack.pop()
        if x in seen:
            continue
        seen.add(x)
        stack.extend(succ.get(x, ()))
    return seen


def _predecessors(graph: ModelGraph) -> dict[str, frozenset[str]]:
    pred: dict[str, set[str]] = {}
    for a, b in graph.all_edges():
        pred.setdefault(b, set()).add(a)
    return {k: frozenset(v) for k, v in pred.items()}


def forward_reach(graph: ModelGraph, start: str) -> set[str]:
    """Elements reachable from ``start`` in one or more connector hops."""
    if start not in graph.by_id:
        raise UnknownElementError(start)
    return _closure(graph.successors, start)


def backward_reach(graph: ModelGraph, start: str) -> set[str]:
    """Elements from which ``start`` is reachable in one or more hops."""
    if start not in graph.by_id:
        raise UnknownElementError(start)
    return _closure(_predecessors(graph), start)


# --- referential integrity -------------------------------------------------


def _integrity(graph: ModelGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    add = diags.append

    counts = Counter(e.id for e in graph.elements)
    counts.update(c.id for c in graph.connectors)
    for eid, n in counts.items():
        if n > 1:
            add(Diagnostic("RI1", (eid,), f"id {eid!r} is used {n} times"))

    kinds = {e.id: e.kind for e in graph.elements}

    def resolve(ref: str, where: str) -> Optional[ElementKind]:
        if ref not in kinds:
            add(Diagnostic("RI2", (ref,), f"{where} refers to unknown element {ref!r}"))
            return None
        return kinds[ref]

    root_kind = resolve(graph.root, "root")
    if root_kind is not None and root_kind is not ElementKind.MODEL:
        add(Diagnostic("RI4", (graph.root,), f"root {graph.root!r} is a {root_kind.value}, not a Model"))
    for e in graph.elements:
        if e.kind is ElementKind.MODEL and e.id != graph.root:
            add(Diagnostic("RI4", (e.id,), f"second Model element {e.id!r}"))
        if e.kind is not ElementKind.BEHAVIOUR and e.behaviour is not None:
            add(Diagnostic("RI5", (e.id,), f"{e.kind.value} {e.id!r} carries behaviour information"))

    seen_parents: Counter = Counter()
    for c in graph.children:
        seen_parents[c.parent] += 1
        pk = resolve(c.parent, "children entry")
        if pk is not None and pk not in STRUCTURAL_KINDS:
            add(Diagnostic("RI3", (c.parent,), f"{pk.value} {c.parent!r} cannot own elements"))
        for s in c.structs:
            k = resolve(s, f"innerStructs of {c.parent!r}")
            if k is not None and k not in STRUCTURAL_KINDS:
                add(Diagnostic("RI3", (c.parent, s), f"{k.value} {s!r} listed as an inner structural element"))
        for b in c.behaviours:
            k = resolve(b, f"innerBehaviour of {c.parent!r}")
            if k is not None and k is not ElementKind.BEHAVIOUR:
                add(Diagnostic("RI3", (c.parent, b), f"{k.value} {b!r} listed as an inner behaviour"))
        for slot, ref, want in (("init", c.init, ElementKind.INIT), ("end", c.end, ElementKind.END)):
            if ref is None:
                continue
            k = resolve(ref, f"{slot} of {c.parent!r}")
            if k is not None and k is not want:
                add(Diagnostic("RI3", (c.parent, ref), f"{slot} of {c.parent!r} is a {k.value}"))
    for p, n in seen_parents.items():
        if n > 1:
            add(Diagnostic("RI6", (p,), f"{p!r} has {n} children entries"))

    for conn in graph.connectors:
        for a, b in conn.edges:
            resolve(a, f"connector {conn.id!r}")
            resolve(b, f"connector {conn.id!r}")
    return diags


# --- structural facts -------------------------------------------------------


def _ownership_rules(graph: ModelGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    add = diags.append
    own = graph.owners
    root = graph.root

    for e in graph.elements:
        n = len(own.get(e.id, ()))
        if e.id == root:
            if n:
                add(Diagnostic("F2", (root,), f"root is owned by {', '.join(sorted(own[root]))}"))
        elif n != 1:
            detail = "no parent" if n == 0 else f"{n} parents ({', '.join(sorted(own[e.id]))})"
            add(Diagnostic("F1", (e.id,), f"{e.kind.value} {e.id!r} has {detail}"))

    reach: set[str] = set()
    stack = [root]
    kids = graph.children_of
    while stack:
        s = stack.pop()
        c = kids.get(s)
        if c is None:
            continue
        for t in c.structs:
            if t not in reach:
                reach.add(t)
                stack.append(t)

    for e in graph.elements:
        if e.kind not in STRUCTURAL_KINDS:
            continue
        c = kids.get(e.id)
        if e.id != root and e.id not in reach:
            add(Diagnostic("F3", (e.id,), f"{e.kind.value} {e.id!r} is not reachable from the root"))
        nb = len(c.behaviours) if c else 0
        if nb == 0:
            add(Diagnostic("F4", (e.id,), f"{e.kind.value} {e.id!r} owns no Behaviour"))
        if e.kind is ElementKind.GROUP:
            if nb < 2:
                add(Diagnostic("F5", (e.id,), f"Group {e.id!r} owns {nb} Behaviour(s), needs at least 2"))
            if c is not None and (c.init is not None or c.end is not None):
                add(Diagnostic("F6", (e.id,), f"Group {e.id!r} owns an Init or End"))
        else:
            if c is None or c.init is None:
                add(Diagnostic("F6", (e.id,), f"{e.kind.value} {e.id!r} has no Init"))
            if c is None or c.end is None:
                add(Diagnostic("F6", (e.id,), f"{e.kind.value} {e.id!r} has no End"))
    return diags


# --- connector facts ---------------------------------------------------------


def _connector_rules(graph: ModelGraph) -> list[Diagnostic]:
    diags: list[Diagnostic] = []
    add = diags.append
    kinds = {e.id: e.kind for e in graph.elements}
    own = graph.owners
    root = graph.root
    endpoints_kinds = (ElementKind.INIT, ElementKind.END)
    pair_uses: dict[tuple[str, str], list[str]] = {}

    for conn in graph.connectors:
        cid = conn.id
        srcs = [a for a, _ in conn.edges]
        overlap = set(srcs) & conn.targets
        if overlap:
            add(Diagnostic("LC1", (cid, *sorted(overlap)), f"connector {cid!r} both starts and ends at {sorted(overlap)}"))
        dup_src = sorted(a for a, n in Counter(srcs).items() if n > 1)
        for a in dup_src:
            add(Diagnostic("LC-F", (cid, a), f"connector {cid!r} maps {a!r} to several targets"))
        terminal = sorted({x for edge in conn.edges for x in edge if kinds[x] in endpoints_kinds})
        if len(terminal) > 1:
            add(Diagnostic("LC3", (cid, *terminal), f"connector {cid!r} touches several Init/End elements"))
        touches_root = False
        for a, b in conn.edges:
            pair_uses.setdefault((a, b), []).append(cid)
            if kinds[a] is ElementKind.END:
                add(Diagnostic("LC2", (cid, a), f"End {a!r} is the source of connector {cid!r}"))
            if kinds[b] is ElementKind.INIT:
                add(Diagnostic("LC2", (cid, b), f"Init {b!r} is the target of connector {cid!r}"))
            if a == root or b == root:
                touches_root = True
            if set(own.get(a, ())) != set(own.get(b, ())):
                add(Diagnostic("LC5", (cid, a, b), f"{a!r} and {b!r} have different parents"))
        if touches_root:
            add(Diagnostic("LC-M", (cid, root), f"connector {cid!r} touches the root Model"))

    for (a, b), cids in pair_uses.items():
        if len(cids) > 1:
            add(Diagnostic("LC4", (a, b), f"{a!r} -> {b!r} is linked {len(cids)} times ({', '.join(sorted(cids))})"))

    succ = graph.successors
    pred = _predecessors(graph)
    for c in graph.children:
        if kinds[c.parent] not in FORM_KINDS:
            continue
        f = c.parent
        inner = list(c.behaviours) + list(c.structs)
        fwd = _closure(succ, c.init) if c.init is not None else set()
        bwd = _closure(pred, c.end) if c.end is not None else set()
        need_fwd = inner + ([c.end] if c.end is not None else [])
        need_bwd = inner + ([c.init] if c.init is not None else [])
        for x in need_fwd:
            if x not in fwd:
                add(Diagnostic("LC6", (f, x), f"{x!r} is not reachable from the Init of {f!r}"))
        for x in need_bwd:
            if x not in bwd:
                add(Diagnostic("LC6", (f, x), f"{x!r} does not reach the End of {f!r}"))
    return diags


def check_wellformed(graph: ModelGraph) -> list[Diagnostic]:
    """Every rule violation in ``graph``, sorted by rule then subjects.

    An empty list means the graph is well-formed.
    """
    integrity = _integrity(graph)
    if integrity:
        return _sorted(integrity)
    return _sorted(_ownership_rules(graph) + _connector_rules(graph))


def is_wellformed(graph: ModelGraph) -> bool:
    return not check_wellformed(graph)
