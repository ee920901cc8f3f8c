"""Bounded instance finding over the GUI test meta-model.

Instances are built rather than guessed: first the ownership tree of
structural elements (with a behaviour count per node), then connector edges
inside each sibling set, then a split of those edges into connectors. Every
rule that can be decided locally prunes the search at the point it becomes
decidable, so what survives is well-formed by construction; each survivor is
still run through :func:`~pbgt.wellformed.check_wellformed` as a guard, then
deduplicated by canonical label.

Results are sorted by canonical label and carry canonically relabelled
graphs, so output does not depend on search order or worker count.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Optional, Sequence

from . import kernels
from .canonical import canonical_graph
from .model import Children, Connector, ConnectorKind, Element, ElementKind, ModelGraph
from .wellformed import RULES, check_wellformed, forward_reach

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, scope: "Scope", budget: int, explored: int):
        self.scope = scope
        self.budget = budget
        self.explored = explored
        super().__init__(f"search budget of {budget} candidates exceeded for scope {scope.to_dict()}")


class UnknownPredicate(KeyError):
    pass


@dataclass(frozen=True)
class Scope:
    """Upper bounds on atom counts. The Model root is always present and never counted.

    ``max_init``/``max_end`` default to ``max_form + 1``, the only count a
    well-formed instance can use.
    """

    max_init: Optional[int] = None
    max_end: Optional[int] = None
    max_behaviour: int = 0
    max_group: int = 0
    max_form: int = 0
    max_connector: int = 0
    max_edges_per_connector: int = 2
    connector_kinds: tuple[ConnectorKind, ...] = (ConnectorKind.SEQUENCE,)

    def __post_init__(self) -> None:
        if self.max_init is None:
            object.__setattr__(self, "max_init", self.max_form + 1)
        if self.max_end is None:
            object.__setattr__(self, "max_end", self.max_form + 1)
        object.__setattr__(self, "connector_kinds", tuple(ConnectorKind(k) for k in self.connector_kinds))
        for name in ("max_init", "max_end", "max_behaviour", "max_group", "max_form",
                     "max_connector", "max_edges_per_connector"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"scope field {name} must be a non-negative integer, got {value!r}")
        if not self.connector_kinds:
            raise ValueError("scope needs at least one connector kind")

    _KEYS = ("init", "end", "behaviour", "group", "form", "connector", "edges_per_connector")

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Scope":
        unknown = set(doc) - set(cls._KEYS) - {"connector_kinds"}
        if unknown:
            raise ValueError(f"unknown scope key(s): {sorted(unknown)}")
        kwargs: dict[str, Any] = {}
        for key in cls._KEYS:
            if doc.get(key) is not None:
                kwargs["max_" + key] = doc[key]
        if "connector_kinds" in doc:
            kwargs["connector_kinds"] = tuple(doc["connector_kinds"])
        return cls(**kwargs)

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {key: getattr(self, "max_" + key) for key in self._KEYS}
        d["connector_kinds"] = [k.value for k in self.connector_kinds]
        return d

    def total_atoms(self) -> int:
        return self.max_init + self.max_end + self.max_behaviour + self.max_group + self.max_form


@dataclass(frozen=True)
class NamedPredicate:
    name: str
    description: str
    holds: Callable[[ModelGraph], bool] = field(repr=False)


def _has_kind(kind: ElementKind) -> Callable[[ModelGraph], bool]:
    def check(g: ModelGraph) -> bool:
        return any(e.kind is kind and e.id != g.root for e in g.elements)
    return check


def _init_reaches_children(g: ModelGraph) -> bool:
    for c in g.children:
        if g.kind(c.parent) not in (ElementKind.FORM, ElementKind.MODEL):
            continue
        if c.init is None:
            return False
        reach = forward_reach(g, c.init)
        if any(x not in reach for x in g.direct_children(c.parent) if x != c.init):
            return False
    return True


def _rule_holds(rule: str) -> Callable[[ModelGraph], bool]:
    def check(g: ModelGraph) -> bool:
        return all(d.rule != rule for d in check_wellformed(g))
    return check


def _pattern_present(pattern: str) -> Callable[[ModelGraph], bool]:
    def check(g: ModelGraph) -> bool:
        return any(e.behaviour is not None and e.behaviour.pattern == pattern for e in g.elements)
    return check


def _build_registry() -> dict[str, NamedPredicate]:
    from .patterns import PatternKind

    reg = [
        NamedPredicate("wellformed", "the model satisfies every well-formedness rule",
                       lambda g: not check_wellformed(g)),
        NamedPredicate("has_nested_form", "some Form other than the Model exists", _has_kind(ElementKind.FORM)),
        NamedPredicate("has_group", "some Group exists", _has_kind(ElementKind.GROUP)),
        NamedPredicate("no_nested_form", "no Form other than the Model exists",
                       lambda g: not _has_kind(ElementKind.FORM)(g)),
        NamedPredicate("no_group", "no Group exists", lambda g: not _has_kind(ElementKind.GROUP)(g)),
        NamedPredicate("init_reaches_children",
                       "every direct child of every Form is reachable from that Form's Init",
                       _init_reaches_children),
    ]
    for rule, text in RULES.items():
        if not rule.startswith("RI"):
            reg.append(NamedPredicate(rule, text, _rule_holds(rule)))
    for kind in PatternKind:
        reg.append(NamedPredicate(f"has_pattern_{kind.snake}", f"some Behaviour is tagged {kind.value}",
                                  _pattern_present(kind.value)))
    return {p.name: p for p in reg}


_REGISTRY: Optional[dict[str, NamedPredicate]] = None


def registry() -> dict[str, NamedPredicate]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _build_registry()
    return _REGISTRY


def lookup(name: str) -> NamedPredicate:
    try:
        return registry()[name]
    except KeyError:
        raise UnknownPredicate(name) from None


@dataclass(frozen=True)
class FindResult:
    status: str  # "found" or "unsat"
    witness: Optional[ModelGraph]
    explored: int
    query: str = "run"  # "run" (find an instance) or "check" (find a counterexample)

    @property
    def found(self) -> bool:
        return self.status == "found"

    @property
    def message(self) -> str:
        if self.query == "check":
            if self.found:
                return "counterexample found"
            return "valid up to scope (may be invalid on a larger scale)"
        return "instance found" if self.found else "no instance within scope"


# --- ownership skeletons ------------------------------------------------------


@dataclass(frozen=True)
class _Shape:
    """A structural tree plus behaviour counts; node 0 is the Model."""

    kinds: tuple[ElementKind, ...]
    parents: tuple[int, ...]  # parents[0] == -1
    behaviours: tuple[int, ...]


def _distributions(mins: Sequence[int], total: int) -> Iterator[tuple[int, ...]]:
    spare = total - sum(mins)
    if spare < 0:
        return
    n = len(mins)
    # stars and bars over the spare behaviours
    for cut in itertools.combinations(range(spare + n - 1), n - 1):
        prev = -1
        extra = []
        for c in cut + (spare + n - 1,):
            extra.append(c - prev - 1)
            prev = c
        yield tuple(m + x for m, x in zip(mins, extra))


def _shape_code(shape: _Shape, node: int = 0) -> tuple:
    kids = [i for i, p in enumerate(shape.parents) if p == node]
    codes = [_shape_code(shape, k) for k in kids]
    if shape.kinds[node] is not ElementKind.GROUP:
        codes.sort()
    return (shape.kinds[node].value, shape.behaviours[node], tuple(codes))


def _shapes(n_form: int, n_group: int, n_behaviour: int) -> list[_Shape]:
    k = n_form + n_group
    found: dict[tuple, _Shape] = {}
    for form_slots in itertools.combinations(range(1, k + 1), n_form):
        kinds = (ElementKind.MODEL,) + tuple(
            ElementKind.FORM if i in form_slots else ElementKind.GROUP for i in range(1, k + 1)
        )
        mins = [2 if kd is ElementKind.GROUP else 1 for kd in kinds]
        for parents in itertools.product(*(range(i) for i in range(1, k + 1))):
            for counts in _distributions(mins, n_behaviour):
                shape = _Shape(kinds, (-1,) + parents, counts)
                found.setdefault(_shape_code(shape), shape)
    return [found[c] for c in sorted(found)]


# --- per-shape search -----------------------------------------------------------


@dataclass
class _Unit:
    scope: Scope
    shape: _Shape
    pred: Optional[str]
    negate: bool
    limit: int


def _skeleton(shape: _Shape):
    """Element list, children entries and per-node sibling sets for a shape."""
    names = ["M"] + [f"S{i}" for i in range(1, len(shape.kinds))]
    elements = [Element(names[i], kd) for i, kd in enumerate(shape.kinds)]
    children = []
    siblings = []  # (member ids, init index or -1, end index or -1)
    for i, kd in enumerate(shape.kinds):
        behaviours = [f"B{i}_{j}" for j in range(shape.behaviours[i])]
        elements.extend(Element(b, ElementKind.BEHAVIOUR) for b in behaviours)
        structs = [names[j] for j, p in enumerate(shape.parents) if p == i]
        if kd is ElementKind.GROUP:
            children.append(Children(names[i], tuple(structs), tuple(behaviours)))
            siblings.append((behaviours + structs, -1, -1))
        else:
            init, end = f"I{i}", f"E{i}"
            elements.append(Element(init, ElementKind.INIT))
            elements.append(Element(end, ElementKind.END))
            children.append(Children(names[i], tuple(structs), tuple(behaviours), init, end))
            members = [init] + behaviours + structs + [end]
            siblings.append((members, 0, len(members) - 1))
    return elements, children, siblings


def _candidate_pairs(n: int, init: int, end: int) -> list[tuple[int, int]]:
    pairs = []
    for a in range(n):
        if a == end and end >= 0:
            continue
        for b in range(n):
            if a == b or (b == init and init >= 0) or (a == init and b == end and init >= 0):
                continue
            pairs.append((a, b))
    return pairs


def _edge_combinations(per_node: list[list[tuple]], budget: int) -> Iterator[tuple]:
    def rec(i: int, room: int, acc: tuple) -> Iterator[tuple]:
        if i == len(per_node):
            yield acc
            return
        for edges in per_node[i]:
            if len(edges) <= room:
                yield from rec(i + 1, room - len(edges), acc + edges)

    yield from rec(0, budget, ())


def _partitions(edges: tuple, max_blocks: int, max_size: int, terminal: frozenset) -> Iterator[list[list]]:
    blocks: list[list] = []
    srcs: list[set] = []
    tgts: list[Counter] = []  # a target may be shared by several edges
    terms: list[set] = []

    def fits(k: int, a: str, b: str) -> bool:
        if len(blocks[k]) >= max_size:
            return False
        if a in srcs[k] or a in tgts[k] or b in srcs[k]:
            return False
        return len(terms[k] | ({a, b} & terminal)) <= 1

    def rec(i: int) -> Iterator[list[list]]:
        if i == len(edges):
            yield [list(b) for b in blocks]
            return
        a, b = edges[i]
        for k in range(len(blocks)):
            if fits(k, a, b):
                blocks[k].append((a, b))
                srcs[k].add(a)
                tgts[k][b] += 1
                before = set(terms[k])
                terms[k] |= {a, b} & terminal
                yield from rec(i + 1)
                blocks[k].pop()
                srcs[k].discard(a)
                tgts[k][b] -= 1
                if not tgts[k][b]:
                    del tgts[k][b]
                terms[k] = before
        if len(blocks) < max_blocks:
            blocks.append([(a, b)])
            srcs.append({a})
            tgts.append(Counter({b: 1}))
            terms.append({a, b} & terminal)
            yield from rec(i + 1)
            blocks.pop()
            srcs.pop()
            tgts.pop()
            terms.pop()

    yield from rec(0)


def _run_unit(unit: _Unit) -> tuple[dict[bytes, ModelGraph], int, bool]:
    """Returns (label -> canonical graph, candidates examined, budget blown)."""
    scope = unit.scope
    max_total = scope.max_connector * scope.max_edges_per_connector
    elements, children, siblings = _skeleton(unit.shape)
    predicate = lookup(unit.pred).holds if unit.pred else None
    examined = 0
    found: dict[bytes, ModelGraph] = {}

    per_node: list[list[tuple]] = []
    for members, init, end in siblings:
        pairs = _candidate_pairs(len(members), init, end)
        masks, seen = kernels.edge_subsets(
            len(members), pairs, max_total, init, end, unit.limit - examined
        )
        examined += seen
        if examined > unit.limit:
            return found, examined, True
        options = []
        for mask in masks:
            options.append(tuple((members[pairs[p][0]], members[pairs[p][1]])
                                 for p in range(len(pairs)) if mask >> p & 1))
        options.sort(key=len)
        per_node.append(options)

    terminal = frozenset(e.id for e in elements if e.kind in (ElementKind.INIT, ElementKind.END))
    elements_t, children_t = tuple(elements), tuple(children)
    kinds = scope.connector_kinds
    for edges in _edge_combinations(per_node, max_total):
        for blocks in _partitions(edges, scope.max_connector, scope.max_edges_per_connector, terminal):
            for kind_choice in itertools.product(kinds, repeat=len(blocks)):
                examined += 1
                if examined > unit.limit:
                    return found, examined, True
                conns = tuple(
                    Connector(f"C{i}", kd, tuple(block))
                    for i, (block, kd) in enumerate(zip(blocks, kind_choice), 1)
                )
                graph = ModelGraph(elements_t, children_t, conns, "M")
                if predicate is not None and predicate(graph) == unit.negate:
                    continue
                diags = check_wellformed(graph)
                if diags:
                    raise RuntimeError(f"constructed an ill-formed instance: {diags[0].to_line()}")
                label, canon = canonical_graph(graph)
                found.setdefault(label, canon)
    return found, examined, False


def _units(scope: Scope, pred: Optional[str], negate: bool, budget: int) -> list[_Unit]:
    units = []
    for n_form in range(scope.max_form + 1):
        if n_form + 1 > min(scope.max_init, scope.max_end):
            break
        for n_group in range(scope.max_group + 1):
            for n_behaviour in range(scope.max_behaviour + 1):
                for shape in _shapes(n_form, n_group, n_behaviour):
                    units.append(_Unit(scope, shape, pred, negate, budget))
    return units


def _search(
    scope: Scope, pred: Optional[str] = None, negate: bool = False,
    workers: int = 1, budget: int = DEFAULT_BUDGET,
) -> tuple[list[tuple[bytes, ModelGraph]], int]:
    if pred is not None:
        lookup(pred)
    units = _units(scope, pred, negate, budget)
    merged: dict[bytes, ModelGraph] = {}
    explored = 0
    if workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_unit, units))
    else:
        results = []
        spent = 0
        for unit in units:
            unit.limit = budget - spent
            res = _run_unit(unit)
            results.append(res)
            spent += res[1]
            if res[2]:
                break
    for found, seen, blown in results:
        explored += seen
        for label, graph in found.items():
            merged.setdefault(label, graph)
    if explored > budget:
        raise BudgetExceeded(scope, budget, explored)
    return sorted(merged.items()), explored


def enumerate_instances(
    scope: Scope, limit: Optional[int] = None, *, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> list[ModelGraph]:
    """All well-formed instances within ``scope``, one per isomorphism class, in canonical order."""
    items, _ = _search(scope, workers=workers, budget=budget)
    graphs = [g for _, g in items]
    return graphs if limit is None else graphs[:limit]


def enumerate_labelled(
    scope: Scope, *, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> tuple[list[tuple[bytes, ModelGraph]], int]:
    """Like :func:`enumerate_instances` but keeps labels and the explored count."""
    return _search(scope, workers=workers, budget=budget)


def find_instance(
    scope: Scope, pred: str | NamedPredicate, *, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> FindResult:
    """Canonically least well-formed instance satisfying ``pred``."""
    name = pred.name if isinstance(pred, NamedPredicate) else pred
    items, explored = _search(scope, name, False, workers, budget)
    if not items:
        return FindResult("unsat", None, explored, "run")
    return FindResult("found", items[0][1], explored, "run")


def check_assertion(
    scope: Scope, assertion: str | NamedPredicate, *, workers: int = 1, budget: int = DEFAULT_BUDGET
) -> FindResult:
    """Canonically least well-formed instance violating ``assertion``, if any."""
    name = assertion.name if isinstance(assertion, NamedPredicate) else assertion
    items, explored = _search(scope, name, True, workers, budget)
    if not items:
        return FindResult("unsat", None, explored, "check")
    return FindResult("found", items[0][1], explored, "check")
