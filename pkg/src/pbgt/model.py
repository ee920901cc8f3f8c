"""GUI test model: elements, ownership, connectors and the canonical JSON format."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional

FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a model document cannot be decoded."""


class UnknownElementError(KeyError):
    pass


class ElementKind(str, enum.Enum):
    INIT = "Init"
    END = "End"
    BEHAVIOUR = "Behaviour"
    GROUP = "Group"
    FORM = "Form"
    MODEL = "Model"

    def __str__(self) -> str:
        return self.value


STRUCTURAL_KINDS = frozenset({ElementKind.GROUP, ElementKind.FORM, ElementKind.MODEL})
FORM_KINDS = frozenset({ElementKind.FORM, ElementKind.MODEL})


def is_structural(kind: ElementKind) -> bool:
    return kind in STRUCTURAL_KINDS


def is_form(kind: ElementKind) -> bool:
    return kind in FORM_KINDS


class ConnectorKind(str, enum.Enum):
    SEQUENCE = "Sequence"
    DATA_PASSING = "SequenceWithDataPassing"
    MOVED_DATA = "SequenceWithMovedData"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class BehaviourInfo:
    """Which UI test pattern a behavioural element stands for, and its source widget."""

    pattern: Optional[str] = None
    widget: Optional[str] = None


@dataclass(frozen=True)
class Element:
    id: str
    kind: ElementKind
    behaviour: Optional[BehaviourInfo] = None
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind is ElementKind.BEHAVIOUR and self.behaviour is None:
            object.__setattr__(self, "behaviour", BehaviourInfo())


@dataclass(frozen=True)
class Children:
    """Everything one structural element owns. List order is declaration order."""

    parent: str
    structs: tuple[str, ...] = ()
    behaviours: tuple[str, ...] = ()
    init: Optional[str] = None
    end: Optional[str] = None


@dataclass(frozen=True)
class Connector:
    id: str
    kind: ConnectorKind
    edges: tuple[tuple[str, str], ...]

    @property
    def sources(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.edges)

    @property
    def targets(self) -> frozenset[str]:
        return frozenset(b for _, b in self.edges)


@dataclass(frozen=True)
class ModelGraph:
    """Immutable GUI test model.

    The stored tuples mirror the JSON document one to one, so ill-formed models
    (duplicate ids, dangling references) stay representable and can be
    diagnosed instead of rejected at construction.
    """

    elements: tuple[Element, ...]
    children: tuple[Children, ...]
    connectors: tuple[Connector, ...]
    root: str

    # Derived lookups. cached_property writes straight into __dict__, which a
    # frozen dataclass allows; recomputation on a race is harmless.

    @cached_property
    def by_id(self) -> dict[str, Element]:
        return {e.id: e for e in self.elements}

    @cached_property
    def children_of(self) -> dict[str, Children]:
        return {c.parent: c for c in self.children}

    @property
    def inner_structs(self) -> dict[str, tuple[str, ...]]:
        return {c.parent: c.structs for c in self.children}

    @property
    def inner_behaviour(self) -> dict[str, tuple[str, ...]]:
        return {c.parent: c.behaviours for c in self.children}

    @property
    def form_init(self) -> dict[str, str]:
        return {c.parent: c.init for c in self.children if c.init is not None}

    @property
    def form_end(self) -> dict[str, str]:
        return {c.parent: c.end for c in self.children if c.end is not None}

    @cached_property
    def owners(self) -> dict[str, tuple[str, ...]]:
        """Every owner of every element under innerStructs + innerBehaviour + init + end."""
        result: dict[str, list[str]] = {e.id: [] for e in self.elements}
        for c in self.children:
            owned = list(c.structs) + list(c.behaviours)
            if c.init is not None:
                owned.append(c.init)
            if c.end is not None:
                owned.append(c.end)
            for child in owned:
                result.setdefault(child, []).append(c.parent)
        return {k: tuple(v) for k, v in result.items()}

    @cached_property
    def successors(self) -> dict[str, frozenset[str]]:
        out: dict[str, set[str]] = {}
        for conn in self.connectors:
            for a, b in conn.edges:
                out.setdefault(a, set()).add(b)
        return {k: frozenset(v) for k, v in out.items()}

    def kind(self, element_id: str) -> ElementKind:
        try:
            return self.by_id[element_id].kind
        except KeyError:
            raise UnknownElementError(element_id) from None

    def ids_of_kind(self, *kinds: ElementKind) -> list[str]:
        return [e.id for e in self.elements if e.kind in kinds]

    def direct_children(self, parent: str) -> list[str]:
        """Children in declaration order: init, behaviours, structs, end."""
        c = self.children_of.get(parent)
        if c is None:
            return []
        out = []
        if c.init is not None:
            out.append(c.init)
        out.extend(c.behaviours)
        out.extend(c.structs)
        if c.end is not None:
            out.append(c.end)
        return out

    def all_edges(self) -> Iterable[tuple[str, str]]:
        for conn in self.connectors:
            yield from conn.edges


# --- construction helpers -------------------------------------------------


def make_graph(
    elements: Mapping[str, Any],
    children: Mapping[str, Mapping[str, Any]] | Iterable[Mapping[str, Any]],
    connectors: Iterable[Any] = (),
    root: Optional[str] = None,
) -> ModelGraph:
    """Terse builder, mostly for tests and fixtures.

    ``elements`` maps id to a kind name (or an :class:`Element`);
    ``children`` maps parent id to ``{"structs", "behaviours", "init", "end"}``;
    ``connectors`` holds ``(id, kind, [(a, b), ...])`` triples, or plain
    ``(a, b)`` pairs which become single-edge Sequence connectors.
    """
    elems = []
    for eid, spec in elements.items():
        if isinstance(spec, Element):
            elems.append(spec)
            continue
        elems.append(Element(eid, ElementKind(spec)))
    if isinstance(children, Mapping):
        entries = [dict(v, parent=k) for k, v in children.items()]
    else:
        entries = [dict(v) for v in children]
    kids = tuple(
        Children(
            parent=c["parent"],
            structs=tuple(c.get("structs", ())),
            behaviours=tuple(c.get("behaviours", ())),
            init=c.get("init"),
            end=c.get("end"),
        )
        for c in entries
    )
    conns = []
    for i, spec in enumerate(connectors, 1):
        if isinstance(spec, Connector):
            conns.append(spec)
        elif len(spec) == 2 and isinstance(spec[0], str) and isinstance(spec[1], str):
            conns.append(Connector(f"c{i}", ConnectorKind.SEQUENCE, (tuple(spec),)))
        else:
            cid, ckind, edges = spec
            conns.append(Connector(cid, ConnectorKind(ckind), tuple(tuple(e) for e in edges)))
    if root is None:
        models = [e.id for e in elems if e.kind is ElementKind.MODEL]
        if len(models) != 1:
            raise ValueError("root must be given unless exactly one Model element exists")
        root = models[0]
    return ModelGraph(tuple(elems), kids, tuple(conns), root)


# --- JSON ------------------------------------------------------------------


def graph_to_dict(graph: ModelGraph) -> dict[str, Any]:
    elements = []
    for e in graph.elements:
        d: dict[str, Any] = {"id": e.id, "kind": e.kind.value}
        if e.behaviour is not None and e.behaviour.pattern is not None:
            d["pattern"] = e.behaviour.pattern
        if e.behaviour is not None and e.behaviour.widget is not None:
            d["widget"] = e.behaviour.widget
        if e.label is not None:
            d["label"] = e.label
        elements.append(d)
    children = []
    for c in graph.children:
        d = {"parent": c.parent, "structs": list(c.structs), "behaviours": list(c.behaviours)}
        if c.init is not None:
            d["init"] = c.init
        if c.end is not None:
            d["end"] = c.end
        children.append(d)
    connectors = [
        {
            "id": conn.id,
            "kind": conn.kind.value,
            "edges": [{"from": a, "to": b} for a, b in conn.edges],
        }
        for conn in graph.connectors
    ]
    return {
        "version": FORMAT_VERSION,
        "elements": elements,
        "children": children,
        "connectors": connectors,
        "root": graph.root,
    }


def dumps_json(doc: Any) -> str:
    """Canonical text: two-space indent, keys in insertion order, trailing LF."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def dump_graph(graph: ModelGraph) -> bytes:
    return dumps_json(graph_to_dict(graph)).encode("utf-8")


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise ModelFormatError(msg)


def _check_keys(obj: Any, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    _expect(isinstance(obj, dict), f"{where}: expected an object")
    missing = required - obj.keys()
    _expect(not missing, f"{where}: missing key(s) {sorted(missing)}")
    extra = obj.keys() - required - optional
    _expect(not extra, f"{where}: unknown key(s) {sorted(extra)}")


def _str(value: Any, where: str) -> str:
    _expect(isinstance(value, str), f"{where}: expected a string, got {type(value).__name__}")
    return value


def graph_from_dict(doc: Any) -> ModelGraph:
    _check_keys(doc, "model", {"version", "elements", "children", "connectors", "root"})
    _expect(doc["version"] == FORMAT_VERSION, f"model: unsupported version {doc['version']!r}")
    for key in ("elements", "children", "connectors"):
        _expect(isinstance(doc[key], list), f"model: {key} must be an array")

    elements = []
    for i, e in enumerate(doc["elements"]):
        where = f"elements[{i}]"
        _check_keys(e, where, {"id", "kind"}, {"pattern", "widget", "label"})
        try:
            kind = ElementKind(e["kind"])
        except ValueError:
            raise ModelFormatError(f"{where}: unknown kind {e['kind']!r}") from None
        pattern = e.get("pattern")
        widget = e.get("widget")
        info = None
        if kind is ElementKind.BEHAVIOUR or pattern is not None or widget is not None:
            info = BehaviourInfo(
                None if pattern is None else _str(pattern, where + ".pattern"),
                None if widget is None else _str(widget, where + ".widget"),
            )
        label = e.get("label")
        elements.append(
            Element(_str(e["id"], where + ".id"), kind, info, None if label is None else _str(label, where))
        )

    children = []
    for i, c in enumerate(doc["children"]):
        where = f"children[{i}]"
        _check_keys(c, where, {"parent"}, {"structs", "behaviours", "init", "end"})
        for key in ("structs", "behaviours"):
            _expect(isinstance(c.get(key, []), list), f"{where}.{key} must be an array")
        children.append(
            Children(
                parent=_str(c["parent"], where + ".parent"),
                structs=tuple(_str(x, where + ".structs") for x in c.get("structs", [])),
                behaviours=tuple(_str(x, where + ".behaviours") for x in c.get("behaviours", [])),
                init=None if c.get("init") is None else _str(c["init"], where + ".init"),
                end=None if c.get("end") is None else _str(c["end"], where + ".end"),
            )
        )

    connectors = []
    for i, conn in enumerate(doc["connectors"]):
        where = f"connectors[{i}]"
        _check_keys(conn, where, {"id", "kind", "edges"})
        try:
            ckind = ConnectorKind(conn["kind"])
        except ValueError:
            raise ModelFormatError(f"{where}: unknown connector kind {conn['kind']!r}") from None
        _expect(isinstance(conn["edges"], list), f"{where}.edges must be an array")
        edges = []
        for j, edge in enumerate(conn["edges"]):
            _check_keys(edge, f"{where}.edges[{j}]", {"from", "to"})
            edges.append((_str(edge["from"], where), _str(edge["to"], where)))
        connectors.append(Connector(_str(conn["id"], where + ".id"), ckind, tuple(edges)))

    return ModelGraph(tuple(elements), tuple(children), tuple(connectors), _str(doc["root"], "root"))


def load_graph(data: bytes | str) -> ModelGraph:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    return graph_from_dict(doc)
