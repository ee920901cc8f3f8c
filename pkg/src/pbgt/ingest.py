"""Android layout XML to model graphs.

The root container becomes the Model, nested containers become Groups and
leaf views become Behaviours tagged with their widget name. Init and End are
synthesised for the Model and chained to its direct children in document
order with single-edge Sequence connectors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional
from xml.parsers import expat

from .model import Children, Connector, ConnectorKind, Element, ElementKind, BehaviourInfo, ModelGraph
from .patterns import PASSWORD_SUFFIX
from .wellformed import Diagnostic, check_wellformed

CONTAINERS = frozenset({"LinearLayout", "ConstraintLayout", "DrawerLayout", "TabLayout"})
LEAVES = frozenset({"TextView", "Button", "EditText", "ListView"})
# Markup that may appear inside a view without being a view itself.
IGNORED = frozenset({"requestFocus", "tag"})

ANDROID_ID = "android:id"
ANDROID_ORIENTATION = "android:orientation"
ANDROID_INPUT_TYPE = "android:inputType"
ANDROID_PASSWORD = "android:password"


class LayoutSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


@dataclass(frozen=True)
class WidgetKind:
    name: str
    known: bool
    container: bool

    @classmethod
    def resolve(cls, tag: str, has_children: bool) -> "WidgetKind":
        name = tag.rsplit(".", 1)[-1]
        if name in CONTAINERS:
            return cls(name, True, True)
        if name in LEAVES:
            return cls(name, True, False)
        return cls(name, False, has_children)

    def __str__(self) -> str:
        return self.name if self.known else f"Unknown({self.name})"


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int


@dataclass(frozen=True)
class LayoutNode:
    widget: WidgetKind
    id_attr: Optional[str] = None
    orientation: Optional[str] = None
    children: tuple["LayoutNode", ...] = ()
    source_span: Span = Span(1, 1, 1, 1)
    input_type: Optional[str] = None

    @property
    def is_container(self) -> bool:
        return self.widget.container

    @property
    def resource_id(self) -> Optional[str]:
        if self.id_attr is None:
            return None
        return re.sub(r"^@(\+)?(android:)?id/", "", self.id_attr)

    @property
    def is_password(self) -> bool:
        return "password" in (self.input_type or "").lower()


@dataclass(frozen=True)
class IngestOptions:
    collapse_single_child_groups: bool = True
    synthesize_connectors: bool = True


# --- parsing --------------------------------------------------------------------


@dataclass
class _Open:
    tag: str
    attrs: dict
    line: int
    column: int
    children: list = field(default_factory=list)


def parse_layout(xml: bytes | str) -> LayoutNode:
    parser = expat.ParserCreate()
    stack: list[_Open] = []
    done: list[LayoutNode] = []
    skip_depth = 0

    def where() -> tuple[int, int]:
        return parser.CurrentLineNumber, parser.CurrentColumnNumber + 1

    def start(tag: str, attrs: dict) -> None:
        nonlocal skip_depth
        if skip_depth or tag in IGNORED:
            skip_depth += 1
            return
        line, col = where()
        stack.append(_Open(tag, attrs, line, col))

    def end(tag: str) -> None:
        nonlocal skip_depth
        if skip_depth:
            skip_depth -= 1
            return
        node = stack.pop()
        widget = WidgetKind.resolve(node.tag, bool(node.children))
        line, col = where()
        if node.children and not widget.container:
            raise LayoutSyntaxError(f"{widget.name} is a leaf view and cannot hold child views", node.line, node.column)
        input_type = node.attrs.get(ANDROID_INPUT_TYPE)
        if node.attrs.get(ANDROID_PASSWORD) == "true":
            input_type = input_type or "textPassword"
        built = LayoutNode(
            widget,
            node.attrs.get(ANDROID_ID),
            node.attrs.get(ANDROID_ORIENTATION),
            tuple(node.children),
            Span(node.line, node.column, line, col),
            input_type,
        )
        if stack:
            stack[-1].children.append(built)
        else:
            done.append(built)

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(xml, True)
    except expat.ExpatError as exc:
        reason = expat.errors.messages[exc.code]
        if exc.code == expat.errors.codes[expat.errors.XML_ERROR_JUNK_AFTER_DOC_ELEMENT]:
            reason = "more than one root element"
        raise LayoutSyntaxError(reason, exc.lineno, exc.offset + 1) from None
    return done[0]


# --- mapping --------------------------------------------------------------------


def collapse(node: LayoutNode) -> LayoutNode:
    """Replace every container holding exactly one child by that child, bottom-up."""
    kids = tuple(collapse(c) for c in node.children)
    if node.is_container and len(kids) == 1:
        return kids[0]
    return LayoutNode(node.widget, node.id_attr, node.orientation, kids, node.source_span, node.input_type)


MODEL_ID = "#model"
INIT_ID = "#init"
END_ID = "#end"


class _Builder:
    def __init__(self) -> None:
        self.elements: list[Element] = []
        self.children: list[Children] = []
        self.node_of: dict[str, LayoutNode] = {}
        self.counts: dict[str, int] = {}

    def fresh_id(self, node: LayoutNode) -> str:
        rid = node.resource_id
        if rid and rid not in self.node_of:
            return rid
        self.counts[node.widget.name] = self.counts.get(node.widget.name, 0) + 1
        return f"#{node.widget.name}{self.counts[node.widget.name]}"

    def behaviour(self, node: LayoutNode) -> str:
        eid = self.fresh_id(node)
        widget = node.widget.name + (PASSWORD_SUFFIX if node.widget.name == "EditText" and node.is_password else "")
        self.elements.append(Element(eid, ElementKind.BEHAVIOUR, BehaviourInfo(widget=widget)))
        self.node_of[eid] = node
        return eid

    def container(self, node: LayoutNode, eid: str, kind: ElementKind, extra: dict) -> list[str]:
        if kind is not ElementKind.MODEL:
            self.elements.append(Element(eid, kind))
        self.node_of[eid] = node
        structs, behaviours, order = [], [], []
        slot = len(self.children)
        self.children.append(None)  # keep parents ahead of their descendants
        for child in node.children:
            if child.is_container:
                cid = self.fresh_id(child)
                self.container(child, cid, ElementKind.GROUP, {})
                structs.append(cid)
                order.append(cid)
            else:
                bid = self.behaviour(child)
                behaviours.append(bid)
                order.append(bid)
        self.children[slot] = Children(eid, tuple(structs), tuple(behaviours), extra.get("init"), extra.get("end"))
        return order


def _build(layout: LayoutNode, opts: IngestOptions) -> tuple[ModelGraph, dict[str, LayoutNode]]:
    b = _Builder()
    ends = {"init": INIT_ID, "end": END_ID}
    root = MODEL_ID
    if layout.is_container:
        b.elements.append(Element(root, ElementKind.MODEL))
        b.elements.append(Element(INIT_ID, ElementKind.INIT))
        order = b.container(layout, root, ElementKind.MODEL, ends)
    else:
        b.elements.append(Element(root, ElementKind.MODEL))
        b.elements.append(Element(INIT_ID, ElementKind.INIT))
        b.node_of[root] = layout
        leaf = b.behaviour(layout)
        b.children.append(Children(root, (), (leaf,), INIT_ID, END_ID))
        order = [leaf]
    b.elements.append(Element(END_ID, ElementKind.END))
    b.node_of[INIT_ID] = b.node_of[END_ID] = layout

    connectors = []
    if opts.synthesize_connectors:
        chain = [INIT_ID, *order, END_ID]
        for i, pair in enumerate(zip(chain, chain[1:]), 1):
            connectors.append(Connector(f"#c{i}", ConnectorKind.SEQUENCE, (pair,)))
            b.node_of[f"#c{i}"] = b.node_of[pair[1]] if pair[1] != END_ID else layout
    return ModelGraph(tuple(b.elements), tuple(b.children), tuple(connectors), root), b.node_of


def to_model(layout: LayoutNode, opts: IngestOptions = IngestOptions()) -> tuple[ModelGraph, list[Diagnostic]]:
    """Map a parsed layout to a model.

    Rule violations of the resulting graph come back as ``ING/<rule>``
    diagnostics located at the offending layout node, keeping only the
    first rule (in rule order) per node since later ones are usually its
    consequences.
    """
    if opts.collapse_single_child_groups:
        layout = collapse(layout)
    graph, node_of = _build(layout, opts)

    per_node: dict[int, tuple[LayoutNode, Diagnostic]] = {}
    for d in check_wellformed(graph):
        node = next((node_of[s] for s in d.subjects if s in node_of), layout)
        kept = per_node.get(id(node))
        if kept is None or d.sort_key() < kept[1].sort_key():
            per_node[id(node)] = (node, d)
    diags = [
        Diagnostic(f"ING/{d.rule}", d.subjects, d.message, d.severity, (n.source_span.line, n.source_span.column))
        for n, d in per_node.values()
    ]
    diags.sort(key=lambda d: (d.location, d.sort_key()))
    return graph, diags


def ingest(xml: bytes | str, opts: IngestOptions = IngestOptions()) -> tuple[ModelGraph, list[Diagnostic]]:
    return to_model(parse_layout(xml), opts)
