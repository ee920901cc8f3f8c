"""Concrete test cases from a model plus pattern configurations."""

from __future__ import annotations

import hashlib
import heapq
import json
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Optional, Union

from .model import ConnectorKind, ElementKind, ModelGraph, UnknownElementError, dump_graph, dumps_json
from .patterns import (
    Check,
    NotABehaviour,
    PatternConfig,
    PatternDefinition,
    PatternKind,
    builtin_patterns,
    validate_config,
)
from .wellformed import Diagnostic, check_wellformed

SUITE_VERSION = 1

Input = Union[str, tuple[str, ...]]


class WellFormednessRequired(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__(f"model has {len(diagnostics)} well-formedness diagnostic(s)")
        self.diagnostics = diagnostics


class LinearizationCycle(ValueError):
    def __init__(self, form: str, members: list[str]):
        super().__init__(f"connectors inside {form!r} form a cycle through {', '.join(members)}")
        self.form = form
        self.members = members


class InvalidConfig(ValueError):
    def __init__(self, cfg: PatternConfig, diagnostics: list[Diagnostic]):
        first = diagnostics[0]
        super().__init__(f"{first.rule}: {first.message}")
        self.config = cfg
        self.diagnostics = diagnostics


class DuplicateConfig(ValueError):
    pass


class SuiteFormatError(ValueError):
    pass


@dataclass(frozen=True)
class TestStep:
    __test__ = False  # not a pytest class

    action: str
    target: str
    input: Optional[Input] = None
    origin: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"action": self.action, "target": self.target}
        if self.input is not None:
            doc["input"] = self.input if isinstance(self.input, str) else list(self.input)
        if self.origin is not None:
            doc["origin"] = self.origin
        return doc


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: str
    pattern: PatternKind
    goal: str
    target: str
    precondition: str
    steps: tuple[TestStep, ...]
    checks: tuple[Check, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "pattern": self.pattern.value,
            "goal": self.goal,
            "target": self.target,
            "precondition": self.precondition,
            "steps": [s.to_dict() for s in self.steps],
            "checks": [c.to_dict() for c in self.checks],
        }


@dataclass(frozen=True)
class SkippedCase:
    """Returned instead of a case when the pattern's precondition is false."""

    target: str
    pattern: PatternKind
    goal: str
    reason: str


@dataclass(frozen=True)
class TestSuite:
    __test__ = False  # not a pytest class

    model_ref: str
    cases: tuple[TestCase, ...]
    traversal: tuple[str, ...]
    skipped: tuple[SkippedCase, ...] = field(default=(), compare=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "version": SUITE_VERSION,
            "model_ref": self.model_ref,
            "traversal": list(self.traversal),
            "cases": [c.to_dict() for c in self.cases],
        }


# --- linearization --------------------------------------------------------------


def _order_form(graph: ModelGraph, form: str) -> list[str]:
    kids = graph.direct_children(form)
    rank = {k: i for i, k in enumerate(kids)}
    succ: dict[str, set[str]] = {k: set() for k in kids}
    for a, b in graph.all_edges():
        if a in rank and b in rank:
            succ[a].add(b)
    indeg = {k: 0 for k in kids}
    for a in kids:
        for b in succ[a]:
            indeg[b] += 1
    ready = [(rank[k], k) for k in kids if indeg[k] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        _, k = heapq.heappop(ready)
        order.append(k)
        for b in succ[k]:
            indeg[b] -= 1
            if indeg[b] == 0:
                heapq.heappush(ready, (rank[b], b))
    if len(order) != len(kids):
        raise LinearizationCycle(form, sorted(k for k in kids if indeg[k] > 0))
    return order


def _expand(graph: ModelGraph, element: str, out: list[str]) -> None:
    kind = graph.kind(element)
    if kind is ElementKind.BEHAVIOUR:
        out.append(element)
    elif kind is ElementKind.GROUP:
        c = graph.children_of[element]
        for child in (*c.behaviours, *c.structs):
            _expand(graph, child, out)
    elif kind in (ElementKind.FORM, ElementKind.MODEL):
        for child in _order_form(graph, element):
            _expand(graph, child, out)


def linearize(graph: ModelGraph) -> list[str]:
    """Total order over the Behaviour elements of a well-formed model.

    Each Form's direct children are sorted topologically along connector
    edges; ties go to declaration order (init, behaviours, structs, end).
    Nested Forms are expanded in place and Groups expand to their children
    in declared order.
    """
    diags = check_wellformed(graph)
    if diags:
        raise WellFormednessRequired(diags)
    out: list[str] = []
    _expand(graph, graph.root, out)
    return out


# --- generation -----------------------------------------------------------------


def model_ref(graph: ModelGraph) -> str:
    return hashlib.sha256(dump_graph(graph)).hexdigest()


def case_id(ref: str, target: str, pattern: PatternKind, goal: str) -> str:
    key = "\x1f".join((ref, target, pattern.value, goal)).encode("utf-8")
    return hashlib.sha256(key).hexdigest()[:16]


def _definition(cfg: PatternConfig) -> PatternDefinition:
    return builtin_patterns()[cfg.pattern]


def _check_target(graph: ModelGraph, target: str) -> None:
    if target not in graph.by_id:
        raise UnknownElementError(target)
    kind = graph.kind(target)
    if kind is not ElementKind.BEHAVIOUR:
        raise NotABehaviour(f"{target!r} is a {kind.value}, not a Behaviour")


def generate_for_element(
    graph: ModelGraph,
    cfg: PatternConfig,
    *,
    ref: Optional[str] = None,
    origins: Optional[dict[str, str]] = None,
    depends_on: Iterable[str] = (),
) -> Union[TestCase, SkippedCase]:
    """Instantiate ``cfg``'s pattern on its target.

    ``origins`` maps variable names to the element their value was passed from;
    ``depends_on`` lists elements whose properties the case depends on.
    """
    definition = _definition(cfg)
    diags = validate_config(definition, cfg)
    if diags:
        raise InvalidConfig(cfg, diags)
    _check_target(graph, cfg.target)
    if not definition.precondition(graph, cfg.target):
        return SkippedCase(cfg.target, cfg.pattern, cfg.goal, f"precondition {definition.precondition_text} is false")

    origins = origins or {}
    steps = []
    for action, names in definition.instantiate(cfg.bindings):
        value: Optional[Input] = None
        origin = None
        if names:
            values = tuple(cfg.bindings[n] for n in names)
            value = values[0] if len(values) == 1 else values
            sources = sorted({origins[n] for n in names if n in origins})
            if sources:
                origin = "data-passed from " + ", ".join(sources)
        steps.append(TestStep(action.value, cfg.target, value, origin))

    precondition = definition.precondition_text
    for dep in sorted(set(depends_on)):
        precondition += f"; depends on {dep}"
    ref = model_ref(graph) if ref is None else ref
    return TestCase(
        case_id(ref, cfg.target, cfg.pattern, cfg.goal),
        cfg.pattern,
        cfg.goal,
        cfg.target,
        precondition,
        tuple(steps),
        tuple(cfg.checks),
    )


def _inherit(
    graph: ModelGraph, cfgs: list[PatternConfig]
) -> tuple[list[PatternConfig], list[dict[str, str]], list[set[str]]]:
    """Fill unbound variables across data-passing edges until nothing changes."""
    by_target: dict[str, list[int]] = {}
    for i, cfg in enumerate(cfgs):
        by_target.setdefault(cfg.target, []).append(i)
    bindings = [dict(c.bindings) for c in cfgs]
    origins: list[dict[str, str]] = [{} for _ in cfgs]
    deps: list[set[str]] = [set() for _ in cfgs]

    passing = []
    for conn in graph.connectors:
        if conn.kind is ConnectorKind.SEQUENCE:
            continue
        for a, b in conn.edges:
            passing.append((a, b, conn.kind is ConnectorKind.MOVED_DATA))
    passing.sort()

    for a, b, moved in passing:
        if moved:
            for j in by_target.get(b, ()):
                deps[j].add(a)

    changed = True
    while changed:
        changed = False
        for a, b, _ in passing:
            sources = sorted(by_target.get(a, ()), key=lambda i: (cfgs[i].pattern.value, cfgs[i].goal))
            for j in by_target.get(b, ()):
                wanted = _definition(cfgs[j]).variables.expected(bindings[j])
                for var in wanted:
                    if bindings[j].get(var):
                        continue
                    for i in sources:
                        if bindings[i].get(var):
                            bindings[j][var] = bindings[i][var]
                            origins[j][var] = a
                            changed = True
                            break
    out = [replace(c, bindings=bindings[i]) for i, c in enumerate(cfgs)]
    return out, origins, deps


def generate_suite(graph: ModelGraph, cfgs: Iterable[PatternConfig]) -> TestSuite:
    cfgs = list(cfgs)
    traversal = linearize(graph)
    seen: set[tuple[str, PatternKind, str]] = set()
    for cfg in cfgs:
        key = (cfg.target, cfg.pattern, cfg.goal)
        if key in seen:
            raise DuplicateConfig(f"more than one {cfg.pattern.value}/{cfg.goal} configuration on {cfg.target!r}")
        seen.add(key)
        _check_target(graph, cfg.target)

    filled, origins, deps = _inherit(graph, cfgs)
    ref = model_ref(graph)
    position = {e: i for i, e in enumerate(traversal)}
    cases, skipped = [], []
    for cfg, orig, dep in zip(filled, origins, deps):
        result = generate_for_element(graph, cfg, ref=ref, origins=orig, depends_on=dep)
        (skipped if isinstance(result, SkippedCase) else cases).append(result)
    cases.sort(key=lambda c: (position[c.target], c.pattern.value, c.goal))
    return TestSuite(ref, tuple(cases), tuple(traversal), tuple(skipped))


# --- serialization --------------------------------------------------------------


def serialize_suite(suite: TestSuite) -> bytes:
    return dumps_json(suite.to_dict()).encode("utf-8")


def _step_from(doc: Any) -> TestStep:
    raw = doc.get("input")
    value: Optional[Input] = None
    if isinstance(raw, list):
        value = tuple(str(v) for v in raw)
    elif raw is not None:
        value = str(raw)
    return TestStep(str(doc["action"]), str(doc["target"]), value, doc.get("origin"))


def parse_suite(data: Union[bytes, str]) -> TestSuite:
    try:
        doc = json.loads(data)
        if doc.get("version") != SUITE_VERSION:
            raise SuiteFormatError(f"unsupported suite version {doc.get('version')!r}")
        cases = tuple(
            TestCase(
                str(c["id"]),
                PatternKind(c["pattern"]),
                str(c["goal"]),
                str(c["target"]),
                str(c["precondition"]),
                tuple(_step_from(s) for s in c["steps"]),
                tuple(Check.from_dict(k) for k in c["checks"]),
            )
            for c in doc["cases"]
        )
        return TestSuite(str(doc["model_ref"]), cases, tuple(str(t) for t in doc["traversal"]))
    except SuiteFormatError:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise SuiteFormatError(f"not a test suite: {exc}") from None
