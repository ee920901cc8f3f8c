"""The ten builtin UI test patterns and validation of user configurations.

A pattern is a record of goals, input variables, an action template, the
checks a tester may pick from, and a precondition. A configuration picks
one goal, binds the variables, lists the expected checks and names the
behavioural element it applies to.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

from .model import ElementKind, ModelGraph, UnknownElementError
from .wellformed import Diagnostic


class PatternKind(str, enum.Enum):
    SIDE_DRAWER = "SideDrawer"
    ROTATION = "Rotation"
    RESOURCE_DEPENDENCY = "ResourceDependency"
    TAB_SCROLL = "TabScroll"
    INPUT = "Input"
    LOGIN = "Login"
    MASTER_DETAIL = "MasterDetail"
    FIND = "Find"
    SORT = "Sort"
    CALL = "Call"

    def __str__(self) -> str:
        return self.value

    @property
    def snake(self) -> str:
        return self.name.lower()


class Goal(str, enum.Enum):
    SIDEDRAWER = "SIDEDRAWER"
    ROTATIONISPOSSIBLE = "ROTATIONISPOSSIBLE"
    NOTCRASH = "NOTCRASH"
    PRESENCE = "PRESENCE"
    INPVD = "INPVD"
    INPID = "INPID"
    LGVAL = "LGVAL"
    LGINV = "LGINV"
    MD = "MD"
    FNDVF = "FNDVF"
    FNDNF = "FNDNF"
    SRTASC = "SRTASC"
    SRTDESC = "SRTDESC"
    CLAS = "CLAS"
    CLAF = "CLAF"

    def __str__(self) -> str:
        return self.value


GOAL_TEXT = {
    Goal.SIDEDRAWER: "side drawer exists",
    Goal.ROTATIONISPOSSIBLE: "rotation is possible",
    Goal.NOTCRASH: "resource in use",
    Goal.PRESENCE: "tabs are present",
    Goal.INPVD: "valid data",
    Goal.INPID: "invalid data",
    Goal.LGVAL: "valid login",
    Goal.LGINV: "invalid login",
    Goal.MD: "change master",
    Goal.FNDVF: "value found",
    Goal.FNDNF: "value not found",
    Goal.SRTASC: "ascending",
    Goal.SRTDESC: "descending",
    Goal.CLAS: "action invoked, succeeds",
    Goal.CLAF: "action invoked, fails",
}


class Action(str, enum.Enum):
    READ_SCREEN = "ReadScreen"
    OPEN_SIDE_DRAWER = "OpenSideDrawer"
    ROTATE_SCREEN = "RotateScreen"
    SCROLL_SCREEN = "ScrollScreen"
    READ_RESOURCE_STATUS = "ReadResourceStatus"
    TURN_RESOURCE_OFF = "TurnResourceOff"
    PROVIDE_INPUT = "ProvideInput"
    PROVIDE_USERNAME = "ProvideUsername"
    PROVIDE_PASSWORD = "ProvidePassword"
    PRESS_SUBMIT = "PressSubmit"
    SELECT_MASTER = "SelectMaster"
    PROVIDE = "Provide"
    PRESS = "Press"

    def __str__(self) -> str:
        return self.value

    @property
    def takes_input(self) -> bool:
        return self.value.startswith(("Provide", "Select"))


@dataclass(frozen=True)
class ActionTemplate:
    """One action slot. ``payload`` names variables; ``{i}`` is the repeat index."""

    action: Action
    payload: tuple[str, ...] = ()
    repeat: bool = False


@dataclass(frozen=True)
class CheckSpec:
    """A check a pattern allows, with its parameter names."""

    tag: str
    params: tuple[str, ...] = ()
    text: str = ""


@dataclass(frozen=True)
class Check:
    """A configured check: tag plus concrete parameter values."""

    tag: str
    params: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {"tag": self.tag, "params": list(self.params)}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Check":
        params = doc.get("params", [])
        if not isinstance(params, list):
            raise TypeError("check params must be an array")
        return cls(str(doc["tag"]), tuple(str(p) for p in params))


@dataclass(frozen=True)
class VariableSchema:
    """``fixed`` lists its names; ``indexed`` is v1..vN and ``pairs`` is (v1, c1)..(vN, cN),
    N being chosen by the tester at configuration time."""

    shape: str
    names: tuple[str, ...] = ()

    def arity(self, bindings: Mapping[str, str]) -> int:
        if self.shape == "fixed":
            return 1
        return sum(1 for k in bindings if re.fullmatch(r"v[1-9][0-9]*", k))

    def expected(self, bindings: Mapping[str, str]) -> list[str]:
        if self.shape == "fixed":
            return list(self.names)
        n = self.arity(bindings)
        if self.shape == "indexed":
            return [f"v{i}" for i in range(1, n + 1)]
        return [name for i in range(1, n + 1) for name in (f"v{i}", f"c{i}")]

    def to_dict(self) -> dict[str, Any]:
        if self.shape == "fixed":
            return {"shape": "fixed", "names": list(self.names)}
        if self.shape == "indexed":
            return {"shape": "indexed", "names": ["v{i}"]}
        return {"shape": "pairs", "names": ["v{i}", "c{i}"]}


def always(graph: ModelGraph, target: str) -> bool:
    return True


@dataclass(frozen=True)
class PatternDefinition:
    kind: PatternKind
    goals: tuple[Goal, ...]
    variables: VariableSchema
    actions: tuple[ActionTemplate, ...]
    checks: tuple[CheckSpec, ...]
    precondition: Callable[[ModelGraph, str], bool] = field(default=always, compare=False)
    precondition_text: str = "true"

    def check_spec(self, tag: str) -> Optional[CheckSpec]:
        for spec in self.checks:
            if spec.tag == tag:
                return spec
        return None

    def instantiate(self, bindings: Mapping[str, str]) -> list[tuple[Action, tuple[str, ...]]]:
        """Action template with variable names resolved to values, in template order."""
        steps = []
        n = self.variables.arity(bindings)
        for slot in self.actions:
            for i in range(1, n + 1) if slot.repeat else [None]:
                names = tuple(p.format(i=i) for p in slot.payload)
                steps.append((slot.action, names))
        return steps

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "goals": [{"token": g.value, "text": GOAL_TEXT[g]} for g in self.goals],
            "variables": self.variables.to_dict(),
            "actions": [
                {"action": a.action.value, "payload": list(a.payload), "repeat": a.repeat}
                for a in self.actions
            ],
            "checks": [{"tag": c.tag, "params": list(c.params), "text": c.text} for c in self.checks],
            "precondition": self.precondition_text,
        }


def _fixed(*names: str) -> VariableSchema:
    return VariableSchema("fixed", names)


A = ActionTemplate
C = CheckSpec

_BUILTIN = (
    PatternDefinition(
        PatternKind.SIDE_DRAWER,
        (Goal.SIDEDRAWER,),
        _fixed(),
        (A(Action.READ_SCREEN), A(Action.OPEN_SIDE_DRAWER), A(Action.READ_SCREEN)),
        (C("SideDrawerHiddenExists", (), "side drawer exists and is hidden"),),
    ),
    PatternDefinition(
        PatternKind.ROTATION,
        (Goal.ROTATIONISPOSSIBLE,),
        _fixed(),
        (A(Action.READ_SCREEN), A(Action.ROTATE_SCREEN), A(Action.READ_SCREEN), A(Action.SCROLL_SCREEN)),
        (C("RotationPossible", (), "it is possible to rotate the screen"),),
    ),
    PatternDefinition(
        PatternKind.RESOURCE_DEPENDENCY,
        (Goal.NOTCRASH,),
        _fixed("resource", "resource_name"),
        (A(Action.READ_RESOURCE_STATUS), A(Action.TURN_RESOURCE_OFF), A(Action.READ_SCREEN)),
        (C("ResourceInUse", (), "resource is being used by the app"),),
    ),
    PatternDefinition(
        PatternKind.TAB_SCROLL,
        (Goal.PRESENCE,),
        _fixed(),
        (A(Action.READ_SCREEN),),
        (C("TabsPresent", (), "tabs present"),),
    ),
    PatternDefinition(
        PatternKind.INPUT,
        (Goal.INPVD, Goal.INPID),
        _fixed("input"),
        (A(Action.PROVIDE_INPUT, ("input",)),),
        (
            C("MessageBox", (), "message box"),
            C("Label", (), "label"),
            C("ErrorProvider", (), "error provider"),
        ),
    ),
    PatternDefinition(
        PatternKind.LOGIN,
        (Goal.LGVAL, Goal.LGINV),
        _fixed("username", "password"),
        (
            A(Action.PROVIDE_USERNAME, ("username",)),
            A(Action.PROVIDE_PASSWORD, ("password",)),
            A(Action.PRESS_SUBMIT),
        ),
        (
            C("ChangeToPage", ("X",), "change to page X"),
            C("PopupError", ("Y",), "pop-up error Y"),
            C("SamePage", (), "same page"),
            C("LabelK", ("K",), "label K"),
        ),
    ),
    PatternDefinition(
        PatternKind.MASTER_DETAIL,
        (Goal.MD,),
        _fixed("master", "detail"),
        (A(Action.SELECT_MASTER, ("master",)),),
        (
            C("DetailHasValue", ("X",), "detail has value X"),
            C("DetailNotValue", ("X",), "detail does not have value X"),
            C("DetailEmpty", (), "detail is empty"),
        ),
    ),
    PatternDefinition(
        PatternKind.FIND,
        (Goal.FNDVF, Goal.FNDNF),
        VariableSchema("indexed"),
        (A(Action.PROVIDE, ("v{i}",), repeat=True),),
        (
            C("ResultEmpty", (), "result is an empty set"),
            C("ResultHasCount", ("X",), "result has X elements"),
            C("ResultLacksElement", ("X",), "results do not have element X"),
            C("ResultElementAtLine", ("X", "Y"), "result has element X in line Y"),
            C("ResultMoreThan", ("X",), "results have more than X elements"),
            C("ResultLessThan", ("X",), "results have less than X elements"),
        ),
    ),
    PatternDefinition(
        PatternKind.SORT,
        (Goal.SRTASC, Goal.SRTDESC),
        VariableSchema("pairs"),
        (A(Action.PROVIDE, ("v{i}", "c{i}"), repeat=True),),
        (
            C("ElementAtPositionHasValue", ("X", "Y", "Z"), "element from field X in position Y has value Z"),
            C("SortedByCriteria", (), "elements with the given criteria are sorted"),
        ),
    ),
    PatternDefinition(
        PatternKind.CALL,
        (Goal.CLAS, Goal.CLAF),
        _fixed(),
        (A(Action.PRESS),),
        (
            C("PopupMessage", (), "pop-up message"),
            C("StayInSamePage", (), "stay in the same page"),
            C("ChangeToPage", ("X",), "change to page X"),
        ),
    ),
)

del A, C


def builtin_patterns() -> dict[PatternKind, PatternDefinition]:
    return {d.kind: d for d in _BUILTIN}


def catalog_json() -> list[dict[str, Any]]:
    return [d.to_dict() for d in _BUILTIN]


def pattern_of_goal(goal: Goal) -> PatternKind:
    for d in _BUILTIN:
        if goal in d.goals:
            return d.kind
    raise KeyError(goal)


# --- configurations -------------------------------------------------------------


class ConfigFormatError(ValueError):
    pass


@dataclass(frozen=True)
class PatternConfig:
    pattern: PatternKind
    goal: str
    target: str
    bindings: Mapping[str, str] = field(default_factory=dict)
    checks: tuple[Check, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "pattern": self.pattern.value,
            "goal": self.goal,
            "target": self.target,
            "bindings": dict(self.bindings),
            "checks": [c.to_dict() for c in self.checks],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "PatternConfig":
        if not isinstance(doc, Mapping):
            raise ConfigFormatError("a pattern configuration must be a JSON object")
        missing = {"pattern", "goal", "target"} - doc.keys()
        if missing:
            raise ConfigFormatError(f"configuration lacks {sorted(missing)}")
        extra = doc.keys() - {"pattern", "goal", "target", "bindings", "checks"}
        if extra:
            raise ConfigFormatError(f"configuration has unknown key(s) {sorted(extra)}")
        try:
            pattern = PatternKind(doc["pattern"])
        except ValueError:
            raise ConfigFormatError(f"unknown pattern {doc['pattern']!r}") from None
        bindings = doc.get("bindings")
        bindings = {} if bindings is None else bindings
        if not isinstance(bindings, Mapping):
            raise ConfigFormatError("bindings must be an object")
        checks = doc.get("checks")
        checks = [] if checks is None else checks
        if not isinstance(checks, list):
            raise ConfigFormatError("checks must be an array")
        try:
            parsed = tuple(Check.from_dict(c) for c in checks)
        except (KeyError, TypeError, AttributeError):
            raise ConfigFormatError("each check must be an object with a tag and a params array") from None
        return cls(pattern, str(doc["goal"]), str(doc["target"]), dict(bindings), parsed)


CONFIG_RULES = {
    "PC1": "the goal belongs to the pattern",
    "PC2": "bindings match the pattern's variables",
    "PC3": "expected checks are legal for the pattern",
    "PC4": "check parameters are present and non-empty",
    "PC5": "at least one check is expected",
}


def validate_config(definition: PatternDefinition, cfg: PatternConfig) -> list[Diagnostic]:
    if cfg.pattern is not definition.kind:
        raise ValueError(f"configuration is for {cfg.pattern.value}, definition is {definition.kind.value}")
    diags: list[Diagnostic] = []
    subj = (cfg.target,)
    name = definition.kind.value

    if cfg.goal not in {g.value for g in definition.goals}:
        legal = ", ".join(g.value for g in definition.goals)
        diags.append(Diagnostic("PC1", subj, f"{name}: goal {cfg.goal!r} is not one of {legal}"))

    expected = definition.variables.expected(cfg.bindings)
    for var in expected:
        if var not in cfg.bindings:
            diags.append(Diagnostic("PC2", subj, f"{name}: variable {var!r} is not bound"))
        elif not isinstance(cfg.bindings[var], str) or not cfg.bindings[var]:
            diags.append(Diagnostic("PC2", subj, f"{name}: variable {var!r} needs a non-empty text value"))
    for var in sorted(set(cfg.bindings) - set(expected)):
        diags.append(Diagnostic("PC2", subj, f"{name}: unexpected variable {var!r}"))

    if not cfg.checks:
        diags.append(Diagnostic("PC5", subj, f"{name}: no expected checks"))
    for check in cfg.checks:
        spec = definition.check_spec(check.tag)
        if spec is None:
            diags.append(Diagnostic("PC3", subj, f"{name}: check {check.tag!r} is not allowed"))
            continue
        if len(check.params) != len(spec.params):
            diags.append(
                Diagnostic("PC4", subj, f"{name}: check {check.tag} takes {len(spec.params)} parameter(s), got {len(check.params)}")
            )
        elif any(not p for p in check.params):
            diags.append(Diagnostic("PC4", subj, f"{name}: check {check.tag} has an empty parameter"))
    return diags


# --- applicability --------------------------------------------------------------

_SCREEN_LEVEL = frozenset({PatternKind.ROTATION, PatternKind.RESOURCE_DEPENDENCY})
_BY_WIDGET = {
    "EditText": {PatternKind.INPUT, PatternKind.FIND},
    "Button": {PatternKind.CALL},
    "ListView": {PatternKind.SORT, PatternKind.MASTER_DETAIL, PatternKind.FIND},
    "RecyclerView": {PatternKind.SORT, PatternKind.MASTER_DETAIL, PatternKind.FIND},
    "TabHost": {PatternKind.TAB_SCROLL},
    "TabLayout": {PatternKind.TAB_SCROLL},
    "DrawerLayout": {PatternKind.SIDE_DRAWER},
}
PASSWORD_SUFFIX = ":password"


def widget_base(widget: Optional[str]) -> str:
    return (widget or "").split(":", 1)[0]


def _login_group(graph: ModelGraph, element: str) -> bool:
    """A password field and a button sit in the same Group as ``element``."""
    owner = graph.owners.get(element, ())
    if len(owner) != 1 or graph.kind(owner[0]) is not ElementKind.GROUP:
        return False
    widgets = [graph.by_id[b].behaviour.widget or "" for b in graph.children_of[owner[0]].behaviours]
    return any(w == "EditText" + PASSWORD_SUFFIX for w in widgets) and any(widget_base(w) == "Button" for w in widgets)


class NotABehaviour(ValueError):
    pass


def applicable_patterns(graph: ModelGraph, element: str) -> frozenset[PatternKind]:
    if element not in graph.by_id:
        raise UnknownElementError(element)
    e = graph.by_id[element]
    if e.kind is not ElementKind.BEHAVIOUR:
        raise NotABehaviour(f"{element!r} is a {e.kind.value}, not a Behaviour")
    info = e.behaviour
    if info is not None and info.pattern is not None:
        return frozenset({PatternKind(info.pattern)})
    base = widget_base(info.widget if info else None)
    result = set(_SCREEN_LEVEL) | _BY_WIDGET.get(base, set())
    if base in ("EditText", "Button") and _login_group(graph, element):
        result.add(PatternKind.LOGIN)
    return frozenset(result)
