import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gallery import with_group
from pbgt.model import BehaviourInfo, Element, ElementKind, ModelGraph, UnknownElementError, make_graph
from pbgt.patterns import (
    Action,
    Check,
    ConfigFormatError,
    Goal,
    NotABehaviour,
    PatternConfig,
    PatternKind,
    applicable_patterns,
    builtin_patterns,
    catalog_json,
    pattern_of_goal,
    validate_config,
    widget_base,
)

DEFS = builtin_patterns()


def test_catalog_has_every_kind_once():
    assert list(DEFS) == list(PatternKind)
    assert [d["kind"] for d in catalog_json()] == [k.value for k in PatternKind]


def test_catalog_is_plain_json():
    assert json.loads(json.dumps(catalog_json())) == catalog_json()


def test_each_goal_belongs_to_one_pattern():
    owners = [k for d in DEFS.values() for g in d.goals for k in [d.kind]]
    assert len(owners) == len(Goal)
    for d in DEFS.values():
        for g in d.goals:
            assert pattern_of_goal(g) is d.kind


def test_check_tags_unique_within_a_pattern():
    for d in DEFS.values():
        tags = [c.tag for c in d.checks]
        assert len(tags) == len(set(tags)), d.kind


def test_only_change_to_page_is_shared():
    seen = {}
    for d in DEFS.values():
        for c in d.checks:
            seen.setdefault(c.tag, []).append(d.kind)
    assert {t for t, ks in seen.items() if len(ks) > 1} == {"ChangeToPage"}


def test_input_actions():
    assert Action.PROVIDE_INPUT.takes_input and Action.SELECT_MASTER.takes_input
    assert not Action.PRESS.takes_input


def test_instantiate_indexed_and_pairs():
    find = DEFS[PatternKind.FIND].instantiate({"v1": "a", "v2": "b"})
    assert find == [(Action.PROVIDE, ("v1",)), (Action.PROVIDE, ("v2",))]
    sort = DEFS[PatternKind.SORT].instantiate({"v1": "a", "c1": "asc"})
    assert sort == [(Action.PROVIDE, ("v1", "c1"))]
    login = DEFS[PatternKind.LOGIN].instantiate({"username": "u", "password": "p"})
    assert [a for a, _ in login] == [Action.PROVIDE_USERNAME, Action.PROVIDE_PASSWORD, Action.PRESS_SUBMIT]


def valid_config(kind: PatternKind, n: int = 2) -> PatternConfig:
    d = DEFS[kind]
    names = d.variables.expected({f"v{i}": "" for i in range(1, n + 1)})
    checks = tuple(Check(c.tag, tuple("p" for _ in c.params)) for c in d.checks)
    return PatternConfig(kind, d.goals[0].value, "b", {k: "x" for k in names}, checks)


@pytest.mark.parametrize("kind", list(PatternKind))
def test_complete_configs_validate(kind):
    assert validate_config(DEFS[kind], valid_config(kind)) == []


@pytest.mark.parametrize("kind", list(PatternKind))
@given(st.sampled_from(list(Goal)))
def test_goal_rule(kind, goal):
    cfg = valid_config(kind)
    cfg = PatternConfig(cfg.pattern, goal.value, cfg.target, cfg.bindings, cfg.checks)
    rules = [d.rule for d in validate_config(DEFS[kind], cfg)]
    assert rules == ([] if pattern_of_goal(goal) is kind else ["PC1"])


def rules_of(cfg):
    return [d.rule for d in validate_config(DEFS[cfg.pattern], cfg)]


def test_binding_rules():
    login = DEFS[PatternKind.LOGIN]
    base = valid_config(PatternKind.LOGIN)
    missing = PatternConfig(base.pattern, base.goal, "b", {"username": "u"}, base.checks)
    assert [d.message for d in validate_config(login, missing)] == ["Login: variable 'password' is not bound"]
    empty = PatternConfig(base.pattern, base.goal, "b", {"username": "u", "password": ""}, base.checks)
    assert rules_of(empty) == ["PC2"]
    extra = PatternConfig(base.pattern, base.goal, "b", dict(base.bindings, colour="red"), base.checks)
    assert rules_of(extra) == ["PC2"]


def test_check_rules():
    base = valid_config(PatternKind.CALL)
    illegal = PatternConfig(base.pattern, base.goal, "b", {}, (Check("SamePage"),))
    assert rules_of(illegal) == ["PC3"]
    arity = PatternConfig(base.pattern, base.goal, "b", {}, (Check("ChangeToPage"),))
    assert rules_of(arity) == ["PC4"]
    blank = PatternConfig(base.pattern, base.goal, "b", {}, (Check("ChangeToPage", ("",)),))
    assert rules_of(blank) == ["PC4"]
    none = PatternConfig(base.pattern, base.goal, "b", {}, ())
    assert rules_of(none) == ["PC5"]


def test_validate_needs_matching_definition():
    with pytest.raises(ValueError):
        validate_config(DEFS[PatternKind.CALL], valid_config(PatternKind.SORT))


def test_config_round_trip():
    cfg = valid_config(PatternKind.SORT)
    assert PatternConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


@pytest.mark.parametrize("doc", [
    [],
    {"pattern": "Call", "goal": "CLAS"},
    {"pattern": "Call", "goal": "CLAS", "target": "b", "colour": 1},
    {"pattern": "Jump", "goal": "CLAS", "target": "b"},
    {"pattern": "Call", "goal": "CLAS", "target": "b", "bindings": []},
    {"pattern": "Call", "goal": "CLAS", "target": "b", "checks": [{"params": []}]},
    {"pattern": "Call", "goal": "CLAS", "target": "b", "checks": {"tag": "PopupMessage"}},
    {"pattern": "Call", "goal": "CLAS", "target": "b", "checks": [{"tag": "ChangeToPage", "params": "home"}]},
])
def test_config_format_errors(doc):
    with pytest.raises(ConfigFormatError):
        PatternConfig.from_dict(doc)


# --- applicability ------------------------------------------------------------------


def screen(widgets, group=()):
    """A Model holding one Behaviour per widget; ``group`` lists those inside a Group."""
    top = [f"w{i}" for i in range(len(widgets)) if i not in group]
    inner = [f"w{i}" for i in group]
    elements = {"m": "Model", "i": "Init", "e": "End"}
    for i, w in enumerate(widgets):
        elements[f"w{i}"] = Element(f"w{i}", ElementKind.BEHAVIOUR, BehaviourInfo(widget=w))
    children = {"m": {"behaviours": top, "init": "i", "end": "e"}}
    chain = ["i", *top]
    if inner:
        elements["g"] = "Group"
        children["m"]["structs"] = ["g"]
        children["g"] = {"behaviours": inner}
        chain.append("g")
    chain.append("e")
    return make_graph(elements, children, list(zip(chain, chain[1:])))


SCREEN = {PatternKind.ROTATION, PatternKind.RESOURCE_DEPENDENCY}


@pytest.mark.parametrize("widget, extra", [
    ("TextView", set()),
    ("EditText", {PatternKind.INPUT, PatternKind.FIND}),
    ("Button", {PatternKind.CALL}),
    ("ListView", {PatternKind.SORT, PatternKind.MASTER_DETAIL, PatternKind.FIND}),
    (None, set()),
])
def test_applicability_by_widget(widget, extra):
    assert applicable_patterns(screen([widget]), "w0") == SCREEN | extra


def test_login_needs_password_and_button_in_one_group():
    g = screen(["TextView", "EditText", "EditText:password", "Button"], group=(1, 2, 3))
    assert PatternKind.LOGIN in applicable_patterns(g, "w3")
    assert PatternKind.LOGIN in applicable_patterns(g, "w2")
    assert PatternKind.LOGIN not in applicable_patterns(g, "w0")
    apart = screen(["EditText:password", "Button", "TextView"], group=(0, 2))
    assert PatternKind.LOGIN not in applicable_patterns(apart, "w1")


def test_explicit_pattern_wins():
    g = with_group()
    tagged = ModelGraph(
        tuple(Element(e.id, e.kind, BehaviourInfo(pattern="Sort", widget="Button")) if e.id == "b1" else e
              for e in g.elements),
        g.children, g.connectors, g.root,
    )
    assert applicable_patterns(tagged, "b1") == {PatternKind.SORT}


def test_applicability_errors():
    g = screen(["Button"])
    with pytest.raises(NotABehaviour):
        applicable_patterns(g, "m")
    with pytest.raises(UnknownElementError):
        applicable_patterns(g, "zz")


def test_widget_base():
    assert widget_base("EditText:password") == "EditText"
    assert widget_base(None) == ""
