import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from gallery import minimal, with_group
from strategies import from_rep, relabel, wellformed_graphs
from pbgt.canonical import canonical_form, canonical_graph
from pbgt.model import BehaviourInfo, Connector, ConnectorKind, Element, ModelGraph


@pytest.mark.parametrize("scope", [(1, 1, 2, 0, 0, 3, 1), (1, 1, 3, 1, 0, 3, 2), (2, 2, 1, 0, 1, 3, 2)])
def test_label_classes_match_brute_force_isomorphism(scope):
    """Classes the brute-force search keeps apart get distinct labels."""
    reps = list(oracle.classes(*scope).values())
    labels = [canonical_form(from_rep(r)) for r in reps]
    assert len(set(labels)) == len(reps)


def test_group_order_is_significant():
    inner = [("c", "Sequence", [("b2", "b3")])]
    a = with_group(extra=inner)
    b = with_group(group_behaviours=("b3", "b2"), extra=inner)
    assert canonical_form(a) != canonical_form(b)


def test_behaviour_information_is_part_of_the_label():
    base = minimal()
    tagged = ModelGraph(
        tuple(Element(e.id, e.kind, BehaviourInfo("Login", "Button")) if e.id == "b1" else e for e in base.elements),
        base.children, base.connectors, base.root,
    )
    assert canonical_form(tagged) != canonical_form(base)


def test_connector_kind_is_part_of_the_label():
    base = minimal()
    conns = (Connector(base.connectors[0].id, ConnectorKind.DATA_PASSING, base.connectors[0].edges),) + base.connectors[1:]
    assert canonical_form(ModelGraph(base.elements, base.children, conns, base.root)) != canonical_form(base)


def test_free_text_labels_are_ignored():
    base = minimal()
    named = ModelGraph(tuple(Element(e.id, e.kind, e.behaviour, "anything") for e in base.elements),
                       base.children, base.connectors, base.root)
    assert canonical_form(named) == canonical_form(base)


def test_canonical_copy_ids():
    label, copy = canonical_graph(minimal())
    assert label == canonical_form(minimal())
    assert sorted(e.id for e in copy.elements) == ["B1", "E1", "I1", "M"]
    assert canonical_form(copy) == label


@settings(max_examples=200, deadline=None)
@given(wellformed_graphs(), st.integers(0, 2**32 - 1))
def test_canonical_copy_is_identical_for_isomorphic_inputs(graph, seed):
    assert canonical_graph(relabel(graph, seed)) == canonical_graph(graph)


def test_label_is_compact_ascii_json():
    label = canonical_form(minimal())
    assert label.isascii() and b" " not in label
