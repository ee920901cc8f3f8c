"""End-to-end acceptance checks, one test (or a few) per criterion.

The terminal summary prints a PASS/FAIL line per criterion.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import oracle
from gallery import GALLERY
from strategies import random_graphs, relabel, wellformed_graphs
from pbgt import (
    IngestOptions,
    Scope,
    canonical_form,
    check_assertion,
    check_wellformed,
    dump_graph,
    enumerate_instances,
    forward_reach,
    linearize,
    load_graph,
    make_graph,
    parse_layout,
    to_model,
)
from pbgt.finder import enumerate_labelled
from pbgt.model import ElementKind
from pbgt.patterns import PatternConfig, catalog_json
from pbgt.testgen import generate_suite, serialize_suite

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"

# (init, end, behaviour, group, form, connector, edges per connector); every row has <= 6 atoms besides
# the Model and at most 3 connectors
GRID = [
    (1, 1, 1, 0, 0, 2, 1),
    (1, 1, 2, 0, 0, 3, 1),
    (1, 1, 3, 0, 0, 3, 1),
    (1, 1, 4, 0, 0, 3, 1),
    (1, 1, 2, 1, 0, 3, 1),
    (1, 1, 3, 1, 0, 3, 1),
    (2, 2, 1, 0, 1, 3, 2),
    (2, 1, 2, 0, 0, 3, 1),
    (1, 1, 2, 0, 0, 2, 2),
    (1, 1, 2, 0, 0, 3, 2),
    (1, 1, 3, 0, 0, 3, 2),
    (1, 1, 3, 1, 0, 3, 2),
    (1, 1, 4, 0, 0, 3, 2),
    (1, 1, 3, 0, 0, 3, 3),
    (1, 1, 3, 1, 0, 3, 3),
]
TWO_KINDS = ("Sequence", "SequenceWithDataPassing")


def grid_scope(row, kinds=("Sequence",)) -> Scope:
    i, e, b, g, f, c, k = row
    return Scope(i, e, b, g, f, c, k, kinds)


def hand_minimal():
    return make_graph(
        {"m": "Model", "i": "Init", "b": "Behaviour", "e": "End"},
        {"m": {"behaviours": ["b"], "init": "i", "end": "e"}},
        [("i", "b"), ("b", "e")],
    )


def timed(fn, *args, **kwargs):
    start = time.perf_counter()
    result = fn(*args, **kwargs)
    return result, time.perf_counter() - start


# --- criterion runners, returning bytes so criterion 9 can compare runs ---------------


def run_minimal_forcing() -> bytes:
    found = enumerate_instances(Scope(max_init=1, max_end=1, max_behaviour=1, max_connector=2,
                                      max_edges_per_connector=1))
    assert len(found) == 1
    assert canonical_form(found[0]) == canonical_form(hand_minimal())
    return dump_graph(found[0])


def run_oracle_grid(workers: int = 1) -> bytes:
    out = []
    for row in GRID + [(1, 1, 2, 0, 0, 3, 1, TWO_KINDS)]:
        kinds = row[7] if len(row) > 7 else ("Sequence",)
        items, _ = enumerate_labelled(grid_scope(row[:7], kinds), workers=workers)
        expected = oracle.count_classes(*row[:7], kinds=kinds)
        assert len(items) == expected, f"scope {row}: finder {len(items)} vs oracle {expected}"
        out.append(b"".join(label + b"\n" + dump_graph(g) for label, g in items))
    return b"\x00".join(out)


def run_assertion() -> bytes:
    cx = check_assertion(Scope(max_form=1, max_behaviour=2, max_connector=4), "no_nested_form")
    assert cx.found
    assert check_wellformed(cx.witness) == []
    assert any(e.kind is ElementKind.FORM for e in cx.witness.elements)
    holds = check_assertion(Scope(max_form=0, max_behaviour=2, max_connector=4), "no_nested_form")
    assert not holds.found
    assert "valid up to scope" in holds.message
    return dump_graph(cx.witness) + holds.message.encode()


def run_catalog() -> bytes:
    golden = json.loads((GOLDEN / "patterns.json").read_text())
    assert catalog_json() == golden
    return json.dumps(catalog_json()).encode()


def run_generation() -> bytes:
    model = load_graph((GOLDEN / "hello_layout_model.json").read_bytes())
    out = []
    for name in ("login", "sidedrawer", "call", "find3"):
        cfg = PatternConfig.from_dict(json.loads((FIXTURES / "configs" / f"{name}.json").read_text()))
        data = serialize_suite(generate_suite(model, [cfg]))
        assert data == (GOLDEN / f"suite_{name}.json").read_bytes(), name
        out.append(data)
    return b"".join(out)


def run_ingestion() -> bytes:
    graph, diags = to_model(parse_layout((FIXTURES / "hello_layout.xml").read_bytes()))
    assert diags == []
    assert check_wellformed(graph) == []
    order = linearize(graph)
    assert [graph.by_id[b].behaviour.widget for b in order] == ["TextView", "Button"]
    assert dump_graph(graph) == (GOLDEN / "hello_layout_model.json").read_bytes()

    empty, empty_diags = to_model(parse_layout((FIXTURES / "empty_container.xml").read_bytes()))
    assert [d.rule for d in empty_diags] == ["ING/F4"]

    single, single_diags = to_model(parse_layout((FIXTURES / "single_child.xml").read_bytes()))
    assert single_diags == []
    root = single.children_of[single.root]
    assert len(root.behaviours) == 1 and root.structs == ()
    assert single.by_id[root.behaviours[0]].behaviour.widget == "TextView"
    b = root.behaviours[0]
    assert sorted(single.all_edges()) == sorted([(root.init, b), (b, root.end)])

    strict, strict_diags = to_model(parse_layout((FIXTURES / "nested_single.xml").read_bytes()),
                                    IngestOptions(collapse_single_child_groups=False))
    assert [d.rule for d in strict_diags] == ["ING/F5"]
    return dump_graph(graph) + dump_graph(empty) + dump_graph(single) + dump_graph(strict)


# --- criteria -----------------------------------------------------------------------


@pytest.mark.criterion(1, "two-level model is well-formed")
def test_c1_two_level_wellformed():
    graph, elapsed = timed(lambda: check_wellformed(load_graph((FIXTURES / "two_level.json").read_bytes())))
    assert graph == []
    assert elapsed < 1.0


@pytest.mark.criterion(2, "rule gallery yields exact diagnostic sets")
def test_c2_rule_gallery():
    start = time.perf_counter()
    covered = set()
    assert len(GALLERY) >= 13
    for name, (build, expected) in GALLERY.items():
        got = {(d.rule, d.subjects) for d in check_wellformed(build())}
        assert got == expected, name
        covered |= {rule for rule, _ in expected}
    assert {"F1", "F2", "F3", "F4", "F5", "F6", "LC1", "LC2", "LC3", "LC4", "LC5", "LC6", "LC-M"} <= covered
    assert time.perf_counter() - start < 1.0


@pytest.mark.criterion(3, "minimal-model forcing")
def test_c3_minimal_forcing():
    _, elapsed = timed(run_minimal_forcing)
    assert elapsed < 1.0


@pytest.mark.criterion(4, "finder counts equal brute-force oracle counts")
def test_c4_oracle_equivalence():
    assert len(GRID) >= 10
    _, elapsed = timed(run_oracle_grid)
    assert elapsed < 300


@pytest.mark.criterion(5, "assertion counterexample and holds-in-scope")
def test_c5_assertion_semantics():
    _, elapsed = timed(run_assertion)
    assert elapsed < 30


@pytest.mark.criterion(6, "pattern catalog equals golden JSON")
def test_c6_catalog():
    _, elapsed = timed(run_catalog)
    assert elapsed < 1.0


@pytest.mark.criterion(7, "generated suites equal golden suites")
def test_c7_generation():
    _, elapsed = timed(run_generation)
    assert elapsed < 1.0


@pytest.mark.criterion(8, "layout ingestion round trip")
def test_c8_ingestion():
    _, elapsed = timed(run_ingestion)
    assert elapsed < 1.0


@pytest.mark.criterion(9, "repeat runs and worker counts give identical bytes")
def test_c9_determinism_repeat():
    for run in (run_minimal_forcing, run_oracle_grid, run_assertion, run_catalog, run_generation, run_ingestion):
        assert run() == run(), run.__name__


@pytest.mark.criterion(9, "repeat runs and worker counts give identical bytes")
def test_c9_determinism_workers():
    assert run_oracle_grid(workers=1) == run_oracle_grid(workers=4)


PROPERTY = settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
graphs = st.one_of(random_graphs(), wellformed_graphs())


@pytest.mark.criterion(10, "randomized property suite")
@PROPERTY
@given(graphs, st.integers(0, 2**32 - 1))
def test_c10a_diagnostics_ignore_declaration_order(graph, seed):
    assert check_wellformed(relabel(graph, seed, rename=False)) == check_wellformed(graph)


@pytest.mark.criterion(10, "randomized property suite")
@PROPERTY
@given(graphs, st.integers(0, 2**32 - 1))
def test_c10b_canonical_form_ignores_labels(graph, seed):
    assert canonical_form(relabel(graph, seed)) == canonical_form(graph)


@pytest.mark.criterion(10, "randomized property suite")
@PROPERTY
@given(st.one_of(wellformed_graphs(), random_graphs()))
def test_c10c_init_reaches_every_child(graph):
    if check_wellformed(graph):
        return
    for c in graph.children:
        if graph.kind(c.parent) in (ElementKind.FORM, ElementKind.MODEL):
            reach = forward_reach(graph, c.init)
            assert all(x in reach for x in graph.direct_children(c.parent) if x != c.init)
