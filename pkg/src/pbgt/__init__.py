"""Pattern-based GUI testing models: well-formedness, bounded search, ingestion and test generation."""

__version__ = "0.1.0"

from .canonical import canonical_form, canonical_graph
from .finder import Scope, check_assertion, enumerate_instances, find_instance
from .ingest import IngestOptions, parse_layout, to_model
from .model import (
    BehaviourInfo,
    Children,
    Connector,
    ConnectorKind,
    Element,
    ElementKind,
    ModelGraph,
    dump_graph,
    load_graph,
    make_graph,
)
from .patterns import PatternConfig, PatternKind, applicable_patterns, builtin_patterns, validate_config
from .testgen import generate_for_element, generate_suite, linearize, parse_suite, serialize_suite
from .wellformed import Diagnostic, check_wellformed, forward_reach, parent

__all__ = [
    "BehaviourInfo", "Children", "Connector", "ConnectorKind", "Diagnostic", "Element", "ElementKind",
    "IngestOptions", "ModelGraph", "PatternConfig", "PatternKind", "Scope", "applicable_patterns",
    "builtin_patterns", "canonical_form", "canonical_graph", "check_assertion", "check_wellformed",
    "dump_graph", "enumerate_instances", "find_instance", "forward_reach", "generate_for_element",
    "generate_suite", "linearize", "load_graph", "make_graph", "parent", "parse_layout", "parse_suite",
    "serialize_suite", "to_model", "validate_config",
]
