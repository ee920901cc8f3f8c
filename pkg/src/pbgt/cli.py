"""Command-line front end: ``pbgt check|find|ingest|generate|patterns list|report``."""

from __future__ import annotations

import argparse
import enum
import json
import sys
from collections import Counter
from typing import Any, Optional, Sequence

from . import __version__
from .finder import DEFAULT_BUDGET, BudgetExceeded, Scope, UnknownPredicate, check_assertion, find_instance, registry
from .ingest import IngestOptions, LayoutSyntaxError, parse_layout, to_model
from .model import ElementKind, ModelFormatError, ModelGraph, UnknownElementError, dump_graph, dumps_json, load_graph
from .patterns import (
    ConfigFormatError,
    NotABehaviour,
    PatternConfig,
    PatternKind,
    applicable_patterns,
    builtin_patterns,
    catalog_json,
    validate_config,
)
from .testgen import (
    DuplicateConfig,
    InvalidConfig,
    LinearizationCycle,
    generate_suite,
    serialize_suite,
)
from .wellformed import check_wellformed


class ExitCode(enum.IntEnum):
    OK = 0
    VIOLATIONS = 1
    USAGE = 2
    UNSAT = 3
    BUDGET = 4


class UsageError(Exception):
    pass


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, data: bytes) -> None:
    if path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
        return
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _err(line: str) -> None:
    print(line, file=sys.stderr)


def _load_model(path: str) -> ModelGraph:
    try:
        return load_graph(_read(path))
    except ModelFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _load_configs(paths: Sequence[str]) -> list[tuple[str, PatternConfig]]:
    out = []
    for path in paths:
        try:
            doc = json.loads(_read(path))
        except ValueError as exc:
            raise UsageError(f"{path}: not JSON: {exc}") from None
        docs = doc if isinstance(doc, list) else [doc]
        for i, item in enumerate(docs):
            try:
                out.append((path if len(docs) == 1 else f"{path}[{i}]", PatternConfig.from_dict(item)))
            except ConfigFormatError as exc:
                raise UsageError(f"{path}: {exc}") from None
    return out


def _report_diagnostics(diags) -> None:
    for d in diags:
        _err(d.to_line())


# --- commands -------------------------------------------------------------------


def cmd_check(args: argparse.Namespace) -> ExitCode:
    diags = check_wellformed(_load_model(args.model))
    _report_diagnostics(diags)
    return ExitCode.VIOLATIONS if diags else ExitCode.OK


def _scope(args: argparse.Namespace) -> Scope:
    doc: dict[str, Any] = {}
    if args.scope:
        try:
            doc = dict(json.loads(_read(args.scope)))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{args.scope}: not a scope object: {exc}") from None
    for key in Scope._KEYS:
        value = getattr(args, key)
        if value is not None:
            doc[key] = value
    if args.connector_kinds:
        doc["connector_kinds"] = args.connector_kinds.split(",")
    try:
        return Scope.from_dict(doc)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from None


def cmd_find(args: argparse.Namespace) -> ExitCode:
    scope = _scope(args)
    name = args.pred or args.assertion
    try:
        if args.pred:
            result = find_instance(scope, name, workers=args.workers, budget=args.budget)
        else:
            result = check_assertion(scope, name, workers=args.workers, budget=args.budget)
    except UnknownPredicate:
        known = ", ".join(sorted(registry()))
        raise UsageError(f"unknown predicate {name!r}; known: {known}") from None
    except BudgetExceeded as exc:
        _err(f"pbgt: {exc}")
        return ExitCode.BUDGET
    _err(f"{result.message} ({result.explored} candidates)")
    if result.found:
        _write(args.out, dump_graph(result.witness))
    if args.pred:
        return ExitCode.OK if result.found else ExitCode.UNSAT
    return ExitCode.VIOLATIONS if result.found else ExitCode.OK


def cmd_ingest(args: argparse.Namespace) -> ExitCode:
    try:
        layout = parse_layout(_read(args.layout))
    except LayoutSyntaxError as exc:
        raise UsageError(f"{args.layout}:{exc.line}:{exc.column}: {exc.reason}") from None
    opts = IngestOptions(collapse_single_child_groups=not args.no_collapse,
                         synthesize_connectors=not args.no_connectors)
    graph, diags = to_model(layout, opts)
    _write(args.out, dump_graph(graph))
    for d in diags:
        line, col = d.location
        _err(f"{args.layout}:{line}:{col} {d.rule} {d.message}")
    return ExitCode.VIOLATIONS if diags else ExitCode.OK


def _validated(graph: ModelGraph, configs: list[tuple[str, PatternConfig]]) -> None:
    defs = builtin_patterns()
    for where, cfg in configs:
        if cfg.target not in graph.by_id:
            raise UsageError(f"{where}: target {cfg.target!r} is not an element of the model")
        if graph.kind(cfg.target) is not ElementKind.BEHAVIOUR:
            raise UsageError(f"{where}: target {cfg.target!r} is not a Behaviour")
        # unbound variables may still be filled over data-passing connectors
        diags = [d for d in validate_config(defs[cfg.pattern], cfg) if d.rule != "PC2" or "not bound" not in d.message]
        if diags:
            raise UsageError(f"{where}: {diags[0].rule}: {diags[0].message}")


def cmd_generate(args: argparse.Namespace) -> ExitCode:
    graph = _load_model(args.model)
    configs = _load_configs(args.config)
    diags = check_wellformed(graph)
    if diags:
        _report_diagnostics(diags)
        return ExitCode.VIOLATIONS
    _validated(graph, configs)
    try:
        suite = generate_suite(graph, [c for _, c in configs])
    except InvalidConfig as exc:
        where = next(w for w, c in configs if c.target == exc.config.target and c.pattern is exc.config.pattern
                     and c.goal == exc.config.goal)
        raise UsageError(f"{where}: {exc}") from None
    except DuplicateConfig as exc:
        raise UsageError(str(exc)) from None
    except LinearizationCycle as exc:
        _err(f"pbgt: {exc}")
        return ExitCode.VIOLATIONS
    _write(args.out, serialize_suite(suite))
    return ExitCode.OK


def cmd_patterns_list(args: argparse.Namespace) -> ExitCode:
    _write("-", dumps_json(catalog_json()).encode("utf-8"))
    return ExitCode.OK


def cmd_report(args: argparse.Namespace) -> ExitCode:
    graph = _load_model(args.model)
    configs = _load_configs(args.config)
    diags = check_wellformed(graph)
    behaviours = graph.ids_of_kind(ElementKind.BEHAVIOUR)
    applicable: Counter[str] = Counter()
    if not diags:
        for b in behaviours:
            applicable.update(k.value for k in applicable_patterns(graph, b))
    configured_targets = {c.target for _, c in configs}
    configured = Counter(c.pattern.value for _, c in configs)
    doc = {
        "behaviours": len(behaviours),
        "configured": sum(1 for b in behaviours if b in configured_targets),
        "applicable": {k.value: applicable[k.value] for k in PatternKind},
        "configured_by_pattern": {k.value: configured[k.value] for k in PatternKind},
        "diagnostics": [d.to_line() for d in diags],
    }
    _write("-", dumps_json(doc).encode("utf-8"))
    return ExitCode.VIOLATIONS if diags else ExitCode.OK


# --- parser ---------------------------------------------------------------------


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pbgt", description="Pattern-based GUI test models: check, find, ingest, generate.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("check", help="report well-formedness diagnostics of a model")
    c.add_argument("model", help="model JSON path, or - for stdin")
    c.set_defaults(run=cmd_check)

    f = sub.add_parser("find", help="search for an instance or a counterexample within a scope")
    for key in Scope._KEYS:
        f.add_argument("--" + key.replace("_", "-"), dest=key, type=int, metavar="N", help=f"at most N {key} atoms")
    f.add_argument("--connector-kinds", help="comma-separated connector kinds to use")
    f.add_argument("--scope", metavar="PATH", help="scope JSON; flags override its fields")
    q = f.add_mutually_exclusive_group(required=True)
    q.add_argument("--pred", metavar="NAME", help="find an instance satisfying NAME")
    q.add_argument("--assert", dest="assertion", metavar="NAME", help="find an instance violating NAME")
    f.add_argument("--out", default="-", help="where to write the instance (default stdout)")
    f.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    f.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="give up after this many candidates")
    f.set_defaults(run=cmd_find)

    i = sub.add_parser("ingest", help="convert an Android layout XML file to a model")
    i.add_argument("layout", help="layout XML path, or - for stdin")
    i.add_argument("--out", default="-")
    i.add_argument("--no-collapse", action="store_true", help="keep single-child containers")
    i.add_argument("--no-connectors", action="store_true", help="do not synthesise Sequence connectors")
    i.set_defaults(run=cmd_ingest)

    g = sub.add_parser("generate", help="generate a test suite from a model and pattern configurations")
    g.add_argument("model")
    g.add_argument("--config", action="append", default=[], metavar="PATH",
                   help="pattern configuration JSON (object or list); repeatable")
    g.add_argument("--out", default="-")
    g.set_defaults(run=cmd_generate)

    pt = sub.add_parser("patterns", help="inspect the builtin pattern catalog")
    pts = pt.add_subparsers(dest="patterns_command", required=True, metavar="COMMAND")
    pts.add_parser("list", help="print the catalog as JSON").set_defaults(run=cmd_patterns_list)

    r = sub.add_parser("report", help="pattern coverage of a model")
    r.add_argument("model")
    r.add_argument("--config", action="append", default=[], metavar="PATH")
    r.set_defaults(run=cmd_report)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return ExitCode.OK if exc.code == 0 else ExitCode.USAGE
    if getattr(args, "workers", 1) < 1 or getattr(args, "budget", 1) < 0:
        _err("pbgt: error: --workers must be >= 1 and --budget >= 0")
        return ExitCode.USAGE
    try:
        return int(args.run(args))
    except UsageError as exc:
        _err(f"pbgt: error: {exc}")
        return ExitCode.USAGE
    except (UnknownElementError, NotABehaviour) as exc:
        _err(f"pbgt: error: {exc}")
        return ExitCode.USAGE


if __name__ == "__main__":
    sys.exit(main())
