"""Command-line entry point.

Exit codes: 0 success (warnings included), 1 data error (invalid input,
shape violations), 2 usage error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .chad import ShapeError, builtin_shapes, compute_stats, load_shapes, validate
from .mapping import ConfigError, load_run_config
from .materialiser import PipelineError, run_pipeline, write_outputs
from .publisher import SiteConfig, SiteError, build_site, serve
from .query import QuerySyntaxError, run_query
from .rdf import Graph, RdfSyntaxError, format_for_path, parse
from .transforms import default_registry

log = logging.getLogger("heritagekg")

OK, DATA_ERROR, USAGE_ERROR, IO_ERROR = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")


def load_graph(path: str) -> Graph:
    try:
        fmt = format_for_path(path)
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR) from None
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read graph {path}: {exc.strerror or exc}", IO_ERROR) from None
    try:
        return parse(text, fmt)
    except (RdfSyntaxError, ValueError) as exc:
        raise CliError(f"{path}: {exc}", DATA_ERROR) from None


def cmd_materialise(args) -> int:
    try:
        config = load_run_config(args.config)
    except OSError as exc:
        raise CliError(f"cannot read config {args.config}: {exc.strerror or exc}", IO_ERROR) from None
    except ConfigError as exc:
        raise CliError(f"{args.config}: {exc}", DATA_ERROR) from None
    try:
        graph, reports = run_pipeline(config, default_registry())
    except PipelineError as exc:
        raise CliError(str(exc), IO_ERROR if exc.io else DATA_ERROR) from None
    try:
        out, report_path = write_outputs(graph, reports, config)
    except OSError as exc:
        raise CliError(f"cannot write output: {exc}", IO_ERROR) from None
    for r in reports:
        if r.warnings:
            log.warning("[%s] %d warning(s); details in %s", r.dataset_name, len(r.warnings),
                        report_path)
    datasets = []
    for r in reports:
        entry = r.to_dict()
        entry["warning_count"] = len(entry.pop("warnings"))
        datasets.append(entry)
    _emit({"output": str(out), "format": config.output_format, "report": str(report_path),
           "triple_count": len(graph), "datasets": datasets})
    return OK


def cmd_validate(args) -> int:
    graph = load_graph(args.graph)
    if args.shapes:
        try:
            rules = load_shapes(args.shapes)
        except OSError as exc:
            raise CliError(f"cannot read shapes {args.shapes}: {exc.strerror or exc}", IO_ERROR) from None
        except ShapeError as exc:
            raise CliError(f"{args.shapes}: {exc}", DATA_ERROR) from None
    else:
        rules = builtin_shapes()
    report = validate(graph, rules)
    _emit(report.to_dict())
    for v in report.violations:
        log.error("violation: %s %s", v.focus_node, v.message)
    if report.conforms:
        return OK
    log.error("%d violation(s)", len(report.violations))
    return OK if args.warn_only else DATA_ERROR


def cmd_stats(args) -> int:
    stats = compute_stats(load_graph(args.graph))
    text = stats.to_json() + "\n"
    if args.json:
        try:
            Path(args.json).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.json}: {exc.strerror or exc}", IO_ERROR) from None
    sys.stdout.write(text)
    return OK


def cmd_query(args) -> int:
    graph = load_graph(args.graph)
    if args.query_file:
        try:
            text = Path(args.query_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read {args.query_file}: {exc.strerror or exc}", IO_ERROR) from None
    else:
        text = args.expression
    try:
        result = run_query(text, graph)
    except QuerySyntaxError as exc:
        raise CliError(f"query error: {exc}", DATA_ERROR) from None
    _emit(result.to_sparql_json())
    return OK


def _site_config(args, output_dir="site") -> SiteConfig:
    try:
        return SiteConfig(args.base, Path(output_dir))
    except ValueError as exc:
        raise CliError(str(exc), USAGE_ERROR) from None


def cmd_publish(args) -> int:
    cfg = _site_config(args, args.output)
    graph = load_graph(args.graph)
    try:
        manifest = build_site(graph, compute_stats(graph), cfg)
    except SiteError as exc:
        raise CliError(str(exc), IO_ERROR) from None
    _emit({"output_dir": str(cfg.output_dir), "files": manifest})
    return OK


def cmd_serve(args) -> int:
    cfg = _site_config(args)
    graph = load_graph(args.graph)
    try:
        serve(graph, compute_stats(graph), cfg, args.port)
    except OSError as exc:
        raise CliError(f"cannot serve on port {args.port}: {exc.strerror or exc}", IO_ERROR) from None
    return OK


def build_parser() -> argparse.ArgumentParser:
    version = f"heritagekg {__version__}"
    parser = argparse.ArgumentParser(
        prog="heritagekg",
        description="Build, check, query and publish a cultural-heritage knowledge graph.")
    parser.add_argument("--version", action="version", version=version)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--version", action="version", version=version)
        p.set_defaults(func=func)
        return p

    p = command("materialise", cmd_materialise, "run the mappings of a run config over its CSV inputs")
    p.add_argument("-c", "--config", required=True, help="run configuration (INI)")

    p = command("validate", cmd_validate, "check a graph against the shape rules")
    p.add_argument("-g", "--graph", required=True, help="graph file (.nt or .ttl)")
    p.add_argument("--shapes", help="shape rules (YAML); defaults to the built-in rules")
    p.add_argument("--warn-only", action="store_true", help="report violations but exit 0")

    p = command("stats", cmd_stats, "print graph statistics as JSON")
    p.add_argument("-g", "--graph", required=True, help="graph file (.nt or .ttl)")
    p.add_argument("--json", metavar="OUT", help="also write the statistics to OUT")

    p = command("query", cmd_query, "run a SELECT query and print SPARQL JSON results")
    p.add_argument("-g", "--graph", required=True, help="graph file (.nt or .ttl)")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("-q", "--query-file", help="file containing the query")
    source.add_argument("-e", "--expression", help="query text")

    p = command("publish", cmd_publish, "write the static site")
    p.add_argument("-g", "--graph", required=True, help="graph file (.nt or .ttl)")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("-b", "--base", required=True, help="base IRI of internal entities")

    p = command("serve", cmd_serve, "serve the query endpoint and entity pages over HTTP")
    p.add_argument("-g", "--graph", required=True, help="graph file (.nt or .ttl)")
    p.add_argument("-p", "--port", type=int, required=True, help="TCP port")
    p.add_argument("-b", "--base", required=True, help="base IRI of internal entities")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="heritagekg: %(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except CliError as exc:
        log.error("%s", exc)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
