"""Execute mapping documents over CSV tables and orchestrate multi-dataset runs.

Data problems never abort a run. A value that cannot be produced skips only
the triple that needed it and leaves a warning carrying the row number and
rule id; a dataset whose input file is missing is skipped as a whole.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from .mapping import (ColumnRef, Constant, FunctionCall, MappingDocument, MappingError,
                      RunConfig, Template, ValueSpec, column_refs, load_mapping,
                      validate_mapping)
from .rdf import Graph, NamespaceTable, serialize
from .rdf.terms import RDF_TYPE, InvalidTermError, Iri, Literal, Triple
from .transforms import (DEFAULT_REGISTRY, SEPARATORS, TABLE, LookupTable, UdfRegistry,
                         load_lookup_table)

log = logging.getLogger(__name__)


class TableError(ValueError):
    pass


class PipelineError(RuntimeError):
    """A run-stopping failure. ``io`` separates unreadable or missing files
    from malformed content."""

    def __init__(self, message: str, io: bool = False):
        super().__init__(message)
        self.io = io


@dataclass
class Table:
    name: str
    header: list[str]
    rows: list[list[Optional[str]]]
    notes: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if len(set(self.header)) != len(self.header):
            raise TableError(f"{self.name}: duplicate column names")
        self._index = {h: i for i, h in enumerate(self.header)}

    def column(self, name: str) -> int:
        return self._index[name]

    def cell(self, row: Sequence[Optional[str]], name: str) -> Optional[str]:
        return row[self._index[name]]

    def __len__(self) -> int:
        return len(self.rows)


def _clean(cell: str) -> Optional[str]:
    cell = cell.strip()
    return cell or None


def load_table(path: Union[str, Path], name: Optional[str] = None) -> Table:
    """Read an RFC 4180 CSV file; the first record is the header."""
    path = Path(path)
    name = name or path.stem
    try:
        with path.open(encoding="utf-8-sig", newline="") as fh:
            records = list(csv.reader(fh, strict=True))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise TableError(f"cannot read {path}: {exc}") from exc
    if not records or not any(h.strip() for h in records[0]):
        raise TableError(f"{path}: no columns")
    header = [h.strip() for h in records[0]]
    seen = set()
    for h in header:
        if h in seen:
            raise TableError(f"{path}: duplicate column {h!r}")
        seen.add(h)
    width = len(header)
    rows, notes = [], []
    for n, rec in enumerate(records[1:], start=1):
        if not rec or not any(c.strip() for c in rec):
            continue
        if len(rec) > width:
            dropped = [c for c in rec[width:] if c.strip()]
            if dropped:
                notes.append(f"row {n}: {len(dropped)} cell(s) beyond the header were dropped")
            rec = rec[:width]
        cells = [_clean(c) for c in rec] + [None] * (width - len(rec))
        rows.append(cells)
    return Table(name, header, rows, notes)


def align_table(t: Table, expected_columns: Sequence[str]) -> tuple[Table, list[str]]:
    """Add all-null columns for expected ones that are missing; keep and flag extras."""
    warnings = []
    header = list(t.header)
    missing = [c for c in dict.fromkeys(expected_columns) if c not in t._index]
    for col in missing:
        warnings.append(f"missing column {col!r} added with empty values")
    expected = set(expected_columns)
    for col in t.header:
        if col not in expected:
            warnings.append(f"unexpected column {col!r} retained but not mapped")
    if not missing:
        return t, warnings
    header.extend(missing)
    rows = [row + [None] * len(missing) for row in t.rows]
    return Table(t.name, header, rows, list(t.notes)), warnings


@dataclass
class RowWarning:
    row_index: Optional[int]
    rule_id: Optional[str]
    message: str
    kind: str = "skip"


@dataclass
class MaterialisationReport:
    dataset_name: str
    rows_in: int = 0
    triples_emitted: int = 0
    triples_skipped: int = 0
    warnings: list[RowWarning] = field(default_factory=list)
    status: str = "ok"
    prefixes: dict[str, str] = field(default_factory=dict, repr=False)

    def warn(self, row_index: Optional[int], rule_id: Optional[str], message: str,
             kind: str = "skip") -> None:
        self.warnings.append(RowWarning(row_index, rule_id, message, kind))

    def to_dict(self) -> dict:
        out = asdict(self)
        del out["prefixes"]
        return out


_IRI_SAFE = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")


def iri_safe(value: str) -> str:
    """Percent-encode everything except unreserved ASCII and non-ASCII letters."""
    out = []
    for c in value:
        if c in _IRI_SAFE or ord(c) >= 0xA0:
            out.append(c)
        else:
            out.extend(f"%{b:02X}" for b in c.encode("utf-8"))
    return "".join(out)


class _Null(Exception):
    def __init__(self, column: str) -> None:
        self.column = column


class _Executor:
    def __init__(self, doc: MappingDocument, table: Table, registry: UdfRegistry,
                 report: MaterialisationReport) -> None:
        self.doc = doc
        self.table = table
        self.registry = registry
        self.report = report
        self._tables: dict[Path, LookupTable] = {}

    def lookup_table(self, ref: str) -> LookupTable:
        path = Path(ref)
        if not path.is_absolute() and self.doc.base_dir is not None:
            path = self.doc.base_dir / path
        if path not in self._tables:
            self._tables[path] = load_lookup_table(path)
        return self._tables[path]

    def text(self, spec: ValueSpec, row, as_iri: bool = False) -> Any:
        if isinstance(spec, ColumnRef):
            v = self.table.cell(row, spec.name)
            if v is None:
                raise _Null(spec.name)
            return v
        if isinstance(spec, Template):
            out = []
            for part in spec.parts:
                if isinstance(part, ColumnRef):
                    v = self.table.cell(row, part.name)
                    if v is None:
                        raise _Null(part.name)
                    out.append(iri_safe(v) if as_iri else v)
                else:
                    out.append(part)
            return "".join(out)
        if isinstance(spec, Constant):
            return spec.value
        raise TypeError(spec)

    def evaluate(self, spec: ValueSpec, row, as_iri: bool = False):
        """Return (values, skip message or None). An empty value list with a
        None message is a silent skip."""
        try:
            if not isinstance(spec, FunctionCall):
                return [self.text(spec, row, as_iri)], None
            udf = self.registry[spec.name]
            args = {}
            for pname, pspec in spec.params:
                kind = udf.params.get(pname)
                raw = self.text(pspec, row, as_iri=(pname == "base"))
                if kind == TABLE:
                    if not isinstance(pspec, Constant):
                        raise MappingError(f"{spec.name}: parameter {pname!r} must be a constant path")
                    args[pname] = self.lookup_table(str(raw))
                elif kind == SEPARATORS:
                    args[pname] = list(raw) if isinstance(raw, tuple) else [raw]
                else:
                    args[pname] = raw if isinstance(raw, str) else str(raw)
        except _Null as null:
            return [], f"column {null.column!r} is empty"
        messages: list[str] = []
        try:
            values = udf(args, warn=messages.append)
        except (ValueError, TypeError) as exc:
            return [], f"{spec.name} failed: {exc}"
        if not values:
            if messages:
                return [], f"{spec.name}: " + "; ".join(messages)
            if udf.silent_empty:
                return [], None
            return [], f"{spec.name} produced no value"
        return values, ("; ".join(f"{spec.name}: {m}" for m in messages) or None)

    def run(self) -> Graph:
        g = Graph()
        report = self.report
        for tm in self.doc.maps:
            for idx, row in enumerate(self.table.rows, start=1):
                subjects, msg = self.evaluate(tm.subject, row, as_iri=True)
                if not subjects:
                    report.triples_skipped += 1
                    if msg is not None:
                        report.warn(idx, tm.subject_rule_id, f"subject not generated, row skipped: {msg}")
                    continue
                if msg:
                    report.warn(idx, tm.subject_rule_id, msg, kind="partial")
                subject_terms = []
                for v in subjects:
                    try:
                        subject_terms.append(v if isinstance(v, Iri) else Iri(str(v)))
                    except InvalidTermError as exc:
                        report.warn(idx, tm.subject_rule_id, f"invalid subject IRI: {exc}")
                if not subject_terms:
                    continue
                for s in subject_terms:
                    for cls in tm.classes:
                        report.triples_emitted += g.add(Triple(s, RDF_TYPE, cls))
                for rule in tm.po:
                    objects = self.objects(rule, row, idx)
                    for s in subject_terms:
                        for o in objects:
                            report.triples_emitted += g.add(Triple(s, rule.predicate, o))
        return g

    def objects(self, rule, row, idx: int) -> list:
        report = self.report
        values, msg = self.evaluate(rule.object, row, as_iri=rule.object_kind == "iri")
        if not values:
            report.triples_skipped += 1
            if msg is not None:
                report.warn(idx, rule.id, f"triple skipped: {msg}")
            return []
        if msg:
            report.warn(idx, rule.id, msg, kind="partial")
        lang = None
        if rule.lang is not None:
            langs, _ = self.evaluate(rule.lang, row)
            lang = str(langs[0]) if langs else None
        out = []
        for v in values:
            try:
                if isinstance(v, (Iri, Literal)):
                    out.append(v)
                elif rule.object_kind == "iri":
                    out.append(Iri(str(v)))
                else:
                    try:
                        out.append(Literal(str(v), lang, rule.datatype))
                    except InvalidTermError:
                        report.warn(idx, rule.id, f"invalid language tag {lang!r} ignored", kind="partial")
                        out.append(Literal(str(v), None, rule.datatype))
            except InvalidTermError as exc:
                report.warn(idx, rule.id, f"invalid object: {exc}")
        if not out:
            report.triples_skipped += 1
        return out


def expected_columns(doc: MappingDocument) -> list[str]:
    cols = []
    for tm in doc.maps:
        cols.extend(column_refs(tm.subject))
        for rule in tm.po:
            cols.extend(column_refs(rule.object))
            cols.extend(column_refs(rule.lang))
    return list(dict.fromkeys(cols))


def execute_mapping(doc: MappingDocument, t: Table,
                    registry: UdfRegistry = DEFAULT_REGISTRY,
                    dataset_name: Optional[str] = None) -> tuple[Graph, MaterialisationReport]:
    """Materialise every triples map of ``doc`` over every row of ``t``."""
    validate_mapping(doc, registry, None)
    report = MaterialisationReport(dataset_name or t.name, rows_in=len(t.rows),
                                   prefixes=dict(doc.prefixes))
    for note in t.notes:
        report.warn(None, None, note, kind="table")
    aligned, notes = align_table(t, expected_columns(doc))
    for note in notes:
        report.warn(None, None, note, kind="column")
    graph = _Executor(doc, aligned, registry, report).run()
    return graph, report


def run_pipeline(config: RunConfig, registry: UdfRegistry = DEFAULT_REGISTRY
                 ) -> tuple[Graph, list[MaterialisationReport]]:
    """Materialise each dataset section independently and merge the results."""
    merged = Graph()
    reports = []
    done = 0
    for section in config.datasets:
        if not section.input_path.exists():
            msg = (f"input file {section.input_path} for dataset [{section.section_name}] "
                   f"not found; section skipped")
            log.warning(msg)
            report = MaterialisationReport(section.section_name, status="skipped")
            report.warn(None, None, msg, kind="dataset")
            reports.append(report)
            continue
        try:
            doc = load_mapping(section.mapping_path)
        except OSError as exc:
            raise PipelineError(f"[{section.section_name}] cannot read mapping file: {exc}",
                                io=True) from exc
        except MappingError as exc:
            raise PipelineError(f"[{section.section_name}] invalid mapping: {exc}") from exc
        try:
            table = load_table(section.input_path, section.section_name)
            graph, report = execute_mapping(doc, table, registry, section.section_name)
        except (TableError, MappingError, ValueError) as exc:
            io = isinstance(exc.__cause__, OSError)
            raise PipelineError(f"[{section.section_name}] {exc}", io=io) from exc
        merged.update(graph)
        reports.append(report)
        done += 1
    if not done:
        raise PipelineError("no dataset section could be materialised (all inputs missing)",
                            io=True)
    return merged, reports


def report_lines(reports: Sequence[MaterialisationReport]) -> str:
    lines = []
    for r in reports:
        for w in r.warnings:
            lines.append(json.dumps({"dataset": r.dataset_name, **asdict(w)},
                                    ensure_ascii=False, sort_keys=True))
    return "".join(line + "\n" for line in lines)


def write_outputs(graph: Graph, reports: Sequence[MaterialisationReport],
                  config: RunConfig) -> tuple[Path, Path]:
    out = config.output_path
    out.parent.mkdir(parents=True, exist_ok=True)
    ns = NamespaceTable()
    for r in reports:
        for prefix, namespace in sorted(r.prefixes.items()):
            if prefix not in ns:
                ns.bind(prefix, namespace)
    text = serialize(graph, config.output_format, ns)
    out.write_bytes(text.encode("utf-8"))
    report_path = out.with_name(out.name + ".report.jsonl")
    report_path.write_bytes(report_lines(reports).encode("utf-8"))
    return out, report_path
