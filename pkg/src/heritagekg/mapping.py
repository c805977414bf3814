"""YARRRML-subset mapping documents and INI-style run configuration.

Supported mapping grammar (YAML)::

    prefixes:            # optional, added to the built-in prefix table
      ex: https://example.org/
    sources:             # id -> "path~csv" | [path~csv] | {access: path, referenceFormulation: csv}
      bm: [data/bm.csv~csv]
    mappings:
      <map id>:
        sources: bm                    # or [bm]
        s: ex:$(id)/work               # template, $(column), constant, or function block
        po:
          - [a, lrmoo:F1_Work]                    # class assertion
          - [crm:P3_has_note, $(note)]            # literal from a column
          - [crm:P3_has_note, $(note), it~lang]   # language-tagged literal
          - [crm:P82a, $(date), xsd:dateTime]     # typed literal
          - [crm:P2_has_type, ex:type/$(t)~iri]   # IRI object
          - p: crm:P190_has_symbolic_content
            o:
              function: extract_title
              parameters:
                - [value, $(titolo)]
              language:                # constant tag, $(column) or a function block
                function: extract_title_lang
                parameters: [[value, $(titolo)]]

``\\$`` in a template yields a literal dollar sign. Function blocks may not
nest; their parameters are column references, templates or constants (a YAML
list constant is allowed for separator lists).
"""
from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping, Optional, Sequence, Union

import yaml

from .rdf.namespaces import NamespaceTable, UnknownPrefixError
from .rdf.terms import RDF_TYPE, InvalidTermError, Iri


class MappingError(ValueError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SourceDecl:
    id: str
    path: str
    format: str = "csv"


@dataclass(frozen=True)
class ColumnRef:
    name: str


@dataclass(frozen=True)
class Template:
    """Text with ``$(column)`` placeholders. ``parts`` alternates literal text
    (str) and ColumnRef items."""

    parts: tuple[Union[str, ColumnRef], ...]

    @property
    def columns(self) -> list[str]:
        return [p.name for p in self.parts if isinstance(p, ColumnRef)]

    def __str__(self) -> str:
        return "".join(f"$({p.name})" if isinstance(p, ColumnRef) else p.replace("$", "\\$")
                       for p in self.parts)


@dataclass(frozen=True)
class Constant:
    value: Union[str, Iri, tuple[str, ...]]


@dataclass(frozen=True)
class FunctionCall:
    name: str
    params: tuple[tuple[str, Union[ColumnRef, Template, Constant]], ...]

    @property
    def param_map(self) -> dict:
        return dict(self.params)


ValueSpec = Union[ColumnRef, Template, Constant, FunctionCall]


@dataclass(frozen=True)
class PredicateObjectRule:
    id: str
    predicate: Iri
    object: ValueSpec
    object_kind: str = "literal"
    lang: Optional[ValueSpec] = None
    datatype: Optional[Iri] = None


@dataclass(frozen=True)
class TriplesMap:
    id: str
    source: str
    subject: ValueSpec
    classes: tuple[Iri, ...] = ()
    po: tuple[PredicateObjectRule, ...] = ()

    @property
    def subject_rule_id(self) -> str:
        return f"{self.id}/s"


@dataclass(frozen=True)
class MappingDocument:
    prefixes: Mapping[str, str]
    sources: tuple[SourceDecl, ...]
    maps: tuple[TriplesMap, ...]
    base_dir: Optional[Path] = field(default=None, compare=False)

    @property
    def namespaces(self) -> NamespaceTable:
        return NamespaceTable(self.prefixes)

    def source(self, source_id: str) -> SourceDecl:
        for s in self.sources:
            if s.id == source_id:
                return s
        raise KeyError(source_id)


def column_refs(spec: Optional[ValueSpec]) -> Iterator[str]:
    """Every column name referenced by a value spec, in order, with repeats."""
    if spec is None:
        return
    if isinstance(spec, ColumnRef):
        yield spec.name
    elif isinstance(spec, Template):
        yield from spec.columns
    elif isinstance(spec, FunctionCall):
        for _, param in spec.params:
            yield from column_refs(param)


def rule_specs(tm: TriplesMap) -> Iterator[tuple[str, ValueSpec]]:
    """(rule id, value spec) for the subject and every object/language spec."""
    yield tm.subject_rule_id, tm.subject
    for rule in tm.po:
        yield rule.id, rule.object
        if rule.lang is not None:
            yield rule.id, rule.lang


# -- value parsing -----------------------------------------------------------

_PLACEHOLDER = re.compile(r"\\\$|\$\(([^)]*)\)")


def parse_template(text: str) -> Union[ColumnRef, Template, Constant]:
    """Classify a YARRRML value string as a column reference, template or constant."""
    parts: list[Union[str, ColumnRef]] = []
    buf = []
    pos = 0
    for m in _PLACEHOLDER.finditer(text):
        buf.append(text[pos:m.start()])
        pos = m.end()
        if m.group() == "\\$":
            buf.append("$")
            continue
        name = m.group(1)
        if not name.strip():
            raise MappingError(f"empty placeholder in {text!r}")
        if buf:
            parts.append("".join(buf))
            buf = []
        parts.append(ColumnRef(name))
    buf.append(text[pos:])
    tail = "".join(buf)
    if tail:
        parts.append(tail)
    parts = [p for p in parts if p != ""]
    if not any(isinstance(p, ColumnRef) for p in parts):
        return Constant("".join(parts))
    if len(parts) == 1:
        return parts[0]
    return Template(tuple(parts))


class _DocParser:
    TOP_KEYS = {"prefixes", "sources", "mappings", "base"}
    MAP_KEYS = {"sources", "source", "s", "subject", "subjects", "po", "predicateobjects"}

    def __init__(self, ns: NamespaceTable) -> None:
        self.ns = ns

    def expand(self, text: str, where: str) -> Iri:
        text = text.strip()
        if text == "a":
            return RDF_TYPE
        prefix, sep, _ = text.partition(":")
        try:
            if sep and prefix in self.ns:
                return self.ns.expand(text)
            if sep and not text[len(prefix) + 1:].startswith("//") and prefix not in ("http", "https", "urn"):
                raise UnknownPrefixError(prefix)
            return Iri(text)
        except UnknownPrefixError as exc:
            raise MappingError(f"{where}: {exc}") from None
        except InvalidTermError as exc:
            raise MappingError(f"{where}: {exc}") from None

    def expand_template_prefix(self, text: str) -> str:
        prefix, sep, rest = text.partition(":")
        if sep and prefix in self.ns and not rest.startswith("//"):
            return self.ns[prefix] + rest
        return text

    def value(self, raw: Any, where: str, *, iri: bool = False,
              allow_function: bool = True) -> ValueSpec:
        if isinstance(raw, Mapping):
            if "function" in raw:
                if not allow_function:
                    raise MappingError(f"{where}: nested function calls are not supported")
                return self.function(raw, where)
            if "value" in raw:
                return self.value(raw["value"], where, iri=iri, allow_function=allow_function)
            raise MappingError(f"{where}: cannot interpret value block {dict(raw)!r}")
        if isinstance(raw, (list, tuple)):
            if allow_function:
                raise MappingError(f"{where}: a list is only allowed as a function parameter")
            return Constant(tuple(str(x) for x in raw))
        if raw is None:
            raise MappingError(f"{where}: missing value")
        text = str(raw)
        if iri:
            text = self.expand_template_prefix(text)
        spec = parse_template(text)
        if iri and isinstance(spec, Constant):
            return Constant(self.expand(text, where))
        if iri and isinstance(spec, Template) and isinstance(spec.parts[0], str):
            head = spec.parts[0]
            prefix, sep, rest = head.partition(":")
            if not sep:
                raise MappingError(f"{where}: IRI template {text!r} has no scheme")
            if not rest.startswith("//") and prefix != "urn":
                raise MappingError(f"{where}: {UnknownPrefixError(prefix)}")
        return spec

    def function(self, raw: Mapping, where: str) -> FunctionCall:
        name = raw.get("function")
        if not isinstance(name, str) or not name.strip():
            raise MappingError(f"{where}: function name must be a string")
        params_raw = raw.get("parameters", raw.get("params", []))
        pairs: list[tuple[str, Any]] = []
        if isinstance(params_raw, Mapping):
            pairs = list(params_raw.items())
        elif isinstance(params_raw, list):
            for item in params_raw:
                if isinstance(item, Mapping) and "parameter" in item:
                    pairs.append((item["parameter"], item.get("value")))
                elif isinstance(item, (list, tuple)) and len(item) == 2:
                    pairs.append((item[0], item[1]))
                else:
                    raise MappingError(f"{where}: malformed function parameter {item!r}")
        else:
            raise MappingError(f"{where}: parameters must be a list or mapping")
        params = {}
        for pname, pval in pairs:
            pname = str(pname).split(":")[-1]
            if pname in params:
                raise MappingError(f"{where}: duplicate parameter {pname!r}")
            if pname == "base" and isinstance(pval, str):
                pval = self.expand_template_prefix(pval)
            params[pname] = self.value(pval, f"{where}.{pname}", allow_function=False)
        return FunctionCall(name.strip().split(":")[-1], tuple(sorted(params.items())))

    def sources(self, raw: Any) -> dict[str, SourceDecl]:
        out = {}
        if raw is None:
            return out
        if not isinstance(raw, Mapping):
            raise MappingError("'sources' must be a mapping of source id to declaration")
        for sid, decl in raw.items():
            out[str(sid)] = self.source_decl(str(sid), decl)
        return out

    def source_decl(self, sid: str, decl: Any) -> SourceDecl:
        if isinstance(decl, list) and len(decl) >= 1:
            decl = decl[0]
        if isinstance(decl, Mapping):
            path = decl.get("access")
            fmt = str(decl.get("referenceFormulation", "csv"))
        elif isinstance(decl, str):
            path, _, fmt = decl.partition("~")
            fmt = fmt or "csv"
        else:
            raise MappingError(f"source {sid!r}: malformed declaration")
        if not path:
            raise MappingError(f"source {sid!r}: missing path")
        if fmt.lower() != "csv":
            raise MappingError(f"source {sid!r}: only csv sources are supported, got {fmt!r}")
        return SourceDecl(sid, str(path), "csv")

    def triples_map(self, mid: str, raw: Any, sources: dict[str, SourceDecl]) -> TriplesMap:
        where = f"mapping {mid!r}"
        if not isinstance(raw, Mapping):
            raise MappingError(f"{where}: must be a mapping")
        unknown = set(raw) - self.MAP_KEYS
        if unknown:
            raise MappingError(f"{where}: unknown keys {sorted(unknown)}")
        src = raw.get("sources", raw.get("source"))
        if isinstance(src, list):
            if len(src) != 1:
                raise MappingError(f"{where}: exactly one source is supported")
            src = src[0]
        if src is None:
            if len(sources) != 1:
                raise MappingError(f"{where}: no source given")
            src = next(iter(sources))
        src = str(src)
        if src not in sources:
            if "~" in src or src.endswith(".csv"):
                decl = self.source_decl(f"{mid}-source", src)
                sources[decl.id] = decl
                src = decl.id
            else:
                raise MappingError(f"{where}: unknown source {src!r}")

        subj_raw = raw.get("s", raw.get("subject", raw.get("subjects")))
        if subj_raw is None:
            raise MappingError(f"{where}: subject missing")
        if isinstance(subj_raw, list):
            if len(subj_raw) != 1:
                raise MappingError(f"{where}: exactly one subject is supported")
            subj_raw = subj_raw[0]
        if isinstance(subj_raw, str) and subj_raw.endswith("~iri"):
            subj_raw = subj_raw[:-4]
        subject = self.value(subj_raw, f"{where} subject", iri=True)

        classes: list[Iri] = []
        rules: list[PredicateObjectRule] = []
        po_raw = raw.get("po", raw.get("predicateobjects", [])) or []
        if not isinstance(po_raw, list):
            raise MappingError(f"{where}: 'po' must be a list")
        for n, entry in enumerate(po_raw, start=1):
            for pred, obj_raw, kind, lang_raw, dtype_raw in self.po_entry(entry, f"{where} po[{n}]"):
                pw = f"{where} po[{n}]"
                predicate = self.expand(pred, pw)
                if predicate == RDF_TYPE and kind != "literal_forced":
                    if isinstance(obj_raw, str) and "$(" not in obj_raw:
                        classes.append(self.expand(obj_raw.removesuffix("~iri"), pw))
                        continue
                    kind = "iri"
                if kind == "literal_forced":
                    kind = "literal"
                rid = f"{mid}/po{len(rules) + 1}"
                obj = self.value(obj_raw, pw, iri=(kind == "iri"))
                lang = None
                if lang_raw is not None:
                    lang = self.value(lang_raw, f"{pw} language")
                dtype = self.expand(str(dtype_raw), pw) if dtype_raw is not None else None
                if lang is not None and dtype is not None:
                    raise MappingError(f"{pw}: both language and datatype given")
                if kind == "iri" and (lang is not None or dtype is not None):
                    raise MappingError(f"{pw}: language/datatype on an IRI object")
                rules.append(PredicateObjectRule(rid, predicate, obj, kind, lang, dtype))
        return TriplesMap(mid, src, subject, tuple(classes), tuple(rules))

    def po_entry(self, entry: Any, where: str):
        """Yield (predicate, raw object, kind, raw lang, raw datatype) tuples."""
        if isinstance(entry, list):
            if len(entry) not in (2, 3):
                raise MappingError(f"{where}: shorthand entries are [p, o] or [p, o, lang|datatype]")
            preds = entry[0] if isinstance(entry[0], list) else [entry[0]]
            objs = entry[1] if isinstance(entry[1], list) else [entry[1]]
            lang = dtype = None
            if len(entry) == 3:
                extra = str(entry[2])
                if extra.endswith("~lang"):
                    lang = extra[:-5]
                else:
                    dtype = extra
            for p in preds:
                for o in objs:
                    yield (str(p), *self._object_kind(o, lang, dtype, where))
            return
        if isinstance(entry, Mapping):
            unknown = set(entry) - {"p", "predicates", "o", "objects"}
            if unknown:
                raise MappingError(f"{where}: unknown keys {sorted(unknown)}")
            preds = entry.get("p", entry.get("predicates"))
            objs = entry.get("o", entry.get("objects"))
            if preds is None or objs is None:
                raise MappingError(f"{where}: both 'p' and 'o' are required")
            preds = preds if isinstance(preds, list) else [preds]
            objs = objs if isinstance(objs, list) else [objs]
            for p in preds:
                for o in objs:
                    yield (str(p), *self._object_kind(o, None, None, where))
            return
        raise MappingError(f"{where}: malformed predicate-object entry")

    def _object_kind(self, o: Any, lang: Any, dtype: Any, where: str):
        if isinstance(o, Mapping):
            block = dict(o)
            kind = str(block.pop("type", "literal"))
            if kind not in ("iri", "literal"):
                raise MappingError(f"{where}: object type must be 'iri' or 'literal'")
            lang = block.pop("language", lang)
            dtype = block.pop("datatype", dtype)
            if "function" not in block and "value" not in block:
                raise MappingError(f"{where}: object block needs 'value' or 'function'")
            allowed = {"function", "parameters", "params", "value"}
            if set(block) - allowed:
                raise MappingError(f"{where}: unknown object keys {sorted(set(block) - allowed)}")
            if kind == "literal" and "type" in o:
                kind = "literal_forced"
            return block if "function" in block else block["value"], kind, lang, dtype
        text = str(o)
        if text.endswith("~iri"):
            return text[:-4], "iri", lang, dtype
        if text.endswith("~literal"):
            return text[:-8], "literal_forced", lang, dtype
        return text, "literal", lang, dtype


def parse_mapping(text: str, base_dir: Optional[Path] = None) -> MappingDocument:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise MappingError(f"malformed mapping document: {exc}") from None
    if not isinstance(raw, Mapping):
        raise MappingError("mapping document must be a YAML mapping")
    unknown = set(raw) - _DocParser.TOP_KEYS
    if unknown:
        raise MappingError(f"unknown top-level keys: {sorted(unknown)}")
    prefixes = raw.get("prefixes") or {}
    if not isinstance(prefixes, Mapping):
        raise MappingError("'prefixes' must be a mapping")
    try:
        ns = NamespaceTable({str(k): str(v) for k, v in prefixes.items()})
    except InvalidTermError as exc:
        raise MappingError(f"bad prefix namespace: {exc}") from None
    p = _DocParser(ns)
    sources = p.sources(raw.get("sources"))
    maps_raw = raw.get("mappings")
    if not isinstance(maps_raw, Mapping) or not maps_raw:
        raise MappingError("'mappings' must be a non-empty mapping")
    maps = [p.triples_map(str(mid), body, sources) for mid, body in maps_raw.items()]
    return MappingDocument(
        prefixes=dict(ns),
        sources=tuple(sorted(sources.values(), key=lambda s: s.id)),
        maps=tuple(sorted(maps, key=lambda m: m.id)),
        base_dir=base_dir,
    )


def load_mapping(path: Union[str, Path]) -> MappingDocument:
    path = Path(path)
    return parse_mapping(path.read_text(encoding="utf-8"), base_dir=path.parent)


def validate_mapping(doc: MappingDocument, known_functions: Mapping | set,
                     table_header: Optional[Sequence[str]]) -> list[str]:
    """Check function names (error) and column references (warning)."""
    for tm in doc.maps:
        for rule_id, spec in rule_specs(tm):
            if isinstance(spec, FunctionCall):
                if spec.name not in known_functions:
                    raise MappingError(f"{rule_id}: unknown function {spec.name!r}")
                expected = getattr(known_functions, "get", lambda _n: None)(spec.name)
                params = getattr(expected, "params", None)
                if params is not None and set(params) != set(spec.param_map):
                    raise MappingError(
                        f"{rule_id}: function {spec.name!r} takes parameters "
                        f"{sorted(params)}, got {sorted(spec.param_map)}")
    if table_header is None:
        return []
    header = set(table_header)
    warnings = []
    for tm in doc.maps:
        for rule_id, spec in rule_specs(tm):
            for col in column_refs(spec):
                if col not in header:
                    warnings.append(f"{rule_id}: column {col!r} not present in input table")
    return warnings


# -- run configuration -------------------------------------------------------

OUTPUT_FORMATS = ("ntriples", "turtle")
GLOBAL_SECTION = "CONFIGURATION"


@dataclass(frozen=True)
class DatasetSection:
    section_name: str
    mapping_path: Path
    input_path: Path


@dataclass(frozen=True)
class RunConfig:
    output_path: Path
    output_format: str
    datasets: tuple[DatasetSection, ...]


def parse_run_config(text: str, base_dir: Optional[Path] = None) -> RunConfig:
    """Parse the INI run configuration; relative paths resolve against ``base_dir``."""
    cp = configparser.ConfigParser(interpolation=None, strict=True,
                                   delimiters=("=",), comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]") from None
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in section [{exc.section}]") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None

    def resolve(value: str) -> Path:
        p = Path(value.strip())
        return p if p.is_absolute() or base_dir is None else base_dir / p

    fmt = "ntriples"
    out = None
    if cp.has_section(GLOBAL_SECTION):
        g = cp[GLOBAL_SECTION]
        unknown = set(g) - {"output_file", "output_format"}
        if unknown:
            raise ConfigError(f"[{GLOBAL_SECTION}]: unknown keys {sorted(unknown)}")
        fmt = g.get("output_format", fmt).strip() or fmt
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(f"[{GLOBAL_SECTION}]: output_format must be one of {OUTPUT_FORMATS}")
        if g.get("output_file", "").strip():
            out = resolve(g["output_file"])
    if out is None:
        out = resolve("knowledge-graph")
    if not out.suffix:
        out = out.with_suffix(".nt" if fmt == "ntriples" else ".ttl")

    datasets = []
    for name in cp.sections():
        if name == GLOBAL_SECTION:
            continue
        sec = cp[name]
        for key in ("mappings", "file_path"):
            if not sec.get(key, "").strip():
                raise ConfigError(f"section [{name}] is missing mandatory key {key!r}")
        unknown = set(sec) - {"mappings", "file_path"}
        if unknown:
            raise ConfigError(f"section [{name}]: unknown keys {sorted(unknown)}")
        datasets.append(DatasetSection(name, resolve(sec["mappings"]), resolve(sec["file_path"])))
    if not datasets:
        raise ConfigError("configuration declares no dataset sections")
    return RunConfig(out, fmt, tuple(datasets))


def load_run_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    return parse_run_config(path.read_text(encoding="utf-8"), base_dir=path.parent)
