"""Cardinality rules over typed focus nodes and a small validator."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Union

import yaml

from ..rdf import (RDF_TYPE, Graph, Iri, NamespaceTable, Term, UnknownPrefixError, expand_curie,
                   term_to_nt)

OUTBOUND, INBOUND = "outbound", "inbound"


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class ShapeRule:
    id: str
    focus_class: Iri
    path: Iri
    direction: str = OUTBOUND
    min: int = 0
    max: Optional[int] = None
    # any-of: an edge counts when its far end has at least one of these types
    object_class: tuple[Iri, ...] = ()

    def __post_init__(self):
        if self.direction not in (OUTBOUND, INBOUND):
            raise ShapeError(f"rule {self.id}: direction must be outbound or inbound")
        if self.min < 0 or (self.max is not None and self.max < self.min):
            raise ShapeError(f"rule {self.id}: need 0 <= min <= max")

    def accepts(self, count: int) -> bool:
        return count >= self.min and (self.max is None or count <= self.max)

    def describe(self) -> str:
        upper = "*" if self.max is None else str(self.max)
        if self.direction == INBOUND:
            edge, end = "incoming", "from"
        else:
            edge, end = "outgoing", "to"
        target = " or ".join(c.value for c in self.object_class) or "any node"
        return f"{self.min}..{upper} {edge} {self.path.value} edge(s) {end} {target}"


@dataclass(frozen=True)
class Violation:
    focus_node: Term
    rule_id: str
    found_count: int
    message: str

    def to_dict(self) -> dict:
        return {"focus_node": str(self.focus_node), "rule_id": self.rule_id,
                "found_count": self.found_count, "message": self.message}


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"conforms": self.conforms, "violations": [v.to_dict() for v in self.violations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)


def _iri(value, ns: NamespaceTable, where: str) -> Iri:
    if not isinstance(value, str) or not value:
        raise ShapeError(f"{where}: expected an IRI or CURIE, got {value!r}")
    try:
        return Iri(value) if "://" in value else expand_curie(value, ns)
    except (UnknownPrefixError, ValueError) as exc:
        raise ShapeError(f"{where}: {exc}") from None


def parse_shapes(text: str, ns: Optional[NamespaceTable] = None) -> list[ShapeRule]:
    """Read rules from YAML: an optional ``prefixes`` map plus a ``rules`` list."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ShapeError(f"invalid YAML: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("rules"), list):
        raise ShapeError("shape file must be a mapping with a 'rules' list")
    ns = (ns if ns is not None else NamespaceTable()).copy()
    for prefix, namespace in (doc.get("prefixes") or {}).items():
        ns.bind(prefix, namespace)
    rules, seen = [], set()
    for i, entry in enumerate(doc["rules"]):
        if not isinstance(entry, dict):
            raise ShapeError(f"rule #{i + 1} must be a mapping")
        unknown = set(entry) - {"id", "focus", "path", "direction", "min", "max", "object_class"}
        if unknown:
            raise ShapeError(f"rule #{i + 1}: unknown keys {sorted(unknown)}")
        rid = entry.get("id")
        if not isinstance(rid, str) or not rid:
            raise ShapeError(f"rule #{i + 1}: missing id")
        if rid in seen:
            raise ShapeError(f"duplicate rule id {rid!r}")
        seen.add(rid)
        classes = entry.get("object_class") or []
        if isinstance(classes, str):
            classes = [classes]
        bounds = [entry.get("min", 0), entry.get("max")]
        if not isinstance(bounds[0], int) or not (bounds[1] is None or isinstance(bounds[1], int)):
            raise ShapeError(f"rule {rid}: min/max must be integers")
        rules.append(ShapeRule(
            id=rid,
            focus_class=_iri(entry.get("focus"), ns, f"rule {rid} focus"),
            path=_iri(entry.get("path"), ns, f"rule {rid} path"),
            direction=entry.get("direction", OUTBOUND),
            min=bounds[0],
            max=bounds[1],
            object_class=tuple(_iri(c, ns, f"rule {rid} object_class") for c in classes),
        ))
    return rules


def load_shapes(path: Union[str, Path], ns: Optional[NamespaceTable] = None) -> list[ShapeRule]:
    return parse_shapes(Path(path).read_text(encoding="utf-8"), ns)


@lru_cache(maxsize=1)
def _builtin() -> tuple[ShapeRule, ...]:
    text = (resources.files(__package__) / "data" / "shapes.yaml").read_text(encoding="utf-8")
    return tuple(parse_shapes(text))


def builtin_shapes() -> list[ShapeRule]:
    return list(_builtin())


def _count(g: Graph, rule: ShapeRule, node: Term) -> int:
    if rule.direction == OUTBOUND:
        ends = (t.object for t in g.triples(node, rule.path, None))
    else:
        ends = (t.subject for t in g.triples(None, rule.path, node))
    if not rule.object_class:
        return sum(1 for _ in ends)
    return sum(1 for end in ends
               if any((end, RDF_TYPE, cls) in g for cls in rule.object_class))


def validate(g: Graph, rules: Iterable[ShapeRule]) -> ValidationReport:
    report = ValidationReport()
    for rule in rules:
        focus_nodes = sorted({t.subject for t in g.triples(None, RDF_TYPE, rule.focus_class)},
                             key=term_to_nt)
        for node in focus_nodes:
            found = _count(g, rule, node)
            if not rule.accepts(found):
                report.violations.append(Violation(
                    node, rule.id, found,
                    f"{rule.id}: found {found} edge(s), expected {rule.describe()}"))
    return report
