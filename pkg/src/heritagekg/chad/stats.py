"""Triple, entity, class, property and model-usage counts for a graph."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..rdf import RDF_TYPE, Graph, Iri, NamespaceTable
from .catalogue import MODEL_PREFIXES, model_of


@dataclass
class StatsReport:
    triple_count: int = 0
    # entities are the distinct IRIs in subject position
    entity_count: int = 0
    class_histogram: dict[str, int] = field(default_factory=dict)
    property_histogram: dict[str, int] = field(default_factory=dict)
    model_usage: dict[str, int] = field(default_factory=dict)

    @property
    def distinct_classes_used(self) -> int:
        return len(self.class_histogram)

    @property
    def distinct_properties_used(self) -> int:
        return len(self.property_histogram)

    @property
    def statements_per_entity(self) -> Fraction:
        if not self.entity_count:
            return Fraction(0)
        return Fraction(self.triple_count, self.entity_count)

    @property
    def avg_statements_per_entity(self) -> float:
        return float(round(self.statements_per_entity, 2))

    def to_dict(self) -> dict:
        return {
            "triple_count": self.triple_count,
            "entity_count": self.entity_count,
            "distinct_classes_used": self.distinct_classes_used,
            "distinct_properties_used": self.distinct_properties_used,
            "avg_statements_per_entity": self.avg_statements_per_entity,
            "class_histogram": self.class_histogram,
            "property_histogram": self.property_histogram,
            "model_usage": self.model_usage,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "StatsReport":
        return cls(data["triple_count"], data["entity_count"], dict(data["class_histogram"]),
                   dict(data["property_histogram"]), dict(data["model_usage"]))


def _sorted_counts(counter: Counter) -> dict[str, int]:
    # most frequent first, ties by IRI, so chart order is stable
    return dict(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0])))


def model_usage(g: Graph, ns: Optional[NamespaceTable] = None) -> dict[str, int]:
    """References per model: each predicate IRI and each object IRI that falls
    in a model namespace counts once. ``rdf:type`` objects are object IRIs, so
    class usage is included without being counted twice."""
    ns = ns if ns is not None else NamespaceTable()
    usage = dict.fromkeys(MODEL_PREFIXES, 0)
    cache: dict[Iri, Optional[str]] = {}

    def bump(iri: Iri) -> None:
        if iri not in cache:
            cache[iri] = model_of(iri, ns)
        model = cache[iri]
        if model is not None:
            usage[model] += 1

    for t in g:
        bump(t.predicate)
        if isinstance(t.object, Iri):
            bump(t.object)
    return usage


def compute_stats(g: Graph, ns: Optional[NamespaceTable] = None) -> StatsReport:
    properties: Counter = Counter()
    classes: Counter = Counter()
    typed: set = set()
    entities: set = set()
    for t in g:
        properties[t.predicate.value] += 1
        if isinstance(t.subject, Iri):
            entities.add(t.subject)
            if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
                if (t.subject, t.object) not in typed:
                    typed.add((t.subject, t.object))
                    classes[t.object.value] += 1
    return StatsReport(
        triple_count=len(g),
        entity_count=len(entities),
        class_histogram=_sorted_counts(classes),
        property_histogram=_sorted_counts(properties),
        model_usage=model_usage(g, ns),
    )
