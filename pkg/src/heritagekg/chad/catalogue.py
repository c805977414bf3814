"""Catalogue of the reused classes, properties and individuals."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional, Union

from ..rdf import Iri, NamespaceTable, UnknownPrefixError, expand_curie

# model name -> prefix in the namespace table; order is the reporting order
MODEL_PREFIXES = {"CIDOC-CRM": "crm", "LRMoo": "lrmoo", "CRMdig": "crmdig", "AAT": "aat"}
KINDS = ("class", "property", "individual")


class CatalogueError(ValueError):
    pass


def model_of(iri: Iri, ns: Optional[NamespaceTable] = None) -> Optional[str]:
    """Name of the model whose namespace is the longest prefix of ``iri``."""
    ns = ns if ns is not None else NamespaceTable()
    best, best_len = None, -1
    for model, prefix in MODEL_PREFIXES.items():
        namespace = ns.get(prefix)
        if namespace and iri.value.startswith(namespace) and len(namespace) > best_len:
            best, best_len = model, len(namespace)
    return best


@dataclass(frozen=True)
class VocabularyTerm:
    iri: Iri
    kind: str
    model: str
    label: str


class VocabularyCatalogue:
    def __init__(self, terms):
        self._terms: dict[Iri, VocabularyTerm] = {}
        for term in terms:
            if term.iri in self._terms:
                raise CatalogueError(f"duplicate catalogue term {term.iri.value}")
            self._terms[term.iri] = term

    @property
    def terms(self) -> list[VocabularyTerm]:
        return list(self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[VocabularyTerm]:
        return iter(self._terms.values())

    def __contains__(self, iri) -> bool:
        return iri in self._terms

    def get(self, iri: Iri) -> Optional[VocabularyTerm]:
        return self._terms.get(iri)

    def of_kind(self, kind: str) -> list[VocabularyTerm]:
        return [t for t in self._terms.values() if t.kind == kind]


def _read_terms(fh, source: str, ns: NamespaceTable) -> list[VocabularyTerm]:
    reader = csv.DictReader(fh)
    if reader.fieldnames != ["iri", "kind", "model", "label"]:
        raise CatalogueError(f"{source}: header must be iri,kind,model,label")
    terms = []
    for line, row in enumerate(reader, start=2):
        try:
            iri = expand_curie(row["iri"], ns) if "://" not in row["iri"] else Iri(row["iri"])
        except (UnknownPrefixError, ValueError) as exc:
            raise CatalogueError(f"{source}:{line}: {exc}") from None
        if row["kind"] not in KINDS:
            raise CatalogueError(f"{source}:{line}: unknown kind {row['kind']!r}")
        expected = model_of(iri, ns)
        if row["model"] != expected:
            raise CatalogueError(
                f"{source}:{line}: {iri.value} is in the {expected} namespace, not {row['model']}")
        terms.append(VocabularyTerm(iri, row["kind"], row["model"], row["label"]))
    return terms


def load_catalogue(path: Union[str, Path], ns: Optional[NamespaceTable] = None) -> VocabularyCatalogue:
    ns = ns if ns is not None else NamespaceTable()
    with open(path, encoding="utf-8", newline="") as fh:
        return VocabularyCatalogue(_read_terms(fh, str(path), ns))


@lru_cache(maxsize=1)
def builtin_catalogue() -> VocabularyCatalogue:
    data = resources.files(__package__) / "data" / "catalogue.csv"
    with data.open(encoding="utf-8", newline="") as fh:
        return VocabularyCatalogue(_read_terms(fh, "catalogue.csv", NamespaceTable()))
