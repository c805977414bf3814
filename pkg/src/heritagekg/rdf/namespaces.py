from __future__ import annotations

from typing import Iterator, Mapping, Optional

from .terms import Iri

CRM = "http://www.cidoc-crm.org/cidoc-crm/"
LRMOO = "http://iflastandards.info/ns/lrm/lrmoo/"
CRMDIG = "http://www.ics.forth.gr/isl/CRMdig/"
AAT = "http://vocab.getty.edu/aat/"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"

BUILTIN_PREFIXES = {
    "crm": CRM,
    "lrmoo": LRMOO,
    "crmdig": CRMDIG,
    "aat": AAT,
    "rdf": RDF,
    "rdfs": RDFS,
    "xsd": XSD,
}


class UnknownPrefixError(KeyError):
    def __init__(self, prefix: str) -> None:
        super().__init__(prefix)
        self.prefix = prefix

    def __str__(self) -> str:
        return f"unknown prefix: {self.prefix!r}"


class NamespaceTable(Mapping[str, str]):
    """Prefix -> namespace IRI table. The built-in prefixes are always present
    but may be rebound."""

    def __init__(self, entries: Optional[Mapping[str, str]] = None,
                 builtins: bool = True) -> None:
        self._entries: dict[str, str] = dict(BUILTIN_PREFIXES) if builtins else {}
        for prefix, ns in (entries or {}).items():
            self.bind(prefix, ns)

    def bind(self, prefix: str, namespace: str) -> None:
        Iri(namespace)  # validates
        self._entries[prefix] = namespace

    def __getitem__(self, prefix: str) -> str:
        return self._entries[prefix]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        return f"NamespaceTable({self._entries!r})"

    def copy(self) -> "NamespaceTable":
        return NamespaceTable(self._entries, builtins=False)

    def expand(self, curie: str) -> Iri:
        return expand_curie(curie, self)

    def compact(self, iri: Iri) -> Optional[tuple[str, str]]:
        """Return (prefix, local) for the longest matching namespace, or None."""
        best = None
        for prefix, ns in self._entries.items():
            if iri.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                best = (prefix, ns)
        if best is None:
            return None
        return best[0], iri.value[len(best[1]):]


def expand_curie(curie: str, ns: Mapping[str, str]) -> Iri:
    prefix, sep, local = curie.partition(":")
    if not sep:
        raise ValueError(f"not a CURIE: {curie!r}")
    try:
        return Iri(ns[prefix] + local)
    except KeyError:
        raise UnknownPrefixError(prefix) from None
