"""RDF data model, graph container, serializers and parsers."""
from __future__ import annotations

from typing import Iterable, Optional

from .graph import Graph, graph_insert, graph_merge
from .jsonld import serialize_jsonld
from .namespaces import (BUILTIN_PREFIXES, NamespaceTable, UnknownPrefixError,
                         expand_curie)
from .ntriples import RdfSyntaxError, parse_ntriples, serialize_ntriples, term_to_nt
from .rdfxml import serialize_rdfxml
from .terms import (RDF_TYPE, XSD_DATETIME, XSD_STRING, BlankNode, InvalidLiteralError,
                    InvalidTermError, Iri, Literal, Term, Triple, make_literal,
                    make_triple)
from .turtle import parse_turtle, serialize_turtle

FORMATS = ("ntriples", "turtle", "jsonld", "rdfxml")
PARSEABLE_FORMATS = ("ntriples", "turtle")

EXTENSIONS = {"ntriples": ".nt", "turtle": ".ttl", "jsonld": ".jsonld", "rdfxml": ".rdf"}
MEDIA_TYPES = {
    "ntriples": "application/n-triples",
    "turtle": "text/turtle",
    "jsonld": "application/ld+json",
    "rdfxml": "application/rdf+xml",
}


def serialize(g: Iterable[Triple], format: str = "ntriples",
              ns: Optional[NamespaceTable] = None) -> str:
    if format == "ntriples":
        return serialize_ntriples(g)
    if format == "turtle":
        return serialize_turtle(g, ns)
    if format == "jsonld":
        return serialize_jsonld(g, ns)
    if format == "rdfxml":
        return serialize_rdfxml(g, ns)
    raise ValueError(f"unknown RDF format: {format!r}")


def parse(text: str, format: str = "ntriples") -> Graph:
    if format == "ntriples":
        return parse_ntriples(text)
    if format == "turtle":
        return parse_turtle(text)
    raise ValueError(f"cannot parse format {format!r}; readable formats: {PARSEABLE_FORMATS}")


def format_for_path(path) -> str:
    suffix = str(path).rsplit(".", 1)[-1].lower()
    for fmt, ext in EXTENSIONS.items():
        if ext[1:] == suffix:
            return fmt
    raise ValueError(f"cannot infer RDF format from file name {path!s}")


__all__ = [
    "BUILTIN_PREFIXES", "EXTENSIONS", "FORMATS", "MEDIA_TYPES", "PARSEABLE_FORMATS",
    "RDF_TYPE", "XSD_DATETIME", "XSD_STRING", "BlankNode", "Graph", "InvalidLiteralError",
    "InvalidTermError", "Iri", "Literal", "NamespaceTable", "RdfSyntaxError", "Term",
    "Triple", "UnknownPrefixError", "expand_curie", "format_for_path", "graph_insert",
    "graph_merge", "make_literal", "make_triple", "parse", "parse_ntriples",
    "parse_turtle", "serialize", "serialize_jsonld", "serialize_ntriples",
    "serialize_rdfxml", "serialize_turtle", "term_to_nt",
]
