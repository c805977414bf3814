"""RDF term types: IRIs, literals and blank nodes."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_FORBIDDEN = re.compile(r'[\s<>"]')
_BNODE_LABEL = re.compile(r"^[A-Za-z0-9_]+$")
_LANG = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")


class InvalidTermError(ValueError):
    pass


class InvalidLiteralError(InvalidTermError):
    pass


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME.match(self.value) or _FORBIDDEN.search(self.value):
            raise InvalidTermError(f"not an absolute IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self) -> None:
        if not _BNODE_LABEL.match(self.label):
            raise InvalidTermError(f"invalid blank node label: {self.label!r}")

    def __str__(self) -> str:
        return "_:" + self.label


XSD_STRING = Iri(XSD + "string")
XSD_DATETIME = Iri(XSD + "dateTime")
XSD_INTEGER = Iri(XSD + "integer")
XSD_DECIMAL = Iri(XSD + "decimal")
XSD_DOUBLE = Iri(XSD + "double")
XSD_BOOLEAN = Iri(XSD + "boolean")
RDF_LANGSTRING = Iri(RDF_NS + "langString")
RDF_TYPE = Iri(RDF_NS + "type")


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal. ``xsd:string`` datatypes are folded to the plain form and
    language tags are lowercased, so equal RDF terms compare equal."""

    lexical: str
    lang: Optional[str] = None
    datatype: Optional[Iri] = None

    def __post_init__(self) -> None:
        if self.lang is not None and self.datatype is not None:
            raise InvalidLiteralError(
                f"literal {self.lexical!r} has both a language tag and a datatype"
            )
        if self.lang is not None:
            if not _LANG.match(self.lang):
                raise InvalidLiteralError(f"invalid language tag: {self.lang!r}")
            object.__setattr__(self, "lang", self.lang.lower())
        if self.datatype == XSD_STRING:
            object.__setattr__(self, "datatype", None)

    @property
    def effective_datatype(self) -> Iri:
        if self.lang is not None:
            return RDF_LANGSTRING
        return self.datatype or XSD_STRING

    def __str__(self) -> str:
        return self.lexical


Term = Union[Iri, Literal, BlankNode]
Subject = Union[Iri, BlankNode]


class Triple(NamedTuple):
    subject: Subject
    predicate: Iri
    object: Term


def make_literal(lexical: str, lang: Optional[str] = None,
                 datatype: Optional[Iri] = None) -> Literal:
    return Literal(lexical, lang, datatype)


def make_triple(s: Subject, p: Iri, o: Term) -> Triple:
    if not isinstance(s, (Iri, BlankNode)):
        raise InvalidTermError(f"subject must be an IRI or blank node, got {s!r}")
    if not isinstance(p, Iri):
        raise InvalidTermError(f"predicate must be an IRI, got {p!r}")
    if not isinstance(o, (Iri, BlankNode, Literal)):
        raise InvalidTermError(f"object must be an RDF term, got {o!r}")
    return Triple(s, p, o)
