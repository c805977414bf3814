"""RDF/XML writer using ``rdf:Description`` blocks, one per subject."""
from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterable, Optional
from xml.sax.saxutils import escape, quoteattr

from .namespaces import RDF, NamespaceTable
from .ntriples import term_to_nt
from .terms import BlankNode, Iri, Literal, Triple

_NCNAME_TAIL = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*$")
_NCNAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")
_XML_INVALID = re.compile(r"[\x00-\x08\x0b\x0c\x0e-\x1f]")


class RdfXmlError(ValueError):
    pass


def _split_predicate(iri: Iri) -> tuple[str, str]:
    m = _NCNAME_TAIL.search(iri.value)
    if not m or m.start() == 0:
        raise RdfXmlError(f"predicate cannot be written as an XML QName: {iri.value}")
    return iri.value[:m.start()], m.group()


def _text(value: str) -> str:
    if _XML_INVALID.search(value):
        raise RdfXmlError("literal contains characters not representable in XML 1.0")
    return escape(value, {"\r": "&#13;"})


def _attr(value: str) -> str:
    if _XML_INVALID.search(value):
        raise RdfXmlError("value contains characters not representable in XML 1.0")
    return quoteattr(value, {"\n": "&#10;", "\r": "&#13;", "\t": "&#9;"})


def serialize_rdfxml(triples: Iterable[Triple], ns: Optional[NamespaceTable] = None) -> str:
    ns = ns if ns is not None else NamespaceTable()
    by_subject: dict = defaultdict(list)
    for t in triples:
        by_subject[t.subject].append(t)

    # prefix assignment: declared prefixes first, then generated ns0, ns1, ...
    known = {v: k for k, v in sorted(ns.items(), reverse=True) if _NCNAME.match(k)}
    used: dict[str, str] = {"rdf": RDF}
    generated = 0

    def qname(iri: Iri) -> str:
        nonlocal generated
        namespace, local = _split_predicate(iri)
        prefix = known.get(namespace)
        if prefix is None or (prefix in used and used[prefix] != namespace):
            prefix = next((p for p, n in used.items() if n == namespace), None)
            if prefix is None:
                prefix = f"ns{generated}"
                generated += 1
                known[namespace] = prefix
        used[prefix] = namespace
        return f"{prefix}:{local}"

    body = []
    for s in sorted(by_subject, key=term_to_nt):
        if isinstance(s, BlankNode):
            about = f"rdf:nodeID={_attr(s.label)}"
        else:
            about = f"rdf:about={_attr(s.value)}"
        body.append(f"  <rdf:Description {about}>")
        for t in sorted(by_subject[s], key=lambda t: (term_to_nt(t.predicate), term_to_nt(t.object))):
            tag = qname(t.predicate)
            o = t.object
            if isinstance(o, Iri):
                body.append(f"    <{tag} rdf:resource={_attr(o.value)}/>")
            elif isinstance(o, BlankNode):
                body.append(f"    <{tag} rdf:nodeID={_attr(o.label)}/>")
            else:
                attrs = ""
                if o.lang:
                    attrs = f" xml:lang={_attr(o.lang)}"
                elif o.datatype is not None:
                    attrs = f" rdf:datatype={_attr(o.datatype.value)}"
                body.append(f"    <{tag}{attrs}>{_text(o.lexical)}</{tag}>")
        body.append("  </rdf:Description>")

    decls = "".join(f"\n    xmlns:{p}={_attr(n)}" for p, n in sorted(used.items()))
    head = f'<?xml version="1.0" encoding="utf-8"?>\n<rdf:RDF{decls}>'
    return "\n".join([head, *body, "</rdf:RDF>"]) + "\n"
