"""JSON-LD writer. Output is expanded per node (full IRIs as keys) inside a
top-level ``@graph``, with the namespace table echoed as ``@context``."""
from __future__ import annotations

import json
from collections import defaultdict
from typing import Iterable, Optional

from .namespaces import NamespaceTable
from .ntriples import term_to_nt
from .terms import RDF_TYPE, BlankNode, Iri, Literal, Term, Triple


def _node_id(term: Term) -> str:
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return term.value


def _value(term: Term) -> dict:
    if isinstance(term, Literal):
        out = {"@value": term.lexical}
        if term.lang:
            out["@language"] = term.lang
        elif term.datatype is not None:
            out["@type"] = term.datatype.value
        return out
    return {"@id": _node_id(term)}


def serialize_jsonld(triples: Iterable[Triple], ns: Optional[NamespaceTable] = None) -> str:
    ns = ns if ns is not None else NamespaceTable()
    nodes: dict = defaultdict(lambda: defaultdict(list))
    for t in triples:
        nodes[t.subject][t.predicate].append(t.object)

    graph = []
    for s in sorted(nodes, key=term_to_nt):
        node: dict = {"@id": _node_id(s)}
        props = nodes[s]
        for p in sorted(props, key=term_to_nt):
            objs = sorted(props[p], key=term_to_nt)
            if p == RDF_TYPE and all(isinstance(o, Iri) for o in objs):
                node["@type"] = [o.value for o in objs]
            else:
                node[p.value] = [_value(o) for o in objs]
        graph.append(node)

    doc = {"@context": {k: ns[k] for k in sorted(ns)}, "@graph": graph}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
