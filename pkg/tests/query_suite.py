"""Shared SELECT queries, each paired with a hand-written oracle spec.

The oracle side never goes through the query parser: patterns are spelled
out as tuples (strings starting with ``?`` are variables) and filters are
plain Python predicates over the bindings.
"""
from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

from heritagekg.rdf import Iri, Literal
from heritagekg.rdf.namespaces import AAT, CRM, LRMOO, RDFS
from heritagekg.rdf.terms import RDF_TYPE

from .oracles import brute_force_bgp

EX = "https://example.org/heritage/"
A = RDF_TYPE
LABEL = Iri(RDFS + "label")


def crm(local):
    return Iri(CRM + local)


def lrm(local):
    return Iri(LRMOO + local)


@dataclass(frozen=True)
class QueryCase:
    name: str
    text: str
    patterns: tuple
    columns: tuple
    keep: Optional[Callable[[dict], bool]] = None
    distinct: bool = False
    limit: Optional[int] = None
    offset: Optional[int] = None

    @property
    def modified(self) -> bool:
        return self.limit is not None or self.offset is not None


def _lit_text(t) -> Optional[str]:
    # bare regex() only sees plain and language-tagged literals
    return t.lexical if isinstance(t, Literal) and t.datatype is None else None


def _str(t) -> str:
    return t.lexical if isinstance(t, Literal) else t.value


ALL = ("?s", "?p", "?o")

SUITE = [
    QueryCase("all-triples", "SELECT * WHERE { ?s ?p ?o }", (ALL,), ALL),
    QueryCase("typed-entities", "SELECT ?s ?c WHERE { ?s a ?c . }", (("?s", A, "?c"),),
              ("?s", "?c")),
    QueryCase("works", "SELECT ?w WHERE { ?w a lrmoo:F1_Work . }",
              (("?w", A, lrm("F1_Work")),), ("?w",)),
    QueryCase("work-title-join",
              "SELECT ?w ?t WHERE { ?t crm:P102i_is_title_of ?w . ?w a lrmoo:F1_Work }",
              (("?t", crm("P102i_is_title_of"), "?w"), ("?w", A, lrm("F1_Work"))), ("?w", "?t")),
    QueryCase("title-content", "SELECT ?t ?c WHERE { ?t crm:P190_has_symbolic_content ?c }",
              (("?t", crm("P190_has_symbolic_content"), "?c"),), ("?t", "?c")),
    QueryCase("expression-to-title-text",
              "SELECT ?e ?text WHERE { ?e lrmoo:R3i_realises ?w . ?t crm:P102i_is_title_of ?w . "
              "?t crm:P190_has_symbolic_content ?text . }",
              (("?e", lrm("R3i_realises"), "?w"), ("?t", crm("P102i_is_title_of"), "?w"),
               ("?t", crm("P190_has_symbolic_content"), "?text")), ("?e", "?text")),
    QueryCase("item-to-expression",
              "SELECT ?i ?e WHERE { ?i lrmoo:R7_exemplifies ?m . ?m lrmoo:R4_embodies ?e . "
              "?i a lrmoo:F5_Item }",
              (("?i", lrm("R7_exemplifies"), "?m"), ("?m", lrm("R4_embodies"), "?e"),
               ("?i", A, lrm("F5_Item"))), ("?i", "?e")),
    QueryCase("distinct-predicates", "SELECT DISTINCT ?p WHERE { ?s ?p ?o }", (ALL,), ("?p",),
              distinct=True),
    QueryCase("distinct-classes", "select distinct ?c where { ?x a ?c }", (("?x", A, "?c"),),
              ("?c",), distinct=True),
    QueryCase("label-subjects", "SELECT ?s WHERE { ?s ?p ?o FILTER(?p = rdfs:label) }", (ALL,),
              ("?s",), keep=lambda b: b["?p"] == LABEL),
    QueryCase("literal-equality",
              'SELECT ?s WHERE { ?s rdfs:label ?l . FILTER("Volume a stampa"@it = ?l) }',
              (("?s", LABEL, "?l"),), ("?s",),
              keep=lambda b: b["?l"] == Literal("Volume a stampa", lang="it")),
    QueryCase("label-regex-ci", 'SELECT ?s ?l WHERE { ?s rdfs:label ?l FILTER regex(?l, "^volume", "i") }',
              (("?s", LABEL, "?l"),), ("?s", "?l"),
              keep=lambda b: re.search("^volume", _lit_text(b["?l"]) or "", re.I) is not None),
    QueryCase("iri-regex-str", 'SELECT ?s ?c WHERE { ?s a ?c FILTER (regex(str(?s), "/obj1/")) }',
              (("?s", A, "?c"),), ("?s", "?c"), keep=lambda b: "/obj1/" in _str(b["?s"])),
    QueryCase("regex-no-match", 'SELECT * WHERE { ?s ?p ?o FILTER regex(?o, "zzz-never") }',
              (ALL,), ALL, keep=lambda b: False),
    QueryCase("regex-literals-only", 'SELECT ?s ?o WHERE { ?s ?p ?o FILTER regex(?o, "o") }',
              (ALL,), ("?s", "?o"),
              keep=lambda b: _lit_text(b["?o"]) is not None and "o" in _lit_text(b["?o"])),
    QueryCase("limit", "SELECT * WHERE { ?s ?p ?o } LIMIT 5", (ALL,), ALL, limit=5),
    QueryCase("offset-limit", "SELECT ?s ?p WHERE { ?s ?p ?o } OFFSET 3 LIMIT 4", (ALL,),
              ("?s", "?p"), limit=4, offset=3),
    QueryCase("semicolon", "SELECT ?x ?w WHERE { ?x a crm:E35_Title ; crm:P102i_is_title_of ?w . }",
              (("?x", A, crm("E35_Title")), ("?x", crm("P102i_is_title_of"), "?w")), ("?x", "?w")),
    QueryCase("comma", "PREFIX g: <http://vocab.getty.edu/aat/>\n"
              "SELECT ?act WHERE { ?act crm:P32_used_general_technique g:300000002 , g:300000003 }",
              (("?act", crm("P32_used_general_technique"), Iri(AAT + "300000002")),
               ("?act", crm("P32_used_general_technique"), Iri(AAT + "300000003"))), ("?act",)),
    QueryCase("two-hop-path", "SELECT ?a ?b ?c WHERE { ?a ?p1 ?b . ?b ?p2 ?c }",
              (("?a", "?p1", "?b"), ("?b", "?p2", "?c")), ("?a", "?b", "?c")),
    QueryCase("typed-literal-needs-str",
              'SELECT ?ts WHERE { ?ts crm:P82a_begin_of_the_begin ?d FILTER regex(?d, "^") }',
              (("?ts", crm("P82a_begin_of_the_begin"), "?d"),), ("?ts",), keep=lambda b: False),
    QueryCase("self-loop", "SELECT ?x WHERE { ?x ?p ?x }", (("?x", "?p", "?x"),), ("?x",)),
    QueryCase("datetime-regex",
              'SELECT ?ts ?d WHERE { ?ts crm:P82a_begin_of_the_begin ?d FILTER regex(str(?d), "^1[0-9]|^20") }',
              (("?ts", crm("P82a_begin_of_the_begin"), "?d"),), ("?ts", "?d"),
              keep=lambda b: re.search("^1[0-9]|^20", b["?d"].lexical) is not None),
    QueryCase("base-relative", "BASE <https://example.org/heritage/>\n"
              "SELECT ?p ?o WHERE { <obj1/work> ?p ?o }",
              ((Iri(EX + "obj1/work"), "?p", "?o"),), ("?p", "?o")),
    QueryCase("ground-pattern",
              "SELECT ?w WHERE { ?w a lrmoo:F1_Work . <https://example.org/heritage/obj1/work> a lrmoo:F1_Work }",
              (("?w", A, lrm("F1_Work")), (Iri(EX + "obj1/work"), A, lrm("F1_Work"))), ("?w",)),
    QueryCase("full-iris",
              "SELECT ?s WHERE { ?s <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> "
              "<http://www.cidoc-crm.org/cidoc-crm/E21_Person> }",
              (("?s", A, crm("E21_Person")),), ("?s",)),
]


def oracle_rows(case: QueryCase, triples) -> Counter:
    """Projected rows (as tuples) of every solution, ignoring LIMIT/OFFSET."""
    solutions = brute_force_bgp(case.patterns, triples, lambda q: isinstance(q, str))
    rows = [tuple(b[c] for c in case.columns) for b in solutions
            if case.keep is None or case.keep(b)]
    if case.distinct:
        rows = list(set(rows))
    return Counter(rows)
