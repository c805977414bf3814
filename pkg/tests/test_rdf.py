from __future__ import annotations

import random

import pytest
import rdflib
from hypothesis import given, settings
from hypothesis import strategies as st
from rdflib.compare import isomorphic

from heritagekg.rdf import (FORMATS, BlankNode, Graph, InvalidLiteralError, InvalidTermError,
                            Iri, Literal, NamespaceTable, RdfSyntaxError, Triple,
                            UnknownPrefixError, expand_curie, format_for_path, graph_insert,
                            graph_merge, parse, parse_ntriples, parse_turtle, serialize)
from heritagekg.rdf.rdfxml import RdfXmlError
from heritagekg.rdf.terms import RDF_TYPE, XSD_DATETIME, XSD_STRING

from .conftest import GOLDEN
from .rdflib_bridge import back_from_rdflib, parsed_by_rdflib, rdflib_graph
from .strategies import graphs, iris, literals, triples

EX = "https://example.org/heritage/"
CRM = "http://www.cidoc-crm.org/cidoc-crm/"


def t(s, p, o):
    return Triple(Iri(EX + s), Iri(CRM + p), o)


# -- terms ----------------------------------------------------------------------

def test_language_literal():
    lit = Literal("mostra", lang="it")
    assert (lit.lexical, lit.lang, lit.datatype) == ("mostra", "it", None)


def test_datetime_literal():
    lit = Literal("2023-05-28T00:00:00", datatype=XSD_DATETIME)
    assert lit.effective_datatype == XSD_DATETIME and lit.lang is None


def test_lang_and_datatype_is_an_error():
    with pytest.raises(InvalidLiteralError):
        Literal("x", lang="en", datatype=XSD_STRING)


def test_xsd_string_folds_to_plain_and_tags_lowercase():
    assert Literal("x", datatype=XSD_STRING) == Literal("x")
    assert Literal("x", lang="EN-gb") == Literal("x", lang="en-gb")


@pytest.mark.parametrize("value", ["no-scheme", "http://a b", "http://a<b", 'http://a"b', ""])
def test_invalid_iris(value):
    with pytest.raises(InvalidTermError):
        Iri(value)


@pytest.mark.parametrize("tag", ["", "en_GB", "toolongtag1", "1x"])
def test_invalid_language_tags(tag):
    with pytest.raises(InvalidLiteralError):
        Literal("x", lang=tag)


# -- graph ----------------------------------------------------------------------

def test_insert_examples():
    a, b = t("a", "P1", Literal("1")), t("b", "P1", Literal("2"))
    g = graph_insert(Graph(), a)
    assert len(g) == 1
    assert len(graph_insert(g, a)) == 1
    assert len(graph_insert(g, b)) == 2


def test_insert_does_not_mutate_input():
    g = Graph()
    graph_insert(g, t("a", "P1", Literal("1")))
    assert len(g) == 0


def test_merge_examples():
    g = Graph([t(str(i), "P1", Literal(str(i))) for i in range(3)])
    h = Graph([t(str(i), "P2", Literal(str(i))) for i in range(4)])
    assert graph_merge(g, Graph()) == g
    assert graph_merge(g, g) == g
    assert len(graph_merge(g, h)) == 7


@given(graphs(20), triples())
def test_set_semantics(g, tr):
    once = graph_insert(g, tr)
    assert len(graph_insert(once, tr)) == len(once)
    assert len(once) == len(g) + (tr not in g)


@given(graphs(15), graphs(15), graphs(15))
def test_merge_commutative_associative(a, b, c):
    assert graph_merge(a, b) == graph_merge(b, a)
    assert graph_merge(graph_merge(a, b), c) == graph_merge(a, graph_merge(b, c))
    assert len(graph_merge(a, b)) <= len(a) + len(b)


@given(graphs(40), st.data())
def test_pattern_lookup_matches_full_scan(g, data):
    all_triples = list(g)
    probe = data.draw(st.sampled_from(all_triples)) if all_triples else None
    for mask in range(8):
        s = probe.subject if probe and mask & 1 else None
        p = probe.predicate if probe and mask & 2 else None
        o = probe.object if probe and mask & 4 else None
        expected = {x for x in all_triples
                    if (s is None or x.subject == s) and (p is None or x.predicate == p)
                    and (o is None or x.object == o)}
        assert set(g.triples(s, p, o)) == expected
        assert g.count(s, p, o) == len(expected)


def test_discard_updates_indexes():
    a = t("a", "P1", Literal("1"))
    g = Graph([a])
    assert g.discard(a) and not g.discard(a)
    assert list(g.triples(a.subject, None, None)) == [] and len(g) == 0


# -- N-Triples ------------------------------------------------------------------

def test_empty_graph_serializes_to_empty_text():
    assert serialize(Graph(), "ntriples") == ""


def test_quote_is_escaped():
    out = serialize(Graph([t("a", "P3_has_note", Literal('a"b'))]), "ntriples")
    assert '"a\\"b"' in out


def three_triples() -> Graph:
    return Graph([
        Triple(Iri(EX + "obj1/work"), RDF_TYPE, Iri("http://iflastandards.info/ns/lrm/lrmoo/F1_Work")),
        t("obj1/title", "P190_has_symbolic_content", Literal('De "animalibus"\ninsectis', lang="la")),
        t("obj1/creation/time-span", "P82a_begin_of_the_begin",
          Literal("1602-01-01T00:00:00", datatype=XSD_DATETIME)),
    ])


def test_three_triples_match_independent_serializer_golden():
    # golden/three.nt was written by rdflib with lines sorted
    golden = (GOLDEN / "three.nt").read_bytes()
    first = serialize(three_triples(), "ntriples").encode("utf-8")
    second = serialize(Graph(reversed(list(three_triples()))), "ntriples").encode("utf-8")
    assert first == golden == second


def test_canonical_form_lines():
    out = serialize(three_triples(), "ntriples")
    lines = out.split("\n")
    assert lines[-1] == "" and all(line.endswith(" .") for line in lines[:-1])
    assert lines[:-1] == sorted(lines[:-1])
    assert "\r" not in out


def test_parse_empty_ntriples():
    assert len(parse("", "ntriples")) == 0


def test_missing_final_dot_reports_line():
    text = serialize(three_triples(), "ntriples").split("\n")
    text[1] = text[1][:-2]
    with pytest.raises(RdfSyntaxError) as err:
        parse_ntriples("\n".join(text))
    assert err.value.line == 2


@pytest.mark.parametrize("bad", [
    "<http://a> <http://b> .",
    '<http://a> <http://b> "x"@ .',
    '<http://a> "p" <http://c> .',
    "<http://a> <http://b> <http://c> . junk",
    '<http://a> <http://b> "unterminated .',
    "<a> <http://b> <http://c> .",
])
def test_ntriples_syntax_errors(bad):
    with pytest.raises(RdfSyntaxError):
        parse_ntriples(bad)


def test_ntriples_escapes_parse():
    g = parse_ntriples('<http://a> <http://b> "tab\\tq\\"\\u00e9\\U0001F600" .\n')
    (tr,) = list(g)
    assert tr.object == Literal('tab\tq"é\U0001F600')


@settings(max_examples=60, deadline=None)
@given(graphs(40))
def test_ntriples_agrees_with_rdflib(g):
    ours = serialize(g, "ntriples")
    assert isomorphic(parsed_by_rdflib(ours, "nt"), rdflib_graph(g))


@settings(max_examples=40, deadline=None)
@given(graphs(40, with_bnodes=False))
def test_we_parse_rdflib_ntriples(g):
    text = rdflib_graph(g).serialize(format="nt")
    assert parse_ntriples(text) == g


@given(graphs(30), st.randoms())
def test_canonical_output_ignores_insertion_order(g, rnd):
    items = list(g)
    rnd.shuffle(items)
    assert serialize(Graph(items), "ntriples") == serialize(g, "ntriples")


# -- Turtle ---------------------------------------------------------------------

def test_turtle_groups_by_subject_with_prefixes():
    ns = NamespaceTable({"ex": EX})
    out = serialize(three_triples(), "turtle", ns)
    assert "@prefix lrmoo: <http://iflastandards.info/ns/lrm/lrmoo/> ." in out
    assert "@prefix aat:" not in out  # only used prefixes are declared
    assert "a lrmoo:F1_Work" in out
    assert parse_turtle(out) == three_triples()


@settings(max_examples=60, deadline=None)
@given(graphs(40))
def test_turtle_round_trip_and_rdflib_agreement(g):
    out = serialize(g, "turtle", NamespaceTable({"ex": EX}))
    assert parse(out, "turtle") == g
    assert isomorphic(parsed_by_rdflib(out, "turtle"), rdflib_graph(g))


@settings(max_examples=40, deadline=None)
@given(graphs(40, with_bnodes=False))
def test_we_parse_rdflib_turtle(g):
    text = rdflib_graph(g).serialize(format="turtle")
    assert parse_turtle(text) == g


def test_turtle_unknown_prefix_is_an_error():
    with pytest.raises(RdfSyntaxError) as err:
        parse_turtle("@prefix ex: <http://e/> .\n\nzzz:a ex:b ex:c .\n")
    assert err.value.line == 3 and "zzz" in str(err.value)


@pytest.mark.parametrize("bad", [
    "<http://a> <http://b> .",
    "<http://a> <http://b> <http://c>",
    "@prefix ex <http://e/> .",
    '<http://a> <http://b> """open .',
    "<http://a> <http://b> [ <http://c> ",
])
def test_turtle_syntax_errors(bad):
    with pytest.raises(RdfSyntaxError):
        parse_turtle(bad)


def test_turtle_features():
    text = """
    PREFIX ex: <http://e/>
    @base <http://base/> .
    ex:s a ex:C ;
        ex:p "x"@en, 'y', 5, 1.5, true, <rel> ;
        ex:q [ ex:r ex:o ] ;
        ex:l ( ex:a ex:b ) .
    """
    ours = parse_turtle(text)
    theirs = back_from_rdflib(parsed_by_rdflib(text, "turtle"))
    assert isomorphic(rdflib_graph(ours), rdflib_graph(theirs))


# -- JSON-LD and RDF/XML (write-only, checked with rdflib) -------------------------

@settings(max_examples=40, deadline=None)
@given(graphs(30, xml_safe=True))
def test_jsonld_agrees_with_rdflib(g):
    out = serialize(g, "jsonld", NamespaceTable({"ex": EX}))
    assert isomorphic(parsed_by_rdflib(out, "json-ld"), rdflib_graph(g))


@settings(max_examples=40, deadline=None)
@given(graphs(30, xml_safe=True))
def test_rdfxml_agrees_with_rdflib(g):
    out = serialize(g, "rdfxml", NamespaceTable({"ex": EX}))
    assert isomorphic(parsed_by_rdflib(out, "xml"), rdflib_graph(g))


def test_rdfxml_rejects_unsplittable_predicate():
    g = Graph([Triple(Iri("http://a/s"), Iri("http://a/123"), Literal("x"))])
    with pytest.raises(RdfXmlError):
        serialize(g, "rdfxml")


def test_rdfxml_rejects_xml_invalid_characters():
    g = Graph([t("a", "P3_has_note", Literal("bell\x07"))])
    with pytest.raises(RdfXmlError):
        serialize(g, "rdfxml")


def test_unknown_formats():
    with pytest.raises(ValueError):
        serialize(Graph(), "n3")
    with pytest.raises(ValueError):
        parse("", "jsonld")


@pytest.mark.parametrize("name, fmt", [("g.nt", "ntriples"), ("g.TTL", "turtle"),
                                       ("x/g.jsonld", "jsonld"), ("g.rdf", "rdfxml")])
def test_format_for_path(name, fmt):
    assert format_for_path(name) == fmt


def test_all_formats_listed():
    assert FORMATS == ("ntriples", "turtle", "jsonld", "rdfxml")


# -- namespaces -------------------------------------------------------------------

def test_expand_curie_examples():
    ns = NamespaceTable()
    assert expand_curie("crm:E21_Person", ns) == Iri(CRM + "E21_Person")
    assert expand_curie("aat:300054322", ns) == Iri("http://vocab.getty.edu/aat/300054322")
    with pytest.raises(UnknownPrefixError) as err:
        expand_curie("zzz:x", ns)
    assert err.value.prefix == "zzz"


def test_compact_prefers_longest_namespace():
    ns = NamespaceTable({"ex": EX, "exp": EX + "person/"})
    assert ns.compact(Iri(EX + "person/x")) == ("exp", "x")
    assert ns.compact(Iri("http://nowhere/x")) is None


@given(iris)
def test_compact_expand_inverse(iri):
    ns = NamespaceTable({"ex": EX})
    hit = ns.compact(iri)
    if hit is not None:
        assert expand_curie(f"{hit[0]}:{hit[1]}", ns) == iri


@given(literals())
def test_literal_round_trip_single(lit):
    g = Graph([Triple(BlankNode("b0"), Iri(EX + "p"), lit)])
    assert parse_ntriples(serialize(g, "ntriples")) == g
    assert parse_turtle(serialize(g, "turtle")) == g


def test_random_seeded_round_trip_smoke():
    rnd = random.Random(7)
    g = Graph(t(f"s{rnd.randint(0, 9)}", f"P{rnd.randint(0, 3)}", Literal(str(rnd.random())))
              for _ in range(50))
    assert parse_turtle(serialize(g, "turtle")) == g
    assert rdflib.Graph().parse(data=serialize(g, "ntriples"), format="nt").__len__() == len(g)
