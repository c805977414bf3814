from __future__ import annotations

import re
import time
import unicodedata
from datetime import date, datetime

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heritagekg.rdf import Iri, Literal
from heritagekg.rdf.terms import XSD_DATETIME
from heritagekg.transforms import (AAT_BASE, DEFAULT_REGISTRY, STANDARD_FUNCTIONS, LookupTable,
                                   LookupTableError, UdfRegistry, UdfSpec, assess_aat_tool_type,
                                   conditional_normalize_and_convert_to_iri,
                                   convert_documentary_type_to_aat, convert_to_aat,
                                   date_to_xs_datetime, extract_documented_in_iri, extract_title,
                                   extract_title_lang, load_lookup_table,
                                   multiple_separator_split_explode, normalize_and_convert_to_iri,
                                   split_year_range_to_dates)

from .conftest import FIXTURES

BASE = "https://example.org/heritage/person/"
SLUG = re.compile(r"^[a-z0-9]+(-[a-z0-9]+)*$")
# xsd:dateTime lexical grammar without the optional timezone
XSD_DT = re.compile(r"^-?([1-9][0-9]{3,}|0[0-9]{3})-(0[1-9]|1[0-2])-(0[1-9]|[12][0-9]|3[01])"
                    r"T(([01][0-9]|2[0-3]):[0-5][0-9]:[0-5][0-9](\.[0-9]+)?|24:00:00(\.0+)?)$")
PROPERTY = settings(max_examples=200, deadline=None)


class Collector(list):
    def __call__(self, message):
        self.append(message)


def reference_fold(text: str) -> str:
    """Strip accents by recursively following canonical/compat decompositions."""
    out = []
    for ch in text:
        out.append(_base_chars(ch))
    return "".join(out)


def _base_chars(ch: str) -> str:
    if unicodedata.combining(ch):
        return ""
    decomposition = unicodedata.decomposition(ch)
    if not decomposition:
        return ch
    codes = [c for c in decomposition.split() if not c.startswith("<")]
    return "".join(_base_chars(chr(int(c, 16))) for c in codes)


def reference_slug(text: str) -> str:
    folded = reference_fold(text.strip()).lower()
    words, current = [], ""
    for ch in folded:
        if ch in "abcdefghijklmnopqrstuvwxyz0123456789":
            current += ch
        elif current:
            words.append(current)
            current = ""
    if current:
        words.append(current)
    return "-".join(words)


def valid_datetime(lexical: str) -> bool:
    if not XSD_DT.match(lexical):
        return False
    try:
        datetime.fromisoformat(lexical.replace("T24:00:00", "T00:00:00"))
    except ValueError:
        return False
    return True


# -- normalize_and_convert_to_iri ----------------------------------------------

def test_normalize_examples():
    assert normalize_and_convert_to_iri("Ulisse Aldrovandi", BASE) == Iri(BASE + "ulisse-aldrovandi")
    assert normalize_and_convert_to_iri("  Palazzo   Poggi ", BASE) == Iri(BASE + "palazzo-poggi")
    assert normalize_and_convert_to_iri("Álvarez–Núñez", BASE) == Iri(BASE + "alvarez-nunez")


def test_normalize_accent_fold_matches_reference():
    assert reference_slug("Álvarez–Núñez") == "alvarez-nunez"


def test_normalize_empty_slug_warns():
    w = Collector()
    assert normalize_and_convert_to_iri(" — ", BASE, warn=w) is None
    assert len(w) == 1


def test_normalize_requires_slash_terminated_base():
    with pytest.raises(ValueError):
        normalize_and_convert_to_iri("x", "https://example.org/person")


@PROPERTY
@given(st.text(max_size=40))
def test_normalize_slug_grammar(value):
    iri = normalize_and_convert_to_iri(value, BASE)
    expected = reference_slug(value)
    if iri is None:
        assert expected == ""
    else:
        slug = iri.value[len(BASE):]
        assert SLUG.match(slug)
        assert slug == expected


# -- multiple_separator_split_explode --------------------------------------------

def test_explode_examples():
    assert multiple_separator_split_explode("a; b| c", [";", "|"]) == ["a", "b", "c"]
    assert multiple_separator_split_explode("solo", [";"]) == ["solo"]
    assert multiple_separator_split_explode("x;;y; ", [";"]) == ["x", "y"]


def test_explode_prefers_longest_separator():
    assert multiple_separator_split_explode("a--b-c", ["-", "--"]) == ["a", "b", "c"]
    assert multiple_separator_split_explode("a and b", [" and "]) == ["a", "b"]


def test_explode_rejects_bad_separators():
    for bad in ([], [""], ["x", ""]):
        with pytest.raises(ValueError):
            multiple_separator_split_explode("a", bad)


def test_explode_only_separators_warns():
    w = Collector()
    assert multiple_separator_split_explode(" ; ;", [";"], warn=w) == []
    assert len(w) == 1
    assert multiple_separator_split_explode("", [";"], warn=w) == []
    assert len(w) == 1


@PROPERTY
@given(st.text(alphabet="ab c;|,", max_size=30), st.lists(st.sampled_from([";", "|", ","]),
                                                           min_size=1, max_size=3))
def test_explode_idempotent(value, seps):
    items = multiple_separator_split_explode(value, seps)
    assert all(items) and all(i == i.strip() for i in items)
    assert multiple_separator_split_explode(seps[0].join(items), seps) == items
    # order-preserving: every item appears in the source in sequence
    pos = 0
    for item in items:
        pos = value.index(item, pos) + len(item)


# -- AAT lookups -------------------------------------------------------------------

ACQ = LookupTable({"photogrammetry": "300054322", "structured light": "300000001"})
PROD = LookupTable({"etching": "300000002", "engraving": "300000003"})
DOC = LookupTable({"printed book": "300000004"})


def test_assess_examples():
    assert assess_aat_tool_type("Photogrammetry", ACQ) == Iri(AAT_BASE + "300054322")
    w = Collector()
    assert assess_aat_tool_type("laser scanning", LookupTable({}), warn=w) is None
    assert len(w) == 1
    assert assess_aat_tool_type(" structured light ", ACQ) == Iri(AAT_BASE + "300000001")


def test_convert_to_aat_examples():
    assert convert_to_aat("etching; engraving", [";"], PROD) == [
        Iri(AAT_BASE + "300000002"), Iri(AAT_BASE + "300000003")]
    w = Collector()
    assert convert_to_aat("etching; unknown", [";"], PROD, warn=w) == [Iri(AAT_BASE + "300000002")]
    assert len(w) == 1
    assert convert_to_aat("", [";"], PROD) == []


def test_documentary_type_examples():
    assert convert_documentary_type_to_aat("printed book", DOC) == Iri(AAT_BASE + "300000004")
    w = Collector()
    assert convert_documentary_type_to_aat("papyrus", DOC, warn=w) is None
    assert len(w) == 1
    assert convert_documentary_type_to_aat("Printed Book", DOC) == Iri(AAT_BASE + "300000004")


_KEYS = st.text(alphabet="abcdef ", min_size=1, max_size=8).map(str.strip).filter(bool)


@PROPERTY
@given(st.dictionaries(_KEYS, st.integers(0, 10**9 - 1).map("{:09d}".format), max_size=5),
       st.text(alphabet="abcdefABC ", max_size=10))
def test_lookup_functions_agree_with_dictionary(entries, value):
    table = LookupTable(entries)
    expected = entries.get(value.strip().lower())
    want = Iri(AAT_BASE + expected) if expected else None
    assert assess_aat_tool_type(value, table) == want
    assert convert_documentary_type_to_aat(value, table) == want


@PROPERTY
@given(st.lists(st.sampled_from(["etching", "engraving", "Etching", "fresco", "  "]), max_size=6))
def test_convert_to_aat_is_lookup_of_explode(parts):
    value = ";".join(parts)
    w = Collector()
    got = convert_to_aat(value, [";"], PROD, warn=w)
    items = [p.strip() for p in parts if p.strip()]
    codes = {"etching": "300000002", "engraving": "300000003"}
    assert got == [Iri(AAT_BASE + codes[i.lower()]) for i in items if i.lower() in codes]
    only_separators = not items and value.strip() != ""
    assert len(w) == sum(1 for i in items if i.lower() not in codes) + only_separators


# -- dates ---------------------------------------------------------------------------

def test_date_examples():
    assert date_to_xs_datetime("2023-05-28") == Literal("2023-05-28T00:00:00", datatype=XSD_DATETIME)
    for bad in ("28/05/2023", "1605-02-30"):
        w = Collector()
        assert date_to_xs_datetime(bad, warn=w) is None
        assert len(w) == 1


def test_year_range_examples():
    assert split_year_range_to_dates("1522-1605", "start") == Literal(
        "1522-01-01T00:00:00", datatype=XSD_DATETIME)
    assert split_year_range_to_dates("1522-1605", "end") == Literal(
        "1605-12-31T23:59:59", datatype=XSD_DATETIME)
    assert split_year_range_to_dates("1599", "end") == Literal(
        "1599-12-31T23:59:59", datatype=XSD_DATETIME)
    w = Collector()
    assert split_year_range_to_dates("1605-1522", "start", warn=w) is None
    assert len(w) == 1


def test_year_range_rejects_bad_selector():
    with pytest.raises(ValueError):
        split_year_range_to_dates("1599", "middle")


@PROPERTY
@given(st.one_of(st.dates(min_value=date(1000, 1, 1), max_value=date(9999, 12, 31)).map(str),
                 st.from_regex(r"[0-9]{4}-[0-9]{2}-[0-9]{2}", fullmatch=True),
                 st.text(max_size=12)))
def test_date_output_revalidates(value):
    w = Collector()
    lit = date_to_xs_datetime(value, warn=w)
    try:
        expected = datetime.strptime(value.strip(), "%Y-%m-%d") and bool(
            re.fullmatch(r"[0-9]{4}-[0-9]{2}-[0-9]{2}", value.strip()))
    except ValueError:
        expected = False
    if expected:
        assert lit is not None and lit.datatype == XSD_DATETIME
        assert valid_datetime(lit.lexical)
        assert lit.lexical.startswith(value.strip())
        assert not w
    else:
        assert lit is None and len(w) == 1


@PROPERTY
@given(st.integers(1000, 9999), st.integers(1000, 9999), st.sampled_from(["start", "end"]),
       st.sampled_from(["{a}-{b}", "{a} - {b}", "{a}"]))
def test_year_range_output_revalidates(a, b, which, shape):
    value = shape.format(a=a, b=b)
    lit = split_year_range_to_dates(value, which)
    last = b if "{b}" in shape else a
    if a > last:
        assert lit is None
        return
    assert valid_datetime(lit.lexical)
    year = a if which == "start" else last
    assert lit.lexical.startswith(f"{year:04d}-")


# -- titles ----------------------------------------------------------------------------

def test_title_examples():
    assert extract_title("De animalibus insectis@la") == "De animalibus insectis"
    assert extract_title("Untagged title") == "Untagged title"
    assert extract_title("a@b@la") == "a@b"


def test_title_lang_examples():
    assert extract_title_lang("De animalibus insectis@la") == "la"
    assert extract_title_lang("Untagged") is None
    assert extract_title_lang("x@zz9") is None


@PROPERTY
@given(st.text(max_size=20), st.one_of(st.none(), st.from_regex(r"[a-z]{2,3}", fullmatch=True)))
def test_title_split_reassembles(text, tag):
    value = text if tag is None else f"{text}@{tag}"
    if tag is not None:
        assert extract_title(value) == text.strip()
        assert extract_title_lang(value) == tag
    elif "@" not in text:
        assert extract_title(value) == text.strip()
        assert extract_title_lang(value) is None


# -- authority identifiers --------------------------------------------------------------

def test_documented_in_examples():
    assert extract_documented_in_iri("Rinaldi, Anna (ORCID 0000-0003-0530-4305)") == Iri(
        "https://orcid.org/0000-0003-0530-4305")
    assert extract_documented_in_iri("Aldrovandi, Ulisse (VIAF 123456)") == Iri(
        "http://viaf.org/viaf/123456")
    w = Collector()
    assert extract_documented_in_iri("no authority here", warn=w) is None
    assert len(w) == 1


def test_documented_in_priority_and_ulan():
    assert extract_documented_in_iri("ULAN 500115493") == Iri("http://vocab.getty.edu/ulan/500115493")
    both = "VIAF 1, ULAN 2, ORCID 0000-0002-1825-009X"
    assert extract_documented_in_iri(both) == Iri("https://orcid.org/0000-0002-1825-009X")
    assert extract_documented_in_iri("ULAN 2; VIAF 1") == Iri("http://viaf.org/viaf/1")


@PROPERTY
@given(st.sampled_from(["VIAF", "ULAN", "ORCID"]), st.from_regex(r"[0-9]{1,9}", fullmatch=True),
       st.text(alphabet="abc ,()", max_size=10))
def test_documented_in_extracts_embedded_id(kind, digits, noise):
    if kind == "ORCID":
        ident = "0000-0001-2345-678X"
        want = "https://orcid.org/" + ident
    else:
        ident = digits
        want = {"VIAF": "http://viaf.org/viaf/", "ULAN": "http://vocab.getty.edu/ulan/"}[kind] + digits
    assert extract_documented_in_iri(f"{noise}{kind} {ident}{noise}") == Iri(want)


# -- conditional -------------------------------------------------------------------------

def test_conditional_examples():
    base = "https://example.org/heritage/institution/"
    assert conditional_normalize_and_convert_to_iri("Palazzo Poggi", "keeper", "keeper", base) == Iri(
        base + "palazzo-poggi")
    w = Collector()
    assert conditional_normalize_and_convert_to_iri("Palazzo Poggi", "owner", "keeper", base,
                                                    warn=w) is None
    assert not w
    assert conditional_normalize_and_convert_to_iri("", "keeper", "keeper", base, warn=w) is None
    assert len(w) == 1


@PROPERTY
@given(st.text(max_size=15), st.sampled_from(["keeper", " Keeper ", "owner", ""]))
def test_conditional_equals_guarded_normalize(value, relation):
    got = conditional_normalize_and_convert_to_iri(value, relation, "keeper", BASE)
    if relation.strip().lower() == "keeper":
        assert got == normalize_and_convert_to_iri(value, BASE)
    else:
        assert got is None


# -- lookup tables -----------------------------------------------------------------------

def test_load_lookup_table(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("key,code\n Etching ,300000002\nengraving,300000003\n", encoding="utf-8")
    table = load_lookup_table(p)
    assert len(table) == 2
    assert table.get("ETCHING") == "300000002"
    assert table.source_path == p


@pytest.mark.parametrize("body", ["key,code\netching,1\nEtching,2\n", "key,code\netching,30x\n",
                                  "key,code\netching\n", ""])
def test_load_lookup_table_errors(tmp_path, body):
    p = tmp_path / "t.csv"
    p.write_text(body, encoding="utf-8")
    with pytest.raises(LookupTableError):
        load_lookup_table(p)


def test_load_lookup_table_missing_file(tmp_path):
    with pytest.raises(LookupTableError):
        load_lookup_table(tmp_path / "absent.csv")


def test_shipped_lookup_tables_load():
    for name in ("production_techniques", "documentary_types", "acquisition_techniques"):
        assert len(load_lookup_table(FIXTURES / "lookups" / f"{name}.csv")) >= 3


# -- registry ------------------------------------------------------------------------------

def test_registry_complete():
    assert len(STANDARD_FUNCTIONS) == 10
    for name in STANDARD_FUNCTIONS:
        assert DEFAULT_REGISTRY[name].name == name
    assert "extract_title_lang" in DEFAULT_REGISTRY


def test_registry_calling_convention():
    spec = DEFAULT_REGISTRY["convert_to_aat"]
    assert spec({"value": "etching;engraving", "separators": [";"], "table": PROD}) == [
        Iri(AAT_BASE + "300000002"), Iri(AAT_BASE + "300000003")]
    assert DEFAULT_REGISTRY["extract_title"]({"value": "@la"}) == []
    assert DEFAULT_REGISTRY["date_to_xs_datetime"]({"value": "x"}) == []
    with pytest.raises(TypeError):
        spec({"value": "x"})
    with pytest.raises(TypeError):
        DEFAULT_REGISTRY["extract_title"]({"value": "x", "extra": 1})


def test_registry_rejects_duplicates_and_extends():
    with pytest.raises(ValueError):
        UdfRegistry([DEFAULT_REGISTRY["extract_title"], DEFAULT_REGISTRY["extract_title"]])
    extra = UdfSpec("shout", lambda value, warn=None: value.upper(), {"value": "text"})
    reg = DEFAULT_REGISTRY.extended(extra)
    assert reg["shout"]({"value": "a"}) == ["A"]
    assert "shout" not in DEFAULT_REGISTRY


def test_functions_are_pure():
    args = ("etching; engraving", [";"], PROD)
    assert convert_to_aat(*args) == convert_to_aat(*args)
    assert normalize_and_convert_to_iri("Ä b", BASE) == normalize_and_convert_to_iri("Ä b", BASE)


def test_example_suite_is_fast():
    start = time.perf_counter()
    for _ in range(200):
        test_normalize_examples()
        test_explode_examples()
        test_convert_to_aat_examples()
        test_date_examples()
        test_year_range_examples()
        test_documented_in_examples()
    assert time.perf_counter() - start < 5
