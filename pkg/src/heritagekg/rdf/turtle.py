"""Turtle writer (subject-grouped, prefix-compacted) and recursive-descent reader."""
from __future__ import annotations

import re
from collections import defaultdict
from itertools import count
from typing import Iterable, Optional
from urllib.parse import urljoin

from .graph import Graph
from .namespaces import NamespaceTable, UnknownPrefixError
from .ntriples import RdfSyntaxError, escape_string, term_to_nt, unescape
from .terms import (RDF_NS, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE,
                    XSD_INTEGER, BlankNode, InvalidTermError, Iri, Literal, Term,
                    Triple)

_PN_PREFIX = re.compile(r"^([A-Za-z][A-Za-z0-9_\-]*)?$")
_SAFE_LOCAL = re.compile(r"^([A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?)?$")

RDF_FIRST = Iri(RDF_NS + "first")
RDF_REST = Iri(RDF_NS + "rest")
RDF_NIL = Iri(RDF_NS + "nil")


class _Writer:
    def __init__(self, ns: NamespaceTable) -> None:
        self.ns = ns
        self.used: set[str] = set()

    def iri(self, iri: Iri) -> str:
        hit = self.ns.compact(iri)
        if hit is not None:
            prefix, local = hit
            if _PN_PREFIX.match(prefix) and _SAFE_LOCAL.match(local):
                self.used.add(prefix)
                return f"{prefix}:{local}"
        return term_to_nt(iri)

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term)
        if isinstance(term, Literal):
            out = f'"{escape_string(term.lexical)}"'
            if term.lang:
                return f"{out}@{term.lang}"
            if term.datatype is not None:
                return f"{out}^^{self.iri(term.datatype)}"
            return out
        return term_to_nt(term)


def serialize_turtle(triples: Iterable[Triple], ns: Optional[NamespaceTable] = None) -> str:
    ns = ns if ns is not None else NamespaceTable()
    w = _Writer(ns)
    by_subject: dict = defaultdict(lambda: defaultdict(list))
    for t in triples:
        by_subject[t.subject][t.predicate].append(t.object)

    blocks = []
    for s in sorted(by_subject, key=term_to_nt):
        preds = by_subject[s]
        order = sorted(preds, key=lambda p: (p != RDF_TYPE, term_to_nt(p)))
        parts = []
        for p in order:
            verb = "a" if p == RDF_TYPE else w.iri(p)
            objs = ", ".join(w.term(o) for o in sorted(preds[p], key=term_to_nt))
            parts.append(f"{verb} {objs}")
        blocks.append(w.term(s) + " " + " ;\n    ".join(parts) + " .\n")

    header = "".join(f"@prefix {p}: <{ns[p]}> .\n" for p in sorted(w.used))
    if header and blocks:
        header += "\n"
    return header + "\n".join(blocks)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<iri><(?:[^<>"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>)
  | (?P<lstring>\"\"\"(?:[^"\\]|\\.|"(?!""))*\"\"\"|'''(?:[^'\\]|\\.|'(?!''))*''')
  | (?P<string>"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<bnode>_:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF0-9_](?:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF\u00B7\u0300-\u036F\u203F-\u20400-9_.\-]*[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF\u00B7\u0300-\u036F\u203F-\u20400-9_\-])?)
  | (?P<lang>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+|[0-9]*\.[0-9]+|[0-9]+))
  | (?P<pname>(?:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF][A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF\u00B7\u0300-\u036F\u203F-\u20400-9_.\-]*)?:(?:(?:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF0-9_:]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?\#@%])(?:(?:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF\u00B7\u0300-\u036F\u203F-\u20400-9_.\-:]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?\#@%])*(?:[A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF\u00B7\u0300-\u036F\u203F-\u20400-9_\-:]|%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?\#@%]))?)?)
  | (?P<keyword>[A-Za-z]+)
  | (?P<punct>[.;,\[\]()])
""", re.X)


class _Token:
    __slots__ = ("kind", "text", "pos")

    def __init__(self, kind: str, text: str, pos: int) -> None:
        self.kind = kind
        self.text = text
        self.pos = pos


class _TurtleParser:
    def __init__(self, text: str, ns: Optional[NamespaceTable]) -> None:
        self.src = text
        self.prefixes: dict[str, str] = dict(ns) if ns is not None else {}
        self.base: Optional[str] = None
        self.tokens = self._tokenize(text)
        self.i = 0
        self.graph = Graph()
        self._bnode_ids = count()
        self._renamed: dict[str, BlankNode] = {}
        self._labels = set(m.group(1) for m in re.finditer(r"_:([A-Za-z0-9_]+)", text))

    def _position(self, pos: int) -> tuple[int, int]:
        line = self.src.count("\n", 0, pos) + 1
        col = pos - (self.src.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message: str, pos: Optional[int] = None) -> RdfSyntaxError:
        if pos is None:
            pos = self.tokens[self.i].pos if self.i < len(self.tokens) else len(self.src)
        line, col = self._position(pos)
        return RdfSyntaxError(message, line, col)

    def _tokenize(self, text: str) -> list[_Token]:
        out = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                line, col = self._position(pos)
                raise RdfSyntaxError(f"unexpected character {text[pos]!r}", line, col)
            kind = m.lastgroup
            if kind != "ws":
                out.append(_Token(kind, m.group(), pos))
            pos = m.end()
        return out

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> _Token:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok.text != text:
            raise self.error(f"expected {text!r}, found {tok.text!r}", tok.pos)

    def fresh_bnode(self) -> BlankNode:
        while True:
            label = f"genid{next(self._bnode_ids)}"
            if label not in self._labels:
                self._labels.add(label)
                return BlankNode(label)

    def _labelled(self, label: str) -> BlankNode:
        # labels outside the N-Triples-safe set are renamed, consistently per document
        if label not in self._renamed:
            try:
                return BlankNode(label)
            except InvalidTermError:
                self._renamed[label] = self.fresh_bnode()
        return self._renamed[label]

    def parse(self) -> Graph:
        while self.peek() is not None:
            tok = self.peek()
            low = tok.text.lower()
            if tok.kind == "lang" and tok.text in ("@prefix", "@base"):
                self.i += 1
                self._directive(tok.text[1:], sparql_style=False)
            elif tok.kind == "keyword" and low in ("prefix", "base"):
                self.i += 1
                self._directive(low, sparql_style=True)
            else:
                self._triples()
                self.expect(".")
        return self.graph

    def _directive(self, name: str, sparql_style: bool) -> None:
        if name == "prefix":
            tok = self.next()
            if tok.kind != "pname" or not tok.text.endswith(":"):
                raise self.error("expected prefix name", tok.pos)
            prefix = tok.text[:-1]
            self.prefixes[prefix] = self._iriref(self.next()).value
        else:
            self.base = self._iriref(self.next()).value
        if not sparql_style:
            self.expect(".")

    def _iriref(self, tok: _Token) -> Iri:
        if tok.kind != "iri":
            raise self.error(f"expected IRI, found {tok.text!r}", tok.pos)
        raw = unescape(tok.text[1:-1], allow_echar=False)
        if self.base is not None:
            raw = urljoin(self.base, raw)
        try:
            return Iri(raw)
        except InvalidTermError as exc:
            raise self.error(str(exc), tok.pos) from None

    def _pname(self, tok: _Token) -> Iri:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise self.error(str(UnknownPrefixError(prefix)), tok.pos)
        local = re.sub(r"\\(.)", r"\1", local)
        try:
            return Iri(self.prefixes[prefix] + local)
        except InvalidTermError as exc:
            raise self.error(str(exc), tok.pos) from None

    def _iri(self, tok: _Token) -> Iri:
        if tok.kind == "iri":
            return self._iriref(tok)
        if tok.kind == "pname":
            return self._pname(tok)
        raise self.error(f"expected IRI, found {tok.text!r}", tok.pos)

    def _triples(self) -> None:
        tok = self.peek()
        if tok is not None and tok.text == "[":
            subject = self._blank_property_list()
            nxt = self.peek()
            if nxt is not None and nxt.text != ".":
                self._predicate_object_list(subject)
            return
        subject = self._subject()
        self._predicate_object_list(subject)

    def _subject(self):
        tok = self.next()
        if tok.kind == "bnode":
            return self._labelled(tok.text[2:])
        if tok.text == "(":
            return self._collection()
        return self._iri(tok)

    def _predicate_object_list(self, subject) -> None:
        while True:
            tok = self.next()
            predicate = RDF_TYPE if tok.kind == "keyword" and tok.text == "a" else self._iri(tok)
            self._object_list(subject, predicate)
            nxt = self.peek()
            if nxt is None or nxt.text != ";":
                return
            while self.peek() is not None and self.peek().text == ";":
                self.i += 1
            nxt = self.peek()
            if nxt is None or nxt.text in (".", "]"):
                return

    def _object_list(self, subject, predicate) -> None:
        while True:
            self.graph.add(Triple(subject, predicate, self._object()))
            nxt = self.peek()
            if nxt is None or nxt.text != ",":
                return
            self.i += 1

    def _object(self) -> Term:
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        if tok.text == "[":
            return self._blank_property_list()
        self.i += 1
        if tok.text == "(":
            return self._collection()
        if tok.kind == "bnode":
            return self._labelled(tok.text[2:])
        if tok.kind in ("iri", "pname"):
            return self._iri(tok)
        if tok.kind in ("string", "lstring"):
            return self._literal(tok)
        if tok.kind == "number":
            if re.search(r"[eE]", tok.text):
                return Literal(tok.text, datatype=XSD_DOUBLE)
            if "." in tok.text:
                return Literal(tok.text, datatype=XSD_DECIMAL)
            return Literal(tok.text, datatype=XSD_INTEGER)
        if tok.kind == "keyword" and tok.text in ("true", "false"):
            return Literal(tok.text, datatype=XSD_BOOLEAN)
        raise self.error(f"unexpected {tok.text!r}", tok.pos)

    def _literal(self, tok: _Token) -> Literal:
        q = 3 if tok.kind == "lstring" else 1
        try:
            lexical = unescape(tok.text[q:-q])
        except ValueError as exc:
            raise self.error(str(exc), tok.pos) from None
        nxt = self.peek()
        if nxt is not None and nxt.kind == "lang":
            self.i += 1
            return Literal(lexical, lang=nxt.text[1:])
        if nxt is not None and nxt.kind == "dtype":
            self.i += 1
            return Literal(lexical, datatype=self._iri(self.next()))
        return Literal(lexical)

    def _blank_property_list(self) -> BlankNode:
        self.expect("[")
        node = self.fresh_bnode()
        nxt = self.peek()
        if nxt is not None and nxt.text != "]":
            self._predicate_object_list(node)
        self.expect("]")
        return node

    def _collection(self) -> Term:
        items = []
        while self.peek() is not None and self.peek().text != ")":
            items.append(self._object())
        self.expect(")")
        if not items:
            return RDF_NIL
        head = self.fresh_bnode()
        node = head
        for idx, item in enumerate(items):
            self.graph.add(Triple(node, RDF_FIRST, item))
            rest = RDF_NIL if idx == len(items) - 1 else self.fresh_bnode()
            self.graph.add(Triple(node, RDF_REST, rest))
            node = rest
        return head


def parse_turtle(text: str, ns: Optional[NamespaceTable] = None) -> Graph:
    """Parse Turtle. Prefixes in ``ns`` are pre-bound; documents normally
    declare their own."""
    return _TurtleParser(text, ns).parse()
