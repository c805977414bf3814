"""Canonical N-Triples writer and a line-oriented reader."""
from __future__ import annotations

import re
from typing import Iterable

from .graph import Graph
from .terms import BlankNode, InvalidTermError, Iri, Literal, Term, Triple


class RdfSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_ECHAR = {
    "\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r",
    "\t": "\\t", "\b": "\\b", "\f": "\\f",
}
_UNESCAPE = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f",
             '"': '"', "'": "'", "\\": "\\"}
_LITERAL_SPECIAL = re.compile(r'[\\"\x00-\x1f\x7f]')
_IRI_SPECIAL = re.compile(r'[\x00-\x20<>"{}|^`\\]')


def _escape_char(m: re.Match) -> str:
    c = m.group()
    return _ECHAR.get(c) or f"\\u{ord(c):04X}"


def escape_string(text: str) -> str:
    return _LITERAL_SPECIAL.sub(_escape_char, text)


def escape_iri(text: str) -> str:
    return _IRI_SPECIAL.sub(lambda m: f"\\u{ord(m.group()):04X}", text)


def term_to_nt(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{escape_iri(term.value)}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    out = f'"{escape_string(term.lexical)}"'
    if term.lang:
        return f"{out}@{term.lang}"
    if term.datatype is not None:
        return f"{out}^^<{escape_iri(term.datatype.value)}>"
    return out


def triple_to_nt(t: Triple) -> str:
    return f"{term_to_nt(t.subject)} {term_to_nt(t.predicate)} {term_to_nt(t.object)} ."


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    lines = sorted(triple_to_nt(t) for t in triples)
    return "".join(line + "\n" for line in lines)


class _LineScanner:
    _WS = re.compile(r"[ \t]*")
    _BNODE = re.compile(r"_:([A-Za-z0-9_]+)")
    _LANG = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")

    def __init__(self, text: str, lineno: int) -> None:
        self.text = text
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str, pos: int | None = None) -> RdfSyntaxError:
        return RdfSyntaxError(message, self.lineno, (self.pos if pos is None else pos) + 1)

    def skip_ws(self) -> None:
        self.pos = self._WS.match(self.text, self.pos).end()

    def peek(self) -> str:
        return self.text[self.pos:self.pos + 1]

    def iri(self) -> Iri:
        start = self.pos
        end = self.text.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI")
        raw = unescape(self.text[self.pos + 1:end], self, allow_echar=False)
        self.pos = end + 1
        try:
            return Iri(raw)
        except InvalidTermError as exc:
            raise self.error(str(exc), start) from None

    def bnode(self) -> BlankNode:
        m = self._BNODE.match(self.text, self.pos)
        if not m:
            raise self.error("invalid blank node")
        self.pos = m.end()
        return BlankNode(m.group(1))

    def literal(self) -> Literal:
        start = self.pos
        i = self.pos + 1
        while True:
            if i >= len(self.text):
                raise self.error("unterminated string", start)
            c = self.text[i]
            if c == "\\":
                i += 2
                continue
            if c == '"':
                break
            i += 1
        lexical = unescape(self.text[self.pos + 1:i], self)
        self.pos = i + 1
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            if self.peek() != "<":
                raise self.error("expected datatype IRI")
            return Literal(lexical, datatype=self.iri())
        m = self._LANG.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Literal(lexical, lang=m.group(1))
        return Literal(lexical)

    def term(self, allowed: str) -> Term:
        c = self.peek()
        if c == "<" and "i" in allowed:
            return self.iri()
        if c == "_" and "b" in allowed:
            return self.bnode()
        if c == '"' and "l" in allowed:
            return self.literal()
        raise self.error(f"unexpected {c!r}" if c else "unexpected end of line")


_UCHAR = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|(.))", re.S)


def unescape(raw: str, scanner=None, allow_echar: bool = True) -> str:
    if "\\" not in raw:
        return raw

    def repl(m: re.Match) -> str:
        if m.group(1) or m.group(2):
            return chr(int(m.group(1) or m.group(2), 16))
        c = m.group(3)
        if allow_echar and c in _UNESCAPE:
            return _UNESCAPE[c]
        if scanner is not None:
            raise scanner.error(f"invalid escape \\{c}")
        raise ValueError(f"invalid escape \\{c}")

    return _UCHAR.sub(repl, raw)


def parse_ntriples(text: str) -> Graph:
    g = Graph()
    for lineno, line in enumerate(re.split(r"\r?\n|\r", text), start=1):
        sc = _LineScanner(line, lineno)
        sc.skip_ws()
        if sc.peek() in ("", "#"):
            continue
        s = sc.term("ib")
        sc.skip_ws()
        p = sc.term("i")
        sc.skip_ws()
        o = sc.term("ibl")
        sc.skip_ws()
        if sc.peek() != ".":
            raise sc.error("expected '.' at end of triple")
        sc.pos += 1
        sc.skip_ws()
        if sc.peek() not in ("", "#"):
            raise sc.error("trailing content after '.'")
        g.add(Triple(s, p, o))
    return g
