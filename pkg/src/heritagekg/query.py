"""SELECT queries over basic graph patterns.

Supported grammar (keywords are case-insensitive)::

    query    := prologue SELECT [DISTINCT] (var+ | '*') [WHERE] '{' body '}' modifier*
    prologue := (PREFIX pname ':' IRIREF | BASE IRIREF)*
    body     := (triples | filter) separated by optional '.'
    triples  := term term term ((',' term) | (';' term term))*
    filter   := FILTER '(' var '=' term ')'            -- also  term '=' var
              | FILTER ['('] regex '(' (var | str '(' var ')') ',' string [',' string] ')' [')']
    modifier := LIMIT int | OFFSET int

Equality is RDF term identity. ``regex`` without ``str()`` only matches
string literals (plain or language-tagged); with ``str()`` it also matches
typed literals and IRIs. Patterns use a conservative regex dialect: literal
characters, escapes, character classes, groups, alternation, anchors and
quantifiers. Inline flags, back-references, lookaround and named groups are
rejected. The only flags are ``i``, ``m`` and ``s``.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .rdf import RDF_TYPE, BlankNode, Graph, Iri, Literal, NamespaceTable, Term, term_to_nt
from .rdf.ntriples import RdfSyntaxError, unescape
from .rdf.terms import XSD_BOOLEAN, XSD_DECIMAL, XSD_INTEGER

_VAR_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, position: int = 0, text: str = ""):
        self.position = position
        self.line = text.count("\n", 0, position) + 1
        self.column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} (line {self.line}, column {self.column}, offset {position})")
        self.reason = message


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not _VAR_NAME.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def __str__(self) -> str:
        return "?" + self.name


PatternTerm = Union[Variable, Iri, Literal]


@dataclass(frozen=True)
class TriplePattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def __iter__(self):
        return iter((self.s, self.p, self.o))

    @property
    def variables(self) -> list[Variable]:
        return [t for t in self if isinstance(t, Variable)]


@dataclass(frozen=True)
class Filter:
    var: Variable
    op: str  # "equals" | "regex"
    operand: Union[Term, str]
    flags: str = ""
    as_string: bool = False

    def test(self, value: Term) -> bool:
        if self.op == "equals":
            return value == self.operand
        if isinstance(value, Literal) and (value.datatype is None or self.as_string):
            text = value.lexical
        elif isinstance(value, Iri) and self.as_string:
            text = value.value
        else:
            return False
        return _compile_regex(self.operand, self.flags).search(text) is not None


@dataclass
class SelectQuery:
    prefixes: NamespaceTable
    projection: Optional[list[Variable]]  # None means '*'
    patterns: list[TriplePattern]
    filters: list[Filter] = field(default_factory=list)
    limit: Optional[int] = None
    offset: Optional[int] = None
    distinct: bool = False

    @property
    def variables(self) -> list[Variable]:
        seen: dict[Variable, None] = {}
        for pattern in self.patterns:
            for v in pattern.variables:
                seen.setdefault(v)
        return list(seen)

    @property
    def columns(self) -> list[str]:
        return [v.name for v in (self.projection if self.projection is not None else self.variables)]


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[list[Optional[Term]]]

    def __len__(self) -> int:
        return len(self.rows)

    def to_sparql_json(self) -> dict:
        bindings = []
        for row in self.rows:
            bindings.append({c: _json_term(t) for c, t in zip(self.columns, row) if t is not None})
        return {"head": {"vars": list(self.columns)}, "results": {"bindings": bindings}}

    def to_json(self) -> str:
        return json.dumps(self.to_sparql_json(), indent=2, ensure_ascii=False)


def _json_term(t: Term) -> dict:
    if isinstance(t, Iri):
        return {"type": "uri", "value": t.value}
    if isinstance(t, BlankNode):
        return {"type": "bnode", "value": t.label}
    out = {"type": "literal", "value": t.lexical}
    if t.lang:
        out["xml:lang"] = t.lang
    elif t.datatype is not None:
        out["datatype"] = t.datatype.value
    return out


# -- regex subset -------------------------------------------------------------

_ALLOWED_ESCAPES = set("\\.*+?()[]{}|^$-/nrtdDsSwW")
_FLAGS = {"i": re.IGNORECASE, "m": re.MULTILINE, "s": re.DOTALL}
_regex_cache: dict[tuple[str, str], re.Pattern] = {}


def check_regex(pattern: str, flags: str = "") -> Optional[str]:
    """Return a reason when ``pattern``/``flags`` fall outside the subset."""
    bad = set(flags) - set(_FLAGS)
    if bad:
        return f"unsupported regex flag(s) {''.join(sorted(bad))!r}"
    i = 0
    while i < len(pattern):
        c = pattern[i]
        if c == "\\":
            nxt = pattern[i + 1:i + 2]
            if nxt not in _ALLOWED_ESCAPES:
                return f"unsupported regex escape \\{nxt}"
            i += 2
            continue
        if c == "(" and pattern[i + 1:i + 2] == "?":
            return "regex group extensions '(?' are not supported"
        i += 1
    try:
        re.compile(pattern)
    except re.error as exc:
        return f"invalid regex: {exc}"
    return None


def _compile_regex(pattern: str, flags: str) -> re.Pattern:
    key = (pattern, flags)
    if key not in _regex_cache:
        value = 0
        for f in flags:
            value |= _FLAGS[f]
        _regex_cache[key] = re.compile(pattern, value)
    return _regex_cache[key]


# -- tokenizer ----------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<iri><[^<>"{}|^`\\\x00-\x20]*>)
  | (?P<var>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"(?:[^"\\\n\r]|\\.)*"|'(?:[^'\\\n\r]|\\.)*')
  | (?P<lang>@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*)
  | (?P<dtype>\^\^)
  | (?P<number>[+-]?(?:[0-9]+\.[0-9]+|[0-9]+))
  | (?P<pname>(?:[A-Za-z][A-Za-z0-9_\-]*)?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?
              |(?:[A-Za-z][A-Za-z0-9_\-]*)?:)
  | (?P<word>[A-Za-z][A-Za-z0-9_]*)
  | (?P<punct>[{}().;,*=])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.ns = NamespaceTable()
        self.base: Optional[str] = None

    # helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[_Tok] = None) -> QuerySyntaxError:
        return QuerySyntaxError(message, (tok or self.tok).pos, self.text)

    def next(self) -> _Tok:
        tok = self.tok
        self.i += 1
        return tok

    def is_word(self, word: str) -> bool:
        return self.tok.kind == "word" and self.tok.text.upper() == word

    def expect_punct(self, p: str) -> _Tok:
        if self.tok.kind != "punct" or self.tok.text != p:
            found = self.tok.text or "end of query"
            raise self.error(f"expected {p!r}, found {found!r}")
        return self.next()

    def expect_word(self, word: str) -> None:
        if not self.is_word(word):
            raise self.error(f"expected {word}, found {self.tok.text or 'end of query'!r}")
        self.next()

    # grammar
    def parse(self) -> SelectQuery:
        self.prologue()
        self.expect_word("SELECT")
        distinct = False
        if self.is_word("DISTINCT"):
            self.next()
            distinct = True
        projection: Optional[list[Variable]]
        proj_toks: list[_Tok] = []
        if self.tok.kind == "punct" and self.tok.text == "*":
            self.next()
            projection = None
        else:
            while self.tok.kind == "var":
                proj_toks.append(self.next())
            if not proj_toks:
                raise self.error("expected '*' or at least one variable after SELECT")
            projection = [Variable(t.text[1:]) for t in proj_toks]
            for k, v in enumerate(projection):
                if v in projection[:k]:
                    raise self.error(f"variable {v} projected twice", proj_toks[k])
        if self.is_word("WHERE"):
            self.next()
        open_tok = self.expect_punct("{")
        patterns, filters = self.group()
        self.expect_punct("}")
        limit = offset = None
        while self.tok.kind == "word":
            word = self.tok.text.upper()
            if word not in ("LIMIT", "OFFSET"):
                raise self.error(f"unsupported clause {self.tok.text!r}")
            kw = self.next()
            if self.tok.kind != "number" or not self.tok.text.isdigit():
                raise self.error(f"{word} needs a non-negative integer")
            n = int(self.next().text)
            if (limit if word == "LIMIT" else offset) is not None:
                raise self.error(f"{word} given twice", kw)
            if word == "LIMIT":
                limit = n
            else:
                offset = n
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r} after query")
        if not patterns:
            raise self.error("the WHERE clause needs at least one triple pattern", open_tok)

        bound = {v for p in patterns for v in p.variables}
        for v, t in zip(projection or [], proj_toks):
            if v not in bound:
                raise self.error(f"projected variable {v} does not occur in any pattern", t)
        for f, t in filters:
            if f.var not in bound:
                raise self.error(f"filter variable {f.var} does not occur in any pattern", t)
        return SelectQuery(self.ns, projection, patterns, [f for f, _ in filters],
                           limit, offset, distinct)

    def prologue(self) -> None:
        while True:
            if self.is_word("PREFIX"):
                self.next()
                tok = self.tok
                if tok.kind != "pname" or not tok.text.endswith(":"):
                    raise self.error("expected a prefix name like 'ex:'")
                self.next()
                self.ns.bind(tok.text[:-1], self.iri_ref())
            elif self.is_word("BASE"):
                self.next()
                self.base = self.iri_ref()
            else:
                return

    def iri_ref(self) -> str:
        tok = self.tok
        if tok.kind != "iri":
            raise self.error("expected an IRI in angle brackets")
        self.next()
        try:
            value = unescape(tok.text[1:-1], allow_echar=False)
        except RdfSyntaxError as exc:
            raise self.error(str(exc), tok) from None
        if self.base and ":" not in value.split("/", 1)[0]:
            value = self.base + value
        return value

    def group(self) -> tuple[list[TriplePattern], list[tuple[Filter, _Tok]]]:
        patterns: list[TriplePattern] = []
        filters: list[tuple[Filter, _Tok]] = []
        while not (self.tok.kind == "punct" and self.tok.text == "}"):
            if self.tok.kind == "eof":
                raise self.error("unterminated group: expected '}'")
            if self.is_word("FILTER"):
                filters.append(self.filter())
            elif self.tok.kind == "punct" and self.tok.text == ".":
                self.next()
            else:
                patterns.extend(self.triples())
                if self.tok.kind == "punct" and self.tok.text == ".":
                    self.next()
                elif not (self.tok.kind == "punct" and self.tok.text == "}") and not self.is_word("FILTER"):
                    raise self.error(f"expected '.' or '}}' after triple pattern, found {self.tok.text!r}")
        return patterns, filters

    def triples(self) -> list[TriplePattern]:
        s = self.term("subject")
        out = []
        while True:
            p = self.term("predicate")
            while True:
                o = self.term("object")
                out.append(TriplePattern(s, p, o))
                if self.tok.kind == "punct" and self.tok.text == ",":
                    self.next()
                    continue
                break
            if self.tok.kind == "punct" and self.tok.text == ";":
                self.next()
                # tolerate a trailing ';' before '.' or '}'
                if self.tok.kind == "punct" and self.tok.text in ".}":
                    return out
                continue
            return out

    def term(self, role: str) -> PatternTerm:
        tok = self.tok
        if tok.kind == "var":
            self.next()
            return Variable(tok.text[1:])
        if tok.kind == "iri":
            value = self.iri_ref()
            return self._iri(value, tok)
        if tok.kind == "pname":
            self.next()
            return self._pname(tok)
        if tok.kind == "word" and tok.text == "a" and role == "predicate":
            self.next()
            return RDF_TYPE
        if role != "object" and tok.kind in ("string", "number") or (
                tok.kind == "word" and tok.text in ("true", "false") and role != "object"):
            raise self.error(f"a literal cannot be the {role}")
        if tok.kind == "string":
            return self.literal()
        if tok.kind == "number":
            self.next()
            return Literal(tok.text, datatype=XSD_DECIMAL if "." in tok.text else XSD_INTEGER)
        if tok.kind == "word" and tok.text in ("true", "false"):
            self.next()
            return Literal(tok.text, datatype=XSD_BOOLEAN)
        raise self.error(f"expected a {role}, found {tok.text or 'end of query'!r}")

    def _iri(self, value: str, tok: _Tok) -> Iri:
        try:
            return Iri(value)
        except ValueError as exc:
            raise self.error(str(exc), tok) from None

    def _pname(self, tok: _Tok) -> Iri:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.ns:
            raise self.error(f"unknown prefix {prefix!r}", tok)
        return self._iri(self.ns[prefix] + local, tok)

    def string(self) -> str:
        tok = self.next()
        try:
            return unescape(tok.text[1:-1])
        except RdfSyntaxError as exc:
            raise self.error(str(exc), tok) from None

    def literal(self) -> Literal:
        tok = self.tok
        lexical = self.string()
        try:
            if self.tok.kind == "lang":
                return Literal(lexical, lang=self.next().text[1:])
            if self.tok.kind == "dtype":
                self.next()
                dt = self.tok
                if dt.kind == "iri":
                    return Literal(lexical, datatype=self._iri(self.iri_ref(), dt))
                if dt.kind == "pname":
                    self.next()
                    return Literal(lexical, datatype=self._pname(dt))
                raise self.error("expected a datatype IRI after '^^'")
            return Literal(lexical)
        except ValueError as exc:
            if isinstance(exc, QuerySyntaxError):
                raise
            raise self.error(str(exc), tok) from None

    def filter(self) -> tuple[Filter, _Tok]:
        self.expect_word("FILTER")
        if self.is_word("REGEX"):
            # a bare built-in call needs no extra parentheses
            return self._regex()
        start = self.expect_punct("(")
        if self.is_word("REGEX"):
            result = self._regex()
            self.expect_punct(")")
            return result
        if self.tok.kind == "var":
            var_tok = self.next()
            self.expect_punct("=")
            operand = self.term("object")
        else:
            operand = self.term("object")
            self.expect_punct("=")
            var_tok = self.expect_var()
        if isinstance(operand, Variable):
            raise self.error("equality filters compare a variable with a constant", start)
        self.expect_punct(")")
        return Filter(Variable(var_tok.text[1:]), "equals", operand), var_tok

    def _regex(self) -> tuple[Filter, _Tok]:
        self.next()
        self.expect_punct("(")
        as_string = False
        if self.is_word("STR"):
            self.next()
            self.expect_punct("(")
            var_tok = self.expect_var()
            self.expect_punct(")")
            as_string = True
        else:
            var_tok = self.expect_var()
        self.expect_punct(",")
        if self.tok.kind != "string":
            raise self.error("regex pattern must be a string literal")
        pat_tok = self.tok
        pattern = self.string()
        flags = ""
        if self.tok.kind == "punct" and self.tok.text == ",":
            self.next()
            if self.tok.kind != "string":
                raise self.error("regex flags must be a string literal")
            flags = self.string()
        reason = check_regex(pattern, flags)
        if reason:
            raise self.error(reason, pat_tok)
        self.expect_punct(")")
        return Filter(Variable(var_tok.text[1:]), "regex", pattern, flags, as_string), var_tok

    def expect_var(self) -> _Tok:
        if self.tok.kind != "var":
            raise self.error(f"expected a variable, found {self.tok.text or 'end of query'!r}")
        return self.next()


def parse_query(text: str) -> SelectQuery:
    return _Parser(text).parse()


# -- evaluation ---------------------------------------------------------------

Binding = dict[Variable, Term]


def _resolve(t: PatternTerm, b: Binding):
    if isinstance(t, Variable):
        return b.get(t)
    return t


def _solutions(patterns: list[TriplePattern], g: Graph, b: Binding) -> Iterator[Binding]:
    if not patterns:
        yield dict(b)
        return
    # most selective remaining pattern first under the current bindings
    best_i, best_n = 0, None
    for i, pat in enumerate(patterns):
        n = g.estimate(*(_resolve(t, b) for t in pat))
        if best_n is None or n < best_n:
            best_i, best_n = i, n
            if n == 0:
                return
    pat = patterns[best_i]
    rest = patterns[:best_i] + patterns[best_i + 1:]
    s, p, o = (_resolve(t, b) for t in pat)
    for triple in g.triples(s, p, o):
        added: list[Variable] = []
        ok = True
        for term, value in zip(pat, triple):
            if isinstance(term, Variable):
                current = b.get(term)
                if current is None:
                    b[term] = value
                    added.append(term)
                elif current != value:
                    ok = False
                    break
        if ok:
            yield from _solutions(rest, g, b)
        for v in added:
            del b[v]


def row_key(row) -> tuple:
    return tuple("" if t is None else term_to_nt(t) for t in row)


def evaluate(q: SelectQuery, g: Graph) -> ResultTable:
    projected = q.projection if q.projection is not None else q.variables
    rows = []
    for sol in _solutions(list(q.patterns), g, {}):
        if all(f.test(sol[f.var]) for f in q.filters):
            rows.append([sol.get(v) for v in projected])
    if q.distinct:
        rows = [list(r) for r in {tuple(r) for r in rows}]
    rows.sort(key=row_key)
    start = q.offset or 0
    end = None if q.limit is None else start + q.limit
    return ResultTable([v.name for v in projected], rows[start:end])


def run_query(text: str, g: Graph) -> ResultTable:
    return evaluate(parse_query(text), g)


__all__ = [
    "Filter", "QuerySyntaxError", "ResultTable", "SelectQuery", "TriplePattern", "Variable",
    "check_regex", "evaluate", "parse_query", "row_key", "run_query",
]
