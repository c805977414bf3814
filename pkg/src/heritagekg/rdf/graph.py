"""Indexed in-memory triple set."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Optional

from .terms import Iri, Subject, Term, Triple, make_triple


class Graph:
    """A deduplicated set of triples with subject, predicate and object indexes.

    Many concurrent readers are fine; mutation needs exclusive access.
    """

    __slots__ = ("_triples", "_by_s", "_by_p", "_by_o")

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self._triples: set[Triple] = set()
        self._by_s: dict[Term, set[Triple]] = defaultdict(set)
        self._by_p: dict[Term, set[Triple]] = defaultdict(set)
        self._by_o: dict[Term, set[Triple]] = defaultdict(set)
        for t in triples:
            self.add(t)

    def add(self, t: Triple) -> bool:
        """Insert ``t``; return True if it was not already present."""
        if t in self._triples:
            return False
        if not isinstance(t, Triple):
            t = make_triple(*t)
        self._triples.add(t)
        self._by_s[t.subject].add(t)
        self._by_p[t.predicate].add(t)
        self._by_o[t.object].add(t)
        return True

    def discard(self, t: Triple) -> bool:
        if t not in self._triples:
            return False
        self._triples.remove(t)
        for index, key in ((self._by_s, t.subject), (self._by_p, t.predicate),
                           (self._by_o, t.object)):
            bucket = index[key]
            bucket.discard(t)
            if not bucket:
                del index[key]
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def copy(self) -> "Graph":
        return Graph(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t: object) -> bool:
        return t in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self) -> str:
        return f"<Graph with {len(self)} triples>"

    def as_set(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def triples(self, s: Optional[Subject] = None, p: Optional[Iri] = None,
                o: Optional[Term] = None) -> Iterator[Triple]:
        """Yield triples matching the pattern; ``None`` is a wildcard."""
        candidates = None
        for index, key in ((self._by_s, s), (self._by_p, p), (self._by_o, o)):
            if key is None:
                continue
            bucket = index.get(key)
            if not bucket:
                return
            if candidates is None or len(bucket) < len(candidates):
                candidates = bucket
        if candidates is None:
            candidates = self._triples
        for t in list(candidates):
            if ((s is None or t.subject == s) and (p is None or t.predicate == p)
                    and (o is None or t.object == o)):
                yield t

    def count(self, s: Optional[Subject] = None, p: Optional[Iri] = None,
              o: Optional[Term] = None) -> int:
        bound = sum(k is not None for k in (s, p, o))
        if bound <= 1:
            return self.estimate(s, p, o)
        return sum(1 for _ in self.triples(s, p, o))

    def estimate(self, s: Optional[Subject] = None, p: Optional[Iri] = None,
                 o: Optional[Term] = None) -> int:
        """Upper bound on matches, read straight off the smallest index."""
        sizes = [len(index.get(key, ())) for index, key in
                 ((self._by_s, s), (self._by_p, p), (self._by_o, o)) if key is not None]
        return min(sizes) if sizes else len(self._triples)

    def subjects(self) -> set[Subject]:
        return set(self._by_s)

    def predicates(self) -> set[Iri]:
        return set(self._by_p)

    def objects(self, s: Optional[Subject] = None, p: Optional[Iri] = None) -> list[Term]:
        return [t.object for t in self.triples(s, p, None)]

    def index_keys(self, position: str) -> set[Term]:
        return set({"s": self._by_s, "p": self._by_p, "o": self._by_o}[position])


def graph_insert(g: Graph, t: Triple) -> Graph:
    """Return a new graph holding ``g`` plus ``t``; use ``Graph.add`` to mutate."""
    out = g.copy()
    out.add(t)
    return out


def graph_merge(a: Graph, b: Graph) -> Graph:
    merged = a.copy()
    merged.update(b)
    return merged
