"""RDF terms, graphs and datasets.

Terms are small frozen value objects compared structurally. A ``Graph`` is a
set of triples with three hash indexes, so membership and single-position
lookups are O(1) expected. Graphs are filled while parsing or while building
a derived graph and are treated as read-only afterwards.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Union

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")

XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"


@dataclass(frozen=True, slots=True)
class IRI:
    value: str

    def __post_init__(self) -> None:
        if not _SCHEME.match(self.value):
            raise ValueError(f"IRI is not absolute: {self.value!r}")

    def __str__(self) -> str:
        return self.value

    def n3(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BNode:
    id: str

    def __str__(self) -> str:
        return f"_:{self.id}"

    def n3(self) -> str:
        return f"_:{self.id}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.language is not None:
            object.__setattr__(self, "language", self.language.lower())
            object.__setattr__(self, "datatype", RDF_LANGSTRING)
        elif self.datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal requires a language tag")
        if self.datatype is None:
            object.__setattr__(self, "datatype", XSD_STRING)

    def __str__(self) -> str:
        return self.lexical

    def n3(self) -> str:
        from .serializer import quote_string

        text = quote_string(self.lexical)
        if self.language:
            return f"{text}@{self.language}"
        if self.datatype == XSD_STRING:
            return text
        return f"{text}^^<{self.datatype}>"


Term = Union[IRI, BNode, Literal]
Triple = tuple  # (subject, predicate, object)


def term_key(term: Term) -> tuple:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, IRI):
        return (0, term.value)
    if isinstance(term, BNode):
        return (1, term.id)
    return (2, term.lexical, term.datatype, term.language or "")


def triple_key(triple: Triple) -> tuple:
    return tuple(term_key(t) for t in triple)


class Graph:
    """A set of RDF triples."""

    __slots__ = ("_triples", "_spo", "_pos", "_osp")

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self._triples: set[Triple] = set()
        self._spo: dict = defaultdict(lambda: defaultdict(set))
        self._pos: dict = defaultdict(lambda: defaultdict(set))
        self._osp: dict = defaultdict(lambda: defaultdict(set))
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> None:
        s, p, o = triple
        if not isinstance(s, (IRI, BNode)):
            raise ValueError(f"subject must be an IRI or blank node: {s!r}")
        if not isinstance(p, IRI):
            raise ValueError(f"predicate must be an IRI: {p!r}")
        if not isinstance(o, (IRI, BNode, Literal)):
            raise ValueError(f"object is not an RDF term: {o!r}")
        t = (s, p, o)
        if t in self._triples:
            return
        self._triples.add(t)
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __bool__(self) -> bool:
        return bool(self._triples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<Graph with {len(self)} triples>"

    def __or__(self, other: Graph) -> Graph:
        return graph_union(self, other)

    def __and__(self, other: Graph) -> Graph:
        return graph_intersection(self, other)

    def __sub__(self, other: Graph) -> Graph:
        return graph_difference(self, other)

    def triple_set(self) -> frozenset:
        return frozenset(self._triples)

    def sorted_triples(self) -> list[Triple]:
        return sorted(self._triples, key=triple_key)

    def triples(self, s: Optional[Term] = None, p: Optional[Term] = None,
                o: Optional[Term] = None) -> Iterator[Triple]:
        """Yield triples matching the pattern; ``None`` is a wildcard."""
        if s is not None:
            by_p = self._spo.get(s)
            if not by_p:
                return
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    if o in objs:
                        yield (s, p, o)
                else:
                    for obj in list(objs):
                        yield (s, p, obj)
            elif o is not None:
                for pred in list(self._osp.get(o, {}).get(s, ())):
                    yield (s, pred, o)
            else:
                for pred, objs in list(by_p.items()):
                    for obj in list(objs):
                        yield (s, pred, obj)
        elif p is not None:
            by_o = self._pos.get(p)
            if not by_o:
                return
            if o is not None:
                for subj in list(by_o.get(o, ())):
                    yield (subj, p, o)
            else:
                for obj, subjs in list(by_o.items()):
                    for subj in list(subjs):
                        yield (subj, p, obj)
        elif o is not None:
            for subj, preds in list(self._osp.get(o, {}).items()):
                for pred in list(preds):
                    yield (subj, pred, o)
        else:
            yield from list(self._triples)

    def objects(self, s: Term, p: Term) -> set:
        return set(self._spo.get(s, {}).get(p, ()))

    def subjects(self, p: Term, o: Term) -> set:
        return set(self._pos.get(p, {}).get(o, ()))

    def value(self, s: Term, p: Term) -> Optional[Term]:
        """The single object of (s, p), or None; raises if there are several."""
        objs = self._spo.get(s, {}).get(p, ())
        if len(objs) > 1:
            raise ValueError(f"{s} has {len(objs)} values for {p}")
        return next(iter(objs), None)

    def subject_set(self) -> set:
        return {s for s, by_p in self._spo.items() if by_p}

    def nodes(self) -> set:
        """All subjects and objects."""
        out = self.subject_set()
        out.update(o for o, by_s in self._osp.items() if by_s)
        return out


def graph_union(a: Graph, b: Graph) -> Graph:
    return Graph(a._triples | b._triples)


def graph_intersection(a: Graph, b: Graph) -> Graph:
    return Graph(a._triples & b._triples)


def graph_difference(a: Graph, b: Graph) -> Graph:
    return Graph(a._triples - b._triples)


@dataclass
class Dataset:
    """A default graph plus IRI-named graphs.

    Blank-node labels are shared across all graphs of one dataset.
    """

    default: Graph = field(default_factory=Graph)
    named: dict[IRI, Graph] = field(default_factory=dict)

    def graph(self, name: Optional[IRI]) -> Optional[Graph]:
        if name is None:
            return self.default
        return self.named.get(name)

    def graphs_of(self) -> list[tuple[Optional[IRI], Graph]]:
        """Default graph (name ``None``) first, then named graphs by IRI."""
        out: list[tuple[Optional[IRI], Graph]] = [(None, self.default)]
        for name in sorted(self.named, key=lambda n: n.value):
            out.append((name, self.named[name]))
        return out

    def quads(self) -> Iterator[tuple]:
        for name, g in self.graphs_of():
            for s, p, o in g.sorted_triples():
                yield (s, p, o, name)

    def __len__(self) -> int:
        return sum(len(g) for _, g in self.graphs_of())


def graphs_of(d: Dataset) -> list[tuple[Optional[IRI], Graph]]:
    return d.graphs_of()


# -- isomorphism ------------------------------------------------------------


def _is_ground(triple: Triple) -> bool:
    return not any(isinstance(t, BNode) for t in triple)


def _incidence(triples: list[Triple]) -> dict:
    inc: dict = defaultdict(list)
    for t in triples:
        for pos, term in enumerate(t):
            if isinstance(term, BNode):
                inc[term].append((pos, t))
    return inc


def _refine(incs: list[dict], colors: list[dict]) -> list[dict]:
    """Colour refinement run jointly on several graphs so colours are comparable."""
    while True:
        table: dict = {}
        new_colors = []
        for inc, col in zip(incs, colors):
            nc = {}
            for node, edges in inc.items():
                sig = []
                for pos, t in edges:
                    sig.append((pos,) + tuple(
                        (3, col[x]) if isinstance(x, BNode) else term_key(x) for x in t
                    ))
                sig.sort()
                key = (col[node], tuple(sig))
                nc[node] = table.setdefault(key, len(table))
            new_colors.append(nc)
        stable = all(
            len(set(nc.values())) == len(set(col.values()))
            for nc, col in zip(new_colors, colors)
        )
        colors = new_colors
        if stable:
            return colors


def _histogram(col: dict) -> dict:
    hist: dict = defaultdict(int)
    for c in col.values():
        hist[c] += 1
    return dict(hist)


def graph_isomorphic(a: Graph, b: Graph) -> bool:
    """True iff some blank-node bijection maps ``a`` onto ``b``."""
    if len(a) != len(b):
        return False
    ground_a = {t for t in a if _is_ground(t)}
    ground_b = {t for t in b if _is_ground(t)}
    if ground_a != ground_b:
        return False
    rest_a = [t for t in a if not _is_ground(t)]
    rest_b = [t for t in b if not _is_ground(t)]
    inc_a, inc_b = _incidence(rest_a), _incidence(rest_b)
    if len(inc_a) != len(inc_b):
        return False
    col_a = {n: 0 for n in inc_a}
    col_b = {n: 0 for n in inc_b}
    target = set(rest_b)
    return _search([inc_a, inc_b], [col_a, col_b], rest_a, target)


def _search(incs: list[dict], colors: list[dict], rest_a: list[Triple], target: set) -> bool:
    col_a, col_b = _refine(incs, colors)
    if _histogram(col_a) != _histogram(col_b):
        return False
    classes: dict = defaultdict(list)
    for node, c in col_a.items():
        classes[c].append(node)
    ambiguous = [(len(ns), c) for c, ns in classes.items() if len(ns) > 1]
    if not ambiguous:
        by_color = {c: n for n, c in col_b.items()}
        mapping = {n: by_color[c] for n, c in col_a.items()}
        return all(
            tuple(mapping.get(x, x) if isinstance(x, BNode) else x for x in t) in target
            for t in rest_a
        )
    _, color = min(ambiguous, key=lambda pair: (pair[0], pair[1]))
    pivot = min(classes[color], key=lambda n: n.id)
    fresh = max(max(col_a.values()), max(col_b.values())) + 1
    for candidate in sorted((n for n, c in col_b.items() if c == color), key=lambda n: n.id):
        ca = dict(col_a)
        cb = dict(col_b)
        ca[pivot] = fresh
        cb[candidate] = fresh
        if _search(incs, [ca, cb], rest_a, target):
            return True
    return False
