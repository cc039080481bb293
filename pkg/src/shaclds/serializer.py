"""Turtle and TriG output.

Output is deterministic: subjects, predicates and objects are written in
term order, and blank nodes referenced exactly once are nested inline
(``[ ... ]`` or ``( ... )`` for well-formed lists).
"""

from __future__ import annotations

import re
from collections import defaultdict
from typing import Iterable, Mapping, Optional

from .model import BNode, Dataset, Graph, IRI, Literal, term_key

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDF_TYPE = IRI(RDF + "type")
RDF_FIRST = IRI(RDF + "first")
RDF_REST = IRI(RDF + "rest")
RDF_NIL = IRI(RDF + "nil")

_SAFE_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_SAFE_BNODE = re.compile(r"^[A-Za-z0-9_]+$")
_BARE = {
    XSD + "integer": re.compile(r"^[+-]?[0-9]+$"),
    XSD + "decimal": re.compile(r"^[+-]?[0-9]*\.[0-9]+$"),
    XSD + "boolean": re.compile(r"^(true|false)$"),
}
_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t",
                   "\b": "\\b", "\f": "\\f"}


def quote_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return '"' + "".join(out) + '"'


def _iri_ref(value: str) -> str:
    out = []
    for ch in value:
        if ord(ch) <= 0x20 or ch in '<>"{}|^`\\':
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "<" + "".join(out) + ">"


class _Writer:
    def __init__(self, graph: Graph, prefixes: Mapping[str, str], indent: str = "") -> None:
        self.graph = graph
        # longest namespace first so the most specific prefix wins
        self.prefixes = sorted(prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))
        self.base_indent = indent
        self.inline: set[BNode] = set()
        self.labels: dict[BNode, str] = {}
        self._plan()

    def _plan(self) -> None:
        g = self.graph
        refs: dict = defaultdict(int)
        for s, _, o in g:
            if isinstance(o, BNode):
                refs[o] += 1
                if o == s:
                    refs[o] += 1
        inline = {n for n, c in refs.items() if c == 1}
        subjects = g.subject_set()
        while True:
            roots = [s for s in subjects if s not in inline]
            reached: set = set()
            stack = list(roots)
            while stack:
                node = stack.pop()
                for _, _, o in g.triples(node, None, None):
                    if o in inline and o not in reached:
                        reached.add(o)
                        stack.append(o)
            stranded = [n for n in inline if n in subjects and n not in reached]
            if not stranded:
                break
            inline.discard(min(stranded, key=term_key))
        self.inline = inline

    def iri(self, term: IRI) -> str:
        value = term.value
        for prefix, ns in self.prefixes:
            if value.startswith(ns):
                local = value[len(ns):]
                if local == "" or _SAFE_LOCAL.match(local):
                    return f"{prefix}:{local}"
        return _iri_ref(value)

    def bnode_label(self, node: BNode) -> str:
        if node not in self.labels:
            label = node.id if _SAFE_BNODE.match(node.id) else f"n{len(self.labels)}"
            self.labels[node] = label
        return "_:" + self.labels[node]

    def literal(self, lit: Literal) -> str:
        bare = _BARE.get(lit.datatype)
        if bare is not None and bare.match(lit.lexical):
            return lit.lexical
        text = quote_string(lit.lexical)
        if lit.language:
            return f"{text}@{lit.language}"
        if lit.datatype == XSD + "string":
            return text
        return f"{text}^^{self.iri(IRI(lit.datatype))}"

    def list_items(self, node: BNode) -> Optional[list]:
        items = []
        seen = set()
        while node != RDF_NIL:
            if not isinstance(node, BNode) or node not in self.inline or node in seen:
                return None
            seen.add(node)
            triples = list(self.graph.triples(node, None, None))
            preds = sorted(p.value for _, p, _ in triples)
            if preds != [RDF + "first", RDF + "rest"]:
                return None
            items.append(self.graph.value(node, RDF_FIRST))
            node = self.graph.value(node, RDF_REST)
        return items

    def term(self, term, level: int) -> str:
        if isinstance(term, IRI):
            return self.iri(term)
        if isinstance(term, Literal):
            return self.literal(term)
        if term not in self.inline:
            return self.bnode_label(term)
        items = self.list_items(term)
        if items is not None:
            return "( " + " ".join(self.term(x, level + 1) for x in items) + " )"
        if not any(True for _ in self.graph.triples(term, None, None)):
            return "[]"
        pad = self.base_indent + "    " * (level + 1)
        body = self.predicate_objects(term, level + 1)
        return "[\n" + pad + body + "\n" + self.base_indent + "    " * level + "]"

    def predicate_objects(self, subject, level: int) -> str:
        by_pred: dict = defaultdict(list)
        for _, p, o in self.graph.triples(subject, None, None):
            by_pred[p].append(o)
        preds = sorted(by_pred, key=lambda p: (p != RDF_TYPE, term_key(p)))
        pad = self.base_indent + "    " * level
        parts = []
        for p in preds:
            verb = "a" if p == RDF_TYPE else self.iri(p)
            objs = ", ".join(self.term(o, level) for o in sorted(by_pred[p], key=term_key))
            parts.append(f"{verb} {objs}")
        return (" ;\n" + pad).join(parts)

    def statements(self) -> list[str]:
        subjects = sorted((s for s in self.graph.subject_set() if s not in self.inline), key=term_key)
        out = []
        for s in subjects:
            head = self.term(s, 0) if not isinstance(s, BNode) else self.bnode_label(s)
            out.append(self.base_indent + head + " " + self.predicate_objects(s, 1) + " .")
        return out


def _prefix_block(prefixes: Mapping[str, str]) -> list[str]:
    return [f"@prefix {p}: {_iri_ref(ns)} ." for p, ns in sorted(prefixes.items())]


def serialize_graph(g: Graph, format: str = "turtle",
                    prefixes: Optional[Mapping[str, str]] = None) -> bytes:
    prefixes = dict(prefixes or {})
    lines = _prefix_block(prefixes)
    if format == "turtle":
        body = _Writer(g, prefixes).statements()
        if lines and body:
            lines.append("")
        lines.extend(body)
    elif format == "trig":
        body = _Writer(g, prefixes, indent="    ").statements()
        if lines:
            lines.append("")
        lines.append("{")
        lines.extend(body)
        lines.append("}")
    else:
        raise ValueError(f"unsupported output format {format!r}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_dataset(d: Dataset, prefixes: Optional[Mapping[str, str]] = None) -> bytes:
    """TriG with one block per graph.

    Blank nodes shared across graphs keep a common label, so no blank node
    that appears in more than one graph is written inline.
    """
    prefixes = dict(prefixes or {})
    shared = _shared_bnodes(g for _, g in d.graphs_of())
    lines = _prefix_block(prefixes)
    for name, g in d.graphs_of():
        if name is None and not g:
            continue
        writer = _Writer(g, prefixes, indent="    ")
        writer.inline -= shared
        if lines:
            lines.append("")
        lines.append("{" if name is None else writer.iri(name) + " {")
        lines.extend(writer.statements())
        lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _shared_bnodes(graphs: Iterable[Graph]) -> set:
    seen: dict = defaultdict(int)
    for g in graphs:
        nodes = {t for triple in g for t in triple if isinstance(t, BNode)}
        for n in nodes:
            seen[n] += 1
    return {n for n, c in seen.items() if c > 1}
