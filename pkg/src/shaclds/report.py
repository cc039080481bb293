"""Validation report graphs with dataset-level provenance.

Every result carries ``shds:sourceShapeGraph`` (the shapes graph holding the
shape) and ``shds:focusGraph``: the named graph IRI, ``shds:default``, or,
for a combined focus graph, a blank node holding a copy of the combination
expression written with the same ``shds:and``/``shds:or``/``shds:minus``
list structure as the declaration.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .model import BNode, Graph, IRI, Literal, Term, term_key
from .namespaces import RDF_FIRST, RDF_NIL, RDF_REST, RDF_TYPE, SH, SHDS, XSD
from .results import RawResult
from .shapes_dataset import And, Leaf, Minus, Or
from .sparql.algebra import InversePath, SequencePath
from .targets import DefaultSource, FocusGraph, NamedSource, derived_number


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotatedResult:
    raw: RawResult
    source_shapes_graph: IRI
    focus: FocusGraph

    @property
    def provenance(self):
        return self.focus.provenance


def annotate(raw: RawResult, shapes_graph: IRI, focus: FocusGraph) -> AnnotatedResult:
    return AnnotatedResult(raw, shapes_graph, focus)


def focus_graph_iri(focus: FocusGraph) -> Optional[IRI]:
    """IRI standing for the focus graph, or None when a combination copy is needed."""
    prov = focus.provenance
    if isinstance(prov, NamedSource):
        return prov.iri
    if isinstance(prov, DefaultSource):
        return SHDS.default
    expr = prov.expr
    while isinstance(expr, (And, Or)) and len(expr.operands) == 1:
        expr = expr.operands[0]
    # a lone graph stands for itself; shds:named / shds:all may cover several graphs
    if isinstance(expr, Leaf) and expr.ref.kind in ("named", "default"):
        return expr.ref.to_iri()
    return None


def focus_order(focus: FocusGraph) -> tuple:
    prov = focus.provenance
    if isinstance(prov, DefaultSource):
        return (0, 0, "")
    if isinstance(prov, NamedSource):
        return (0, 1, prov.iri.value)
    return (1, derived_number(focus.derived_id), "")


def _path_key(path) -> str:
    if path is None:
        return ""
    if isinstance(path, IRI):
        return path.value
    if isinstance(path, InversePath):
        return "^" + _path_key(path.path)
    if isinstance(path, SequencePath):
        return "/".join(_path_key(p) for p in path.steps)
    return repr(path)


def result_order(r: AnnotatedResult) -> tuple:
    raw = r.raw
    return (
        r.source_shapes_graph.value,
        focus_order(r.focus),
        term_key(raw.focus_node),
        raw.component.value,
        term_key(raw.source_shape),
        _path_key(raw.path),
        term_key(raw.value) if raw.value is not None else (),
        tuple(term_key(m) for m in raw.messages),
    )


def sort_results(results: Iterable[AnnotatedResult]) -> list[AnnotatedResult]:
    return sorted(results, key=result_order)


class _ReportBuilder:
    def __init__(self) -> None:
        self.g = Graph()
        self.counters: dict[str, int] = {}
        self.combination_nodes: dict[IRI, Term] = {}

    def fresh(self, prefix: str) -> BNode:
        n = self.counters.get(prefix, 0)
        self.counters[prefix] = n + 1
        return BNode(f"{prefix}{n}")

    def add(self, s, p, o) -> None:
        self.g.add((s, p, o))

    def rdf_list(self, items: list) -> Term:
        if not items:
            return RDF_NIL
        cells = [self.fresh("l") for _ in items]
        for i, (cell, item) in enumerate(zip(cells, items)):
            self.add(cell, RDF_FIRST, item)
            self.add(cell, RDF_REST, cells[i + 1] if i + 1 < len(cells) else RDF_NIL)
        return cells[0]

    def expression(self, expr) -> Term:
        if isinstance(expr, Leaf):
            return expr.ref.to_iri()
        node = self.fresh("c")
        operands = [self.expression(o) for o in expr.operands]
        pred = SHDS["and"] if isinstance(expr, And) else SHDS["or"] if isinstance(expr, Or) else SHDS.minus
        self.add(node, pred, self.rdf_list(operands))
        return node

    def focus_graph(self, focus: FocusGraph) -> Term:
        iri = focus_graph_iri(focus)
        if iri is not None:
            return iri
        if focus.derived_id not in self.combination_nodes:
            self.combination_nodes[focus.derived_id] = self.expression(focus.provenance.expr)
        return self.combination_nodes[focus.derived_id]

    def path(self, path) -> Term:
        if isinstance(path, IRI):
            return path
        if isinstance(path, InversePath):
            node = self.fresh("p")
            self.add(node, SH.inversePath, self.path(path.path))
            return node
        if isinstance(path, SequencePath):
            return self.rdf_list([self.path(p) for p in path.steps])
        raise ReportError(f"cannot write path {path!r}")


def _scoped(term: Term, scope: str) -> Term:
    """Keep blank nodes from the data and shapes documents apart in the report."""
    if isinstance(term, BNode):
        return BNode(f"{scope}_{term.id}")
    return term


def build_report(results: Iterable[AnnotatedResult]) -> Graph:
    results = sort_results(results)
    b = _ReportBuilder()
    report = BNode("report")
    b.add(report, RDF_TYPE, SH.ValidationReport)
    conforms = not any(r.raw.severity == SH.Violation for r in results)
    b.add(report, SH.conforms, Literal("true" if conforms else "false", XSD.boolean.value))
    for r in results:
        raw = r.raw
        node = b.fresh("r")
        b.add(report, SH.result, node)
        b.add(node, RDF_TYPE, SH.ValidationResult)
        b.add(node, SH.focusNode, _scoped(raw.focus_node, "d"))
        b.add(node, SH.resultSeverity, raw.severity)
        b.add(node, SH.sourceConstraintComponent, raw.component)
        b.add(node, SH.sourceShape, _scoped(raw.source_shape, "s"))
        if raw.source_constraint is not None:
            b.add(node, SH.sourceConstraint, _scoped(raw.source_constraint, "s"))
        if raw.path is not None:
            b.add(node, SH.resultPath, b.path(raw.path))
        if raw.value is not None:
            b.add(node, SH.value, _scoped(raw.value, "d"))
        for m in raw.messages:
            b.add(node, SH.resultMessage, m)
        b.add(node, SHDS.sourceShapeGraph, r.source_shapes_graph)
        b.add(node, SHDS.focusGraph, b.focus_graph(r.focus))
    return b.g


def conforms(report: Graph) -> bool:
    nodes = report.subjects(RDF_TYPE, SH.ValidationReport)
    if len(nodes) != 1:
        raise ReportError(f"expected one sh:ValidationReport node, found {len(nodes)}")
    values = report.objects(next(iter(nodes)), SH.conforms)
    if len(values) != 1:
        raise ReportError("report needs exactly one sh:conforms value")
    value = next(iter(values))
    if not isinstance(value, Literal) or value.lexical not in ("true", "false"):
        raise ReportError(f"sh:conforms must be a boolean, got {value.n3()}")
    return value.lexical == "true"


def report_results(report: Graph) -> list[Term]:
    """Result nodes of a report graph."""
    return sorted((o for _, _, o in report.triples(None, SH.result, None)), key=term_key)
