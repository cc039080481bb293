"""Target resolution: which focus graphs a shapes graph validates.

Direct targets are the included graphs minus the excluded ones, both
identified by graph name. Each combination declaration contributes exactly
one derived graph, which exclusions never remove.
"""

from __future__ import annotations

import itertools
import logging
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterator, Optional, Union

from .model import Dataset, Graph, IRI, graph_difference, graph_intersection, graph_union
from .namespaces import SHDS
from .shapes_dataset import (
    And, CombinationError, CombinationExpr, GraphRef, Leaf, Minus, Or, ShapesDataset,
    TargetDeclarationSet, WellformednessViolation,
)

log = logging.getLogger(__name__)

DERIVED_PREFIX = "urn:shaclds:derived:"


class TargetResolutionError(ValueError):
    pass


@dataclass(frozen=True)
class NamedSource:
    iri: IRI


@dataclass(frozen=True)
class DefaultSource:
    pass


@dataclass(frozen=True)
class CombinedSource:
    expr: CombinationExpr


Provenance = Union[NamedSource, DefaultSource, CombinedSource]


@dataclass(eq=False)
class FocusGraph:
    triples: Graph
    provenance: Provenance
    derived_id: IRI

    @property
    def is_combination(self) -> bool:
        return isinstance(self.provenance, CombinedSource)

    def __repr__(self) -> str:
        return f"FocusGraph({self.derived_id.value}, {len(self.triples)} triples)"


class DerivedIds:
    """Per-run counter minting ``urn:shaclds:derived:<n>`` identifiers."""

    def __init__(self, start: int = 0) -> None:
        self._counter = itertools.count(start)

    def fresh(self, d: Dataset) -> IRI:
        while True:
            iri = IRI(f"{DERIVED_PREFIX}{next(self._counter)}")
            if iri not in d.named:
                return iri


_shared_ids = DerivedIds()


def derived_number(iri: IRI) -> int:
    return int(iri.value[len(DERIVED_PREFIX):])


def _direct(name: Optional[IRI], d: Dataset) -> FocusGraph:
    if name is None:
        return FocusGraph(d.default, DefaultSource(), SHDS.default)
    return FocusGraph(d.named[name], NamedSource(name), name)


def expand_reserved(ref: GraphRef, d: Dataset) -> list[tuple[Optional[IRI], Graph]]:
    """Graphs a reference stands for, as ``(name, graph)``; ``None`` names the default graph."""
    if ref.kind == "default":
        return [(None, d.default)]
    if ref.kind == "all-named":
        return [(n, g) for n, g in d.graphs_of() if n is not None]
    if ref.kind == "all":
        return d.graphs_of()
    if ref.iri not in d.named:
        log.warning("target graph %s is not a named graph of the data dataset", ref.iri.value)
        return []
    return [(ref.iri, d.named[ref.iri])]


def _pattern_matches(patterns: set, d: Dataset) -> set:
    out = set()
    for pattern in sorted(patterns):
        try:
            rx = re.compile(pattern)
        except re.error as exc:
            raise TargetResolutionError(f"invalid graph pattern {pattern!r}: {exc}") from None
        out.update(n for n in d.named if rx.search(n.value))
    return out


def _name_key(name: Optional[IRI]) -> tuple:
    return (0, "") if name is None else (1, name.value)


def direct_targets(decl: TargetDeclarationSet, d: Dataset) -> list[FocusGraph]:
    """Included graphs minus excluded graphs, default graph first, then by IRI."""
    included = {n for ref in decl.includes for n, _ in expand_reserved(ref, d)}
    included |= _pattern_matches(decl.include_patterns, d)
    excluded = {n for ref in decl.excludes for n, _ in expand_reserved(ref, d)}
    excluded |= _pattern_matches(decl.exclude_patterns, d)
    return [_direct(n, d) for n in sorted(included - excluded, key=_name_key)]


def _operand_graphs(expr: CombinationExpr, d: Dataset) -> Iterator[Graph]:
    for operand in expr.operands:
        if isinstance(operand, Leaf) and operand.ref.kind in ("all-named", "all"):
            yield from (g for _, g in expand_reserved(operand.ref, d))
        else:
            yield _combine(operand, d)


def _combine(expr: CombinationExpr, d: Dataset) -> Graph:
    if isinstance(expr, Leaf):
        graphs = expand_reserved(expr.ref, d)
        if len(graphs) > 1:
            raise TargetResolutionError(f"{expr.ref} denotes several graphs outside shds:or/shds:and")
        return graphs[0][1] if graphs else Graph()
    if isinstance(expr, Minus):
        for side in expr.operands:
            if isinstance(side, Leaf) and side.ref.kind in ("all-named", "all"):
                raise CombinationError([WellformednessViolation(
                    side.ref.to_iri(), SHDS.minus, None, "not allowed as an operand of shds:minus")])
        return graph_difference(_combine(expr.left, d), _combine(expr.right, d))
    graphs = list(_operand_graphs(expr, d))
    if not graphs:
        return Graph()
    op = graph_intersection if isinstance(expr, And) else graph_union
    return reduce(op, graphs)


def evaluate_combination(expr: CombinationExpr, d: Dataset,
                         ids: Optional[DerivedIds] = None) -> FocusGraph:
    """Materialise one combined graph under a fresh identifier."""
    triples = _combine(expr, d)
    if any(triples is g for _, g in d.graphs_of()):
        triples = Graph(triples)  # a derived graph never aliases a dataset graph
    return FocusGraph(triples, CombinedSource(expr), (ids or _shared_ids).fresh(d))


def resolve_targets(s_iri: IRI, sd: ShapesDataset, d: Dataset,
                    ids: Optional[DerivedIds] = None) -> list[FocusGraph]:
    """Direct targets followed by one derived graph per combination, in declaration order."""
    decl = sd.declarations.get(s_iri)
    if decl is None:
        raise TargetResolutionError(f"{s_iri.value} has no target declarations")
    ids = ids or _shared_ids
    out = direct_targets(decl, d)
    out.extend(evaluate_combination(expr, d, ids) for expr in decl.combinations)
    return out
