"""Dataset validation: every shapes graph against each of its focus graphs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import Shape, collect_shapes, validate_shape
from .model import Dataset, Graph, IRI
from .namespaces import SH
from .report import AnnotatedResult, annotate, build_report, sort_results
from .shapes_dataset import ShapesDataset, WellformednessViolation, check_wellformed, extract_declarations
from .targets import DerivedIds, FocusGraph, resolve_targets
from .view import build_view

log = logging.getLogger(__name__)


class WellformednessError(ValueError):
    """The shapes dataset failed structural checks; nothing was validated."""

    def __init__(self, violations: list[WellformednessViolation]) -> None:
        self.violations = violations
        super().__init__(f"shapes dataset is not well-formed ({len(violations)} violation(s))")


@dataclass
class ValidationOptions:
    fail_fast: bool = False
    max_results: Optional[int] = None


@dataclass
class ValidationRun:
    shapes: ShapesDataset
    data: Dataset
    options: ValidationOptions = field(default_factory=ValidationOptions)

    @classmethod
    def from_datasets(cls, shapes: Dataset, data: Dataset, **options) -> ValidationRun:
        violations = check_wellformed(shapes)
        if violations:
            raise WellformednessError(violations)
        return cls(extract_declarations(shapes), data, ValidationOptions(**options))


def iter_pairs(run: ValidationRun) -> Iterator[tuple[IRI, FocusGraph]]:
    """(shapes graph, focus graph) pairs in evaluation order."""
    ids = DerivedIds()
    for s_iri in run.shapes.shapes_graph_iris():
        if run.shapes.shapes_graph(s_iri) is None:
            log.warning("%s has target declarations but is not a named graph of the shapes dataset",
                        s_iri.value)
            continue
        for focus in resolve_targets(s_iri, run.shapes, run.data, ids):
            yield s_iri, focus


def validate_pair(s_iri: IRI, shapes: list[Shape], focus: FocusGraph, data: Dataset) -> list[AnnotatedResult]:
    view = build_view(data, focus)
    out = []
    for shape in shapes:
        out.extend(annotate(raw, s_iri, focus) for raw in validate_shape(shape, view))
    return out


def collect_results(run: ValidationRun) -> list[AnnotatedResult]:
    """All annotated results, normalised order, honouring the run options."""
    results: list[AnnotatedResult] = []
    limit = run.options.max_results
    shapes: dict[IRI, list[Shape]] = {}
    for s_iri, focus in iter_pairs(run):
        if s_iri not in shapes:
            shapes[s_iri] = collect_shapes(run.shapes.shapes_graph(s_iri))
        found = validate_pair(s_iri, shapes[s_iri], focus, run.data)
        results.extend(found)
        if limit is not None and len(results) >= limit:
            break
        if run.options.fail_fast and any(r.raw.severity == SH.Violation for r in found):
            break
    results = sort_results(results)
    if limit is not None:
        results = results[:limit]
    return results


def validate_dataset(run: ValidationRun) -> Graph:
    """Validate and return the merged report graph.

    The shapes dataset is checked for well-formedness first; failures raise
    :class:`WellformednessError` instead of producing a report.
    """
    violations = check_wellformed(run.shapes.underlying)
    if violations:
        raise WellformednessError(violations)
    return build_report(collect_results(run))


def validate(data: Dataset, shapes: Dataset, fail_fast: bool = False,
             max_results: Optional[int] = None) -> Graph:
    run = ValidationRun.from_datasets(shapes, data, fail_fast=fail_fast, max_results=max_results)
    return validate_dataset(run)
