"""SHACL core validation of one graph against one shapes graph.

Only the constraint components listed in ``SUPPORTED`` are evaluated; any
other SHACL constraint parameter on a shape is rejected up front rather
than ignored. No RDFS inference is performed: ``sh:class`` and
``sh:targetClass`` look at ``rdf:type`` triples only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Optional

from .model import BNode, Graph, IRI, Literal, Term, term_key
from .namespaces import RDF_FIRST, RDF_TYPE, SH, XSD_BASE
from .results import RawResult
from .shapes_dataset import read_list
from .sparql.algebra import InversePath, SequencePath
from .sparql.constraint import ConstraintError, SparqlConstraint, validate_sparql_constraint
from .sparql.evaluate import ExprError, compare_literals
from .sparql.parser import ProhibitedFeatureError, SparqlSyntaxError


class ShapeError(ValueError):
    pass


COMPONENTS = {
    "class": SH.ClassConstraintComponent,
    "datatype": SH.DatatypeConstraintComponent,
    "nodeKind": SH.NodeKindConstraintComponent,
    "minCount": SH.MinCountConstraintComponent,
    "maxCount": SH.MaxCountConstraintComponent,
    "in": SH.InConstraintComponent,
    "hasValue": SH.HasValueConstraintComponent,
    "pattern": SH.PatternConstraintComponent,
    "minInclusive": SH.MinInclusiveConstraintComponent,
    "maxInclusive": SH.MaxInclusiveConstraintComponent,
    "node": SH.NodeConstraintComponent,
    "and": SH.AndConstraintComponent,
    "or": SH.OrConstraintComponent,
    "not": SH.NotConstraintComponent,
    "sparql": SH.SPARQLConstraintComponent,
}
SUPPORTED = tuple(COMPONENTS)

UNSUPPORTED = (
    "minExclusive", "maxExclusive", "minLength", "maxLength", "languageIn", "uniqueLang",
    "equals", "disjoint", "lessThan", "lessThanOrEquals", "closed", "xone",
    "qualifiedValueShape", "qualifiedMinCount", "qualifiedMaxCount", "target", "js",
)
_TARGETS = {
    SH.targetClass: "class",
    SH.targetNode: "node",
    SH.targetSubjectsOf: "subjects-of",
    SH.targetObjectsOf: "objects-of",
}
_NODE_KINDS = {
    SH.IRI: (IRI,),
    SH.BlankNode: (BNode,),
    SH.Literal: (Literal,),
    SH.BlankNodeOrIRI: (BNode, IRI),
    SH.BlankNodeOrLiteral: (BNode, Literal),
    SH.IRIOrLiteral: (IRI, Literal),
}
_LEXICAL = {
    XSD_BASE + "integer": re.compile(r"^[+-]?[0-9]+$"),
    XSD_BASE + "decimal": re.compile(r"^[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)$"),
    XSD_BASE + "boolean": re.compile(r"^(?:true|false|1|0)$"),
    XSD_BASE + "double": re.compile(r"^(?:[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?|[+-]?INF|NaN)$"),
    XSD_BASE + "date": re.compile(r"^-?[0-9]{4,}-[0-9]{2}-[0-9]{2}(?:Z|[+-][0-9]{2}:[0-9]{2})?$"),
    XSD_BASE + "dateTime": re.compile(
        r"^-?[0-9]{4,}-[0-9]{2}-[0-9]{2}T[0-9]{2}:[0-9]{2}:[0-9]{2}(?:\.[0-9]+)?(?:Z|[+-][0-9]{2}:[0-9]{2})?$"),
}
_LEXICAL[XSD_BASE + "float"] = _LEXICAL[XSD_BASE + "double"]


@dataclass(frozen=True)
class Target:
    kind: str  # "class" | "node" | "subjects-of" | "objects-of"
    value: Term


@dataclass(frozen=True)
class ConstraintParam:
    component: str
    value: Any


@dataclass(eq=False)
class Shape:
    id: Term
    kind: str  # "node-shape" | "property-shape"
    targets: list = field(default_factory=list)
    path: Optional[Any] = None
    constraints: list = field(default_factory=list)
    properties: list = field(default_factory=list)
    severity: IRI = SH.Violation
    messages: tuple = ()
    deactivated: bool = False

    def __repr__(self) -> str:
        return f"Shape({self.id.n3()}, {self.kind})"


# -- collecting shapes ------------------------------------------------------


def _list(g: Graph, head: Term, what: str) -> list:
    items, reason = read_list(head, g)
    if items is None:
        raise ShapeError(f"malformed list for {what}: {reason}")
    return items


def _parse_path(g: Graph, node: Term):
    if isinstance(node, IRI):
        return node
    if isinstance(node, Literal):
        raise ShapeError(f"sh:path cannot be a literal ({node.n3()})")
    inverse = g.objects(node, SH.inversePath)
    if inverse:
        if len(inverse) != 1:
            raise ShapeError("sh:inversePath needs exactly one value")
        return InversePath(_parse_path(g, next(iter(inverse))))
    for kind in ("alternativePath", "zeroOrMorePath", "oneOrMorePath", "zeroOrOnePath"):
        if g.objects(node, SH[kind]):
            raise ShapeError(f"unsupported path kind sh:{kind}")
    if g.objects(node, RDF_FIRST):
        steps = _list(g, node, "sh:path sequence")
        if len(steps) < 2:
            raise ShapeError("sequence paths need at least two steps")
        return SequencePath(tuple(_parse_path(g, s) for s in steps))
    raise ShapeError(f"unrecognised sh:path value {node.n3()}")


def _shape_nodes(g: Graph) -> set:
    nodes = set()
    for pred in _TARGETS:
        nodes.update(s for s, _, _ in g.triples(None, pred, None))
    for cls in (SH.NodeShape, SH.PropertyShape):
        nodes.update(g.subjects(RDF_TYPE, cls))
    nodes.update(s for s, _, _ in g.triples(None, SH.path, None))
    for pred in (SH.property, SH.node, SH["not"]):
        nodes.update(o for _, _, o in g.triples(None, pred, None))
    for pred in (SH["and"], SH["or"]):
        for _, _, head in g.triples(None, pred, None):
            nodes.update(_list(g, head, f"sh:{pred.value.rsplit('#', 1)[1]}"))
    return {n for n in nodes if not isinstance(n, Literal)}


def _single(g: Graph, node: Term, pred: IRI):
    values = g.objects(node, pred)
    if len(values) > 1:
        raise ShapeError(f"{node.n3()} has several values for {pred.n3()}")
    return next(iter(values), None)


def _count(g: Graph, node: Term, pred: IRI) -> Optional[int]:
    value = _single(g, node, pred)
    if value is None:
        return None
    if not isinstance(value, Literal) or not re.match(r"^\+?[0-9]+$", value.lexical):
        raise ShapeError(f"{pred.n3()} on {node.n3()} must be a non-negative integer")
    return int(value.lexical)


def _sparql_constraints(g: Graph, shape_node: Term, severity: IRI) -> list:
    out = []
    for c in sorted(g.objects(shape_node, SH.sparql), key=term_key):
        if g.objects(c, SH.prefixes) or g.objects(c, SH.declare):
            raise ShapeError(f"sh:prefixes/sh:declare are unsupported; inline PREFIX declarations instead ({c.n3()})")
        if g.objects(c, SH.ask):
            raise ShapeError(f"ASK-based SPARQL constraints are unsupported ({c.n3()})")
        deactivated = _single(g, c, SH.deactivated)
        if isinstance(deactivated, Literal) and deactivated.lexical in ("true", "1"):
            continue
        select = _single(g, c, SH.select)
        if not isinstance(select, Literal):
            raise ShapeError(f"SPARQL constraint {c.n3()} needs one literal sh:select")
        messages = tuple(sorted((m for m in g.objects(c, SH.message) if isinstance(m, Literal)), key=term_key))
        c_severity = _single(g, c, SH.severity) or severity
        try:
            out.append(SparqlConstraint(select.lexical, shape_node, c_severity, messages, c))
        except (SparqlSyntaxError, ProhibitedFeatureError, ConstraintError) as exc:
            raise ShapeError(f"SPARQL constraint {c.n3()} of {shape_node.n3()}: {exc}") from exc
    return out


def _build_shape(g: Graph, node: Term) -> Shape:
    for name in UNSUPPORTED:
        if g.objects(node, SH[name]):
            raise ShapeError(f"unsupported constraint component sh:{name} on shape {node.n3()}")
    path_value = _single(g, node, SH.path)
    shape = Shape(node, "property-shape" if path_value is not None else "node-shape")
    if path_value is not None:
        shape.path = _parse_path(g, path_value)
    for pred, kind in _TARGETS.items():
        for value in sorted(g.objects(node, pred), key=term_key):
            shape.targets.append(Target(kind, value))
    severity = _single(g, node, SH.severity)
    if severity is not None:
        if severity not in (SH.Violation, SH.Warning, SH.Info):
            raise ShapeError(f"unknown severity {severity.n3()} on {node.n3()}")
        shape.severity = severity
    shape.messages = tuple(sorted((m for m in g.objects(node, SH.message) if isinstance(m, Literal)),
                                  key=term_key))
    deactivated = _single(g, node, SH.deactivated)
    shape.deactivated = isinstance(deactivated, Literal) and deactivated.lexical in ("true", "1")

    cs = shape.constraints
    for value in sorted(g.objects(node, SH["class"]), key=term_key):
        cs.append(ConstraintParam("class", value))
    for name in ("datatype", "nodeKind", "hasValue", "minInclusive", "maxInclusive"):
        for value in sorted(g.objects(node, SH[name]), key=term_key):
            if name == "nodeKind" and value not in _NODE_KINDS:
                raise ShapeError(f"unknown sh:nodeKind {value.n3()} on {node.n3()}")
            if name in ("minInclusive", "maxInclusive") and not isinstance(value, Literal):
                raise ShapeError(f"sh:{name} on {node.n3()} must be a literal")
            cs.append(ConstraintParam(name, value))
    for name in ("minCount", "maxCount"):
        n = _count(g, node, SH[name])
        if n is not None:
            if shape.kind != "property-shape":
                raise ShapeError(f"sh:{name} is only allowed on property shapes ({node.n3()})")
            cs.append(ConstraintParam(name, n))
    for head in sorted(g.objects(node, SH["in"]), key=term_key):
        cs.append(ConstraintParam("in", tuple(_list(g, head, "sh:in"))))
    flags = _single(g, node, SH.flags)
    for value in sorted(g.objects(node, SH.pattern), key=term_key):
        flag_text = flags.lexical if isinstance(flags, Literal) else ""
        try:
            re.compile(value.lexical)
        except (re.error, AttributeError) as exc:
            raise ShapeError(f"invalid sh:pattern on {node.n3()}: {exc}") from None
        cs.append(ConstraintParam("pattern", (value.lexical, flag_text)))
    for name in ("node", "not"):
        for value in sorted(g.objects(node, SH[name]), key=term_key):
            cs.append(ConstraintParam(name, value))
    for name in ("and", "or"):
        for head in sorted(g.objects(node, SH[name]), key=term_key):
            cs.append(ConstraintParam(name, tuple(_list(g, head, f"sh:{name}"))))
    for c in _sparql_constraints(g, node, shape.severity):
        cs.append(ConstraintParam("sparql", c))
    shape.properties = sorted(g.objects(node, SH.property), key=term_key)
    return shape


def collect_shapes(shapes_graph: Graph) -> list[Shape]:
    """Every shape in the graph, sorted by id, with shape references resolved."""
    g = shapes_graph
    shapes = {n: _build_shape(g, n) for n in _shape_nodes(g)}

    def resolve(ref: Term) -> Shape:
        return shapes[ref]

    for shape in shapes.values():
        shape.properties = [resolve(p) for p in shape.properties]
        for i, c in enumerate(shape.constraints):
            if c.component in ("node", "not"):
                shape.constraints[i] = ConstraintParam(c.component, resolve(c.value))
            elif c.component in ("and", "or"):
                shape.constraints[i] = ConstraintParam(c.component, tuple(resolve(v) for v in c.value))
        for p in shape.properties:
            if p.kind != "property-shape":
                raise ShapeError(f"sh:property value {p.id.n3()} has no sh:path")
    return sorted(shapes.values(), key=lambda s: term_key(s.id))


# -- focus and value nodes --------------------------------------------------


def select_focus_nodes(shape: Shape, data: Graph) -> set:
    nodes = set()
    for target in shape.targets:
        if target.kind == "class":
            nodes |= data.subjects(RDF_TYPE, target.value)
        elif target.kind == "node":
            nodes.add(target.value)
        elif target.kind == "subjects-of":
            nodes.update(s for s, _, _ in data.triples(None, target.value, None))
        else:
            nodes.update(o for _, _, o in data.triples(None, target.value, None))
    return nodes


def _follow(path, data: Graph, node: Term) -> list:
    if isinstance(path, IRI):
        return list(data.objects(node, path)) if not isinstance(node, Literal) else []
    if isinstance(path, InversePath):
        return _follow_back(path.path, data, node)
    values = [node]
    for step in path.steps:
        values = [v for x in values for v in _follow(step, data, x)]
    return values


def _follow_back(path, data: Graph, node: Term) -> list:
    if isinstance(path, IRI):
        return list(data.subjects(path, node))
    if isinstance(path, InversePath):
        return _follow(path.path, data, node)
    values = [node]
    for step in reversed(path.steps):
        values = [v for x in values for v in _follow_back(step, data, x)]
    return values


def value_nodes(focus: Term, path, data: Graph) -> list:
    """Value nodes as a multiset (list); node shapes yield the focus node itself."""
    if path is None:
        return [focus]
    return sorted(_follow(path, data, focus), key=term_key)


# -- validation -------------------------------------------------------------


def _well_typed(lit: Literal) -> bool:
    rx = _LEXICAL.get(lit.datatype)
    return rx is None or bool(rx.match(lit.lexical))


def _in_range(value: Term, bound: Literal, lower: bool) -> bool:
    if not isinstance(value, Literal):
        return False
    try:
        c = compare_literals(value, bound)
    except ExprError:
        return False
    return c >= 0 if lower else c <= 0


class _Validator:
    def __init__(self, view) -> None:
        self.view = view
        self.data: Graph = getattr(view, "view", view).default
        self.stack: set = set()

    def conforms(self, shape: Shape, node: Term) -> bool:
        return not self.validate_node(shape, node)

    def validate_node(self, shape: Shape, focus: Term) -> list[RawResult]:
        if shape.deactivated:
            return []
        key = (shape.id, focus)
        if key in self.stack:
            raise ShapeError(f"recursive shape reference through {shape.id.n3()}")
        self.stack.add(key)
        try:
            return self._validate_node(shape, focus)
        finally:
            self.stack.discard(key)

    def _validate_node(self, shape: Shape, focus: Term) -> list[RawResult]:
        values = value_nodes(focus, shape.path, self.data)
        distinct = sorted(set(values), key=term_key)
        out: list[RawResult] = []

        def fail(component: str, value: Optional[Term] = None) -> None:
            out.append(RawResult(
                focus_node=focus, component=COMPONENTS[component], source_shape=shape.id,
                severity=shape.severity, path=shape.path, value=value, messages=shape.messages,
            ))

        for c in shape.constraints:
            comp, arg = c.component, c.value
            if comp == "class":
                for v in distinct:
                    if isinstance(v, Literal) or (v, RDF_TYPE, arg) not in self.data:
                        fail(comp, v)
            elif comp == "datatype":
                for v in distinct:
                    if not (isinstance(v, Literal) and v.datatype == arg.value and _well_typed(v)):
                        fail(comp, v)
            elif comp == "nodeKind":
                for v in distinct:
                    if not isinstance(v, _NODE_KINDS[arg]):
                        fail(comp, v)
            elif comp == "minCount":
                if len(distinct) < arg:
                    fail(comp)
            elif comp == "maxCount":
                if len(distinct) > arg:
                    fail(comp)
            elif comp == "in":
                for v in distinct:
                    if v not in arg:
                        fail(comp, v)
            elif comp == "hasValue":
                if arg not in distinct:
                    fail(comp)
            elif comp == "pattern":
                rx, flags = arg
                bits = 0
                for ch in flags:
                    bits |= {"i": re.I, "s": re.S, "m": re.M, "x": re.X}.get(ch, 0)
                for v in distinct:
                    text = None if isinstance(v, BNode) else (v.value if isinstance(v, IRI) else v.lexical)
                    if text is None or not re.search(rx, text, bits):
                        fail(comp, v)
            elif comp in ("minInclusive", "maxInclusive"):
                for v in distinct:
                    if not _in_range(v, arg, comp == "minInclusive"):
                        fail(comp, v)
            elif comp == "node":
                for v in distinct:
                    if not self.conforms(arg, v):
                        fail(comp, v)
            elif comp == "not":
                for v in distinct:
                    if self.conforms(arg, v):
                        fail(comp, v)
            elif comp == "and":
                for v in distinct:
                    if not all(self.conforms(s, v) for s in arg):
                        fail(comp, v)
            elif comp == "or":
                for v in distinct:
                    if not any(self.conforms(s, v) for s in arg):
                        fail(comp, v)
            elif comp == "sparql":
                out.extend(validate_sparql_constraint(arg, [focus], self.view, shape.path))
        for prop in shape.properties:
            for v in distinct:
                out.extend(self.validate_node(prop, v))
        return out


def validate_shape(shape: Shape, view) -> list[RawResult]:
    """Results of one shape over the view's default graph.

    ``view`` is an evaluation dataset (or a plain dataset); SPARQL-based
    constraints see all of it, core components only its default graph.
    """
    validator = _Validator(view)
    out = []
    for node in sorted(select_focus_nodes(shape, validator.data), key=term_key):
        out.extend(validator.validate_node(shape, node))
    return out
