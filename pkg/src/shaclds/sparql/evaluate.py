"""Evaluation of parsed queries over an evaluation dataset."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal, InvalidOperation
from functools import reduce
from typing import Iterable, Optional

from ..model import BNode, Graph, IRI, Literal, graph_union, term_key
from .algebra import (
    BGP, AlternativePath, BinaryExpr, Bind, ExistsExpr, Filter, FunctionCall, Group,
    GraphPattern, InExpr, InversePath, MinusPattern, OneOrMorePath, OptionalPattern, Projection,
    Query, SequencePath, ServicePattern, TriplePattern, UnaryExpr, UnionPattern, ValuesPattern,
    Var, ZeroOrMorePath, substitute,
)

log = logging.getLogger(__name__)

XSD = "http://www.w3.org/2001/XMLSchema#"
_INTEGER_TYPES = {XSD + t for t in (
    "integer", "int", "long", "short", "byte", "nonNegativeInteger", "positiveInteger",
    "nonPositiveInteger", "negativeInteger", "unsignedInt", "unsignedLong", "unsignedShort",
    "unsignedByte")}
_DECIMAL_TYPES = _INTEGER_TYPES | {XSD + "decimal"}
_FLOAT_TYPES = {XSD + "double", XSD + "float"}
NUMERIC_TYPES = _DECIMAL_TYPES | _FLOAT_TYPES
XSD_STRING = XSD + "string"
XSD_BOOLEAN = XSD + "boolean"
XSD_DATETIME = XSD + "dateTime"
RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

TRUE = Literal("true", XSD_BOOLEAN)
FALSE = Literal("false", XSD_BOOLEAN)


class ExprError(Exception):
    """A SPARQL expression type error; filters treat it as false."""


class EvaluationError(ValueError):
    pass


@dataclass
class QueryDataset:
    default: Graph
    named: dict


def query_dataset(query: Query, default: Graph, named: dict) -> QueryDataset:
    """Dataset a query runs on: the given one, unless FROM / FROM NAMED
    select graphs out of ``named`` (missing graphs are empty)."""
    if not query.from_graphs and not query.from_named:
        return QueryDataset(default, named)

    def lookup(iri: IRI) -> Graph:
        g = named.get(iri)
        if g is None:
            log.warning("FROM graph %s is not in the evaluation dataset; using an empty graph", iri.value)
            return Graph()
        return g

    graphs = [lookup(i) for i in query.from_graphs]
    merged = reduce(graph_union, graphs) if graphs else Graph()
    return QueryDataset(merged, {i: lookup(i) for i in query.from_named})


# -- literal values -----------------------------------------------------------


def numeric_value(lit: Literal):
    if lit.datatype in _DECIMAL_TYPES:
        try:
            value = Decimal(lit.lexical)
        except InvalidOperation:
            raise ExprError(f"ill-typed numeric literal {lit.lexical!r}") from None
        if lit.datatype in _INTEGER_TYPES and value != value.to_integral_value():
            raise ExprError(f"ill-typed integer literal {lit.lexical!r}")
        return value
    if lit.datatype in _FLOAT_TYPES:
        text = lit.lexical.strip()
        text = {"INF": "inf", "-INF": "-inf", "+INF": "inf"}.get(text, text)
        try:
            return float(text)
        except ValueError:
            raise ExprError(f"ill-typed float literal {lit.lexical!r}") from None
    raise ExprError(f"{lit.datatype} is not numeric")


def is_numeric(term) -> bool:
    return isinstance(term, Literal) and term.datatype in NUMERIC_TYPES


def datetime_value(lit: Literal) -> datetime:
    text = lit.lexical.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        return datetime.fromisoformat(text)
    except ValueError:
        raise ExprError(f"ill-typed dateTime {lit.lexical!r}") from None


def compare_literals(a: Literal, b: Literal) -> int:
    """Three-way comparison of comparable literals; raises ExprError otherwise."""
    if is_numeric(a) and is_numeric(b):
        x, y = numeric_value(a), numeric_value(b)
        if isinstance(x, float) or isinstance(y, float):
            x, y = float(x), float(y)
    elif a.datatype == b.datatype == XSD_DATETIME:
        x, y = datetime_value(a), datetime_value(b)
        if (x.tzinfo is None) != (y.tzinfo is None):
            raise ExprError("cannot compare dateTimes with and without timezone")
    elif a.datatype == b.datatype and a.datatype in (XSD_STRING, XSD_BOOLEAN):
        x, y = a.lexical, b.lexical
        if a.datatype == XSD_BOOLEAN:
            x, y = x in ("true", "1"), y in ("true", "1")
    elif a.datatype == b.datatype == RDF_LANGSTRING and a.language == b.language:
        x, y = a.lexical, b.lexical
    else:
        raise ExprError("literals are not comparable")
    return (x > y) - (x < y)


def _bool(value: bool) -> Literal:
    return TRUE if value else FALSE


def ebv(term) -> bool:
    """Effective boolean value."""
    if not isinstance(term, Literal):
        raise ExprError("no effective boolean value for a non-literal")
    if term.datatype == XSD_BOOLEAN:
        return term.lexical in ("true", "1")
    if term.datatype in (XSD_STRING, RDF_LANGSTRING):
        return term.lexical != ""
    if is_numeric(term):
        value = numeric_value(term)
        return value == value and value != 0
    raise ExprError("no effective boolean value")


def _string_arg(term) -> Literal:
    if not isinstance(term, Literal) or term.datatype not in (XSD_STRING, RDF_LANGSTRING):
        raise ExprError("string argument expected")
    return term


_REGEX_FLAGS = {"i": re.IGNORECASE, "s": re.DOTALL, "m": re.MULTILINE, "x": re.VERBOSE}


def regex_match(text: str, pattern: str, flags: str = "") -> bool:
    bits = 0
    for ch in flags:
        if ch == "q":
            pattern = re.escape(pattern)
        elif ch in _REGEX_FLAGS:
            bits |= _REGEX_FLAGS[ch]
        else:
            raise ExprError(f"unknown regex flag {ch!r}")
    try:
        return re.search(pattern, text, bits) is not None
    except re.error as exc:
        raise ExprError(f"invalid regex: {exc}") from None


def _numeric_literal(value, a: Literal, b: Literal, op: str) -> Literal:
    if isinstance(value, float) or a.datatype in _FLOAT_TYPES or b.datatype in _FLOAT_TYPES:
        return Literal(repr(float(value)), XSD + "double")
    if op == "/" or a.datatype not in _INTEGER_TYPES or b.datatype not in _INTEGER_TYPES:
        return Literal(str(value), XSD + "decimal")
    return Literal(str(int(value)), XSD + "integer")


# -- evaluator --------------------------------------------------------------


def _solution_key(row: dict) -> tuple:
    return tuple(sorted((k, term_key(v)) for k, v in row.items()))


def _compatible(a: dict, b: dict) -> bool:
    return all(b[k] == v for k, v in a.items() if k in b)


def _join(left: list, right: list) -> list:
    out = []
    for a in left:
        for b in right:
            if _compatible(a, b):
                merged = dict(a)
                merged.update(b)
                out.append(merged)
    return out


class Evaluator:
    def __init__(self, dataset: QueryDataset) -> None:
        self.dataset = dataset

    # graph patterns

    def group(self, group: Group, graph: Graph, seed: Optional[list] = None) -> list:
        solutions = seed if seed is not None else [{}]
        filters = []
        for elem in group.elements:
            if isinstance(elem, Filter):
                filters.append(elem.expr)
            elif isinstance(elem, BGP):
                solutions = [mu for base in solutions for mu in self.bgp(elem.patterns, graph, base)]
            elif isinstance(elem, OptionalPattern):
                solutions = self.left_join(solutions, elem.group, graph)
            elif isinstance(elem, Bind):
                solutions = [self.extend(mu, elem.var, elem.expr, graph) for mu in solutions]
            elif isinstance(elem, (MinusPattern, ServicePattern, ValuesPattern)):
                raise EvaluationError(f"{type(elem).__name__} cannot be evaluated in a constraint")
            else:
                solutions = _join(solutions, self.pattern(elem, graph))
        for expr in filters:
            solutions = [mu for mu in solutions if self.test(expr, mu, graph)]
        return solutions

    def pattern(self, elem, graph: Graph) -> list:
        if isinstance(elem, Group):
            return self.group(elem, graph)
        if isinstance(elem, UnionPattern):
            return [mu for g in elem.groups for mu in self.group(g, graph)]
        if isinstance(elem, GraphPattern):
            if isinstance(elem.name, Var):
                out = []
                for name in sorted(self.dataset.named, key=lambda n: n.value):
                    for mu in self.group(elem.group, self.dataset.named[name]):
                        bound = mu.get(elem.name.name)
                        if bound is None:
                            mu = dict(mu)
                            mu[elem.name.name] = name
                            out.append(mu)
                        elif bound == name:
                            out.append(mu)
                return out
            inner = self.dataset.named.get(elem.name)
            if inner is None:
                return []
            return self.group(elem.group, inner)
        raise EvaluationError(f"cannot evaluate {type(elem).__name__}")

    def left_join(self, solutions: list, group: Group, graph: Graph) -> list:
        inner_filters = [e.expr for e in group.elements if isinstance(e, Filter)]
        body = Group(tuple(e for e in group.elements if not isinstance(e, Filter)))
        right = self.group(body, graph)
        out = []
        for mu in solutions:
            matched = False
            for nu in right:
                if not _compatible(mu, nu):
                    continue
                merged = dict(mu)
                merged.update(nu)
                if all(self.test(expr, merged, graph) for expr in inner_filters):
                    out.append(merged)
                    matched = True
            if not matched:
                out.append(mu)
        return out

    def extend(self, mu: dict, var: Var, expr, graph: Graph) -> dict:
        try:
            value = self.expr(expr, mu, graph)
        except ExprError:
            return mu
        out = dict(mu)
        out[var.name] = value
        return out

    # basic graph patterns

    def bgp(self, patterns: tuple, graph: Graph, mu: dict) -> Iterable[dict]:
        if not patterns:
            yield mu
            return
        # most-bound pattern first
        def boundness(tp: TriplePattern) -> int:
            return sum(1 for x in (tp.subject, tp.predicate, tp.object)
                       if not isinstance(x, Var) or x.name in mu)
        idx = max(range(len(patterns)), key=lambda i: boundness(patterns[i]))
        tp = patterns[idx]
        rest = patterns[:idx] + patterns[idx + 1:]
        for nu in self.match(tp, graph, mu):
            yield from self.bgp(rest, graph, nu)

    def match(self, tp: TriplePattern, graph: Graph, mu: dict) -> Iterable[dict]:
        s = mu.get(tp.subject.name, tp.subject) if isinstance(tp.subject, Var) else tp.subject
        o = mu.get(tp.object.name, tp.object) if isinstance(tp.object, Var) else tp.object
        p = tp.predicate
        if isinstance(p, Var):
            p = mu.get(p.name, p)
        if isinstance(p, (IRI, Var)):
            for ts, tpred, to in graph.triples(
                    None if isinstance(s, Var) else s,
                    None if isinstance(p, Var) else p,
                    None if isinstance(o, Var) else o):
                nu = dict(mu)
                if _bind(nu, s, ts) and _bind(nu, p, tpred) and _bind(nu, o, to):
                    yield nu
            return
        if isinstance(p, (Literal, BNode)):
            return
        for start, end in self.path_pairs(p, graph, None if isinstance(s, Var) else s,
                                          None if isinstance(o, Var) else o):
            nu = dict(mu)
            if _bind(nu, s, start) and _bind(nu, o, end):
                yield nu

    # property paths

    def forward(self, path, graph: Graph, node) -> set:
        if isinstance(path, IRI):
            return graph.objects(node, path) if not isinstance(node, Literal) else set()
        if isinstance(path, InversePath):
            return self.backward(path.path, graph, node)
        if isinstance(path, SequencePath):
            frontier = {node}
            for step in path.steps:
                frontier = {m for n in frontier for m in self.forward(step, graph, n)}
            return frontier
        if isinstance(path, AlternativePath):
            return {m for opt in path.options for m in self.forward(opt, graph, node)}
        if isinstance(path, (OneOrMorePath, ZeroOrMorePath)):
            return self._closure(path, graph, node, self.forward)
        raise EvaluationError(f"unsupported path {path!r}")

    def backward(self, path, graph: Graph, node) -> set:
        if isinstance(path, IRI):
            return graph.subjects(path, node)
        if isinstance(path, InversePath):
            return self.forward(path.path, graph, node)
        if isinstance(path, SequencePath):
            frontier = {node}
            for step in reversed(path.steps):
                frontier = {m for n in frontier for m in self.backward(step, graph, n)}
            return frontier
        if isinstance(path, AlternativePath):
            return {m for opt in path.options for m in self.backward(opt, graph, node)}
        if isinstance(path, (OneOrMorePath, ZeroOrMorePath)):
            return self._closure(path, graph, node, self.backward)
        raise EvaluationError(f"unsupported path {path!r}")

    def _closure(self, path, graph: Graph, node, step) -> set:
        reached = set()
        frontier = step(path.path, graph, node)
        while frontier:
            new = frontier - reached
            reached |= new
            frontier = {m for n in new for m in step(path.path, graph, n)}
        if isinstance(path, ZeroOrMorePath):
            reached.add(node)
        return reached

    def path_pairs(self, path, graph: Graph, s, o) -> Iterable[tuple]:
        if s is not None:
            ends = self.forward(path, graph, s)
            if o is not None:
                if o in ends:
                    yield (s, o)
            else:
                for end in ends:
                    yield (s, end)
        elif o is not None:
            for start in self.backward(path, graph, o):
                yield (start, o)
        else:
            for start in sorted(graph.nodes(), key=term_key):
                for end in self.forward(path, graph, start):
                    yield (start, end)

    # expressions

    def test(self, expr, mu: dict, graph: Graph) -> bool:
        try:
            return ebv(self.expr(expr, mu, graph))
        except ExprError:
            return False

    def expr(self, e, mu: dict, graph: Graph):
        if isinstance(e, Var):
            if e.name not in mu:
                raise ExprError(f"unbound variable ?{e.name}")
            return mu[e.name]
        if isinstance(e, (IRI, Literal, BNode)):
            return e
        if isinstance(e, ExistsExpr):
            group = substitute(e.group, mu)
            found = bool(self.group(group, graph))
            return _bool(found != e.negated)
        if isinstance(e, UnaryExpr):
            if e.op == "!":
                return _bool(not ebv(self.expr(e.operand, mu, graph)))
            value = self.expr(e.operand, mu, graph)
            if not is_numeric(value):
                raise ExprError("unary minus on a non-number")
            if e.op == "+":
                return value
            zero = Literal("0", XSD + "integer")
            return _numeric_literal(-numeric_value(value), zero, value, "-")
        if isinstance(e, BinaryExpr):
            return self.binary(e, mu, graph)
        if isinstance(e, InExpr):
            value = self.expr(e.operand, mu, graph)
            hit = False
            for option in e.options:
                try:
                    if self._equal(value, self.expr(option, mu, graph)):
                        hit = True
                        break
                except ExprError:
                    continue
            return _bool(hit != e.negated)
        if isinstance(e, FunctionCall):
            return self.call(e, mu, graph)
        raise ExprError(f"cannot evaluate {e!r}")

    def _equal(self, a, b) -> bool:
        if a == b:
            return True
        if isinstance(a, Literal) and isinstance(b, Literal):
            try:
                return compare_literals(a, b) == 0
            except ExprError:
                return False
        return False

    def binary(self, e: BinaryExpr, mu: dict, graph: Graph):
        if e.op == "||":
            try:
                if ebv(self.expr(e.left, mu, graph)):
                    return TRUE
                left_err = False
            except ExprError:
                left_err = True
            if ebv(self.expr(e.right, mu, graph)):
                return TRUE
            if left_err:
                raise ExprError("error in ||")
            return FALSE
        if e.op == "&&":
            try:
                left = ebv(self.expr(e.left, mu, graph))
            except ExprError:
                if not ebv(self.expr(e.right, mu, graph)):
                    return FALSE
                raise
            if not left:
                return FALSE
            return _bool(ebv(self.expr(e.right, mu, graph)))
        a = self.expr(e.left, mu, graph)
        b = self.expr(e.right, mu, graph)
        if e.op in ("=", "!="):
            eq = self._equal(a, b)
            return _bool(eq if e.op == "=" else not eq)
        if e.op in ("<", ">", "<=", ">="):
            if not (isinstance(a, Literal) and isinstance(b, Literal)):
                raise ExprError("ordering comparison on non-literals")
            c = compare_literals(a, b)
            return _bool({"<": c < 0, ">": c > 0, "<=": c <= 0, ">=": c >= 0}[e.op])
        if not (is_numeric(a) and is_numeric(b)):
            raise ExprError("arithmetic on non-numbers")
        x, y = numeric_value(a), numeric_value(b)
        if isinstance(x, float) or isinstance(y, float):
            x, y = float(x), float(y)
        if e.op == "+":
            value = x + y
        elif e.op == "-":
            value = x - y
        elif e.op == "*":
            value = x * y
        else:
            if y == 0:
                raise ExprError("division by zero")
            value = x / y
        return _numeric_literal(value, a, b, e.op)

    def call(self, e: FunctionCall, mu: dict, graph: Graph):
        name = e.name
        if name == "BOUND":
            arg = e.args[0]
            return _bool(not isinstance(arg, Var) or arg.name in mu)
        args = [self.expr(a, mu, graph) for a in e.args]
        if name in ("ISIRI", "ISURI"):
            return _bool(isinstance(args[0], IRI))
        if name == "ISBLANK":
            return _bool(isinstance(args[0], BNode))
        if name == "ISLITERAL":
            return _bool(isinstance(args[0], Literal))
        if name == "ISNUMERIC":
            try:
                return _bool(is_numeric(args[0]) and numeric_value(args[0]) is not None)
            except ExprError:
                return FALSE
        if name == "SAMETERM":
            return _bool(args[0] == args[1])
        if name == "STR":
            if isinstance(args[0], BNode):
                raise ExprError("STR of a blank node")
            return Literal(args[0].value if isinstance(args[0], IRI) else args[0].lexical)
        if name == "LANG":
            if not isinstance(args[0], Literal):
                raise ExprError("LANG of a non-literal")
            return Literal(args[0].language or "")
        if name == "DATATYPE":
            if not isinstance(args[0], Literal):
                raise ExprError("DATATYPE of a non-literal")
            return IRI(args[0].datatype)
        if name == "REGEX":
            text = _string_arg(args[0]).lexical
            pattern = _string_arg(args[1]).lexical
            flags = _string_arg(args[2]).lexical if len(args) > 2 else ""
            return _bool(regex_match(text, pattern, flags))
        if name == "LANGMATCHES":
            tag, rng = _string_arg(args[0]).lexical.lower(), _string_arg(args[1]).lexical.lower()
            if rng == "*":
                return _bool(tag != "")
            return _bool(tag == rng or tag.startswith(rng + "-"))
        text = _string_arg(args[0])
        if name == "STRLEN":
            return Literal(str(len(text.lexical)), XSD + "integer")
        if name == "LCASE":
            return Literal(text.lexical.lower(), language=text.language) if text.language else Literal(text.lexical.lower())
        if name == "UCASE":
            return Literal(text.lexical.upper(), language=text.language) if text.language else Literal(text.lexical.upper())
        other = _string_arg(args[1]).lexical
        if name == "CONTAINS":
            return _bool(other in text.lexical)
        if name == "STRSTARTS":
            return _bool(text.lexical.startswith(other))
        if name == "STRENDS":
            return _bool(text.lexical.endswith(other))
        raise ExprError(f"unsupported function {name}")


def _bind(mu: dict, slot, value) -> bool:
    if isinstance(slot, Var):
        current = mu.get(slot.name)
        if current is None:
            mu[slot.name] = value
            return True
        return current == value
    return slot == value


def project(query: Query, solutions: list, evaluator: Evaluator, graph: Graph) -> list:
    rows = []
    for mu in solutions:
        if query.select_all:
            row = {k: v for k, v in mu.items() if not k.startswith("_")}
        else:
            row = {}
            for item in query.projection:
                if isinstance(item, Projection):
                    try:
                        row[item.var.name] = evaluator.expr(item.expr, mu, graph)
                    except ExprError:
                        pass
                elif item.name in mu:
                    row[item.name] = mu[item.name]
        rows.append(row)
    if query.distinct:
        unique = {}
        for row in rows:
            unique.setdefault(_solution_key(row), row)
        rows = list(unique.values())
    return sorted(rows, key=_solution_key)


def evaluate_query(ast: Query, default: Graph, named: dict,
                   binding: Optional[dict] = None) -> list[dict]:
    """Solutions of ``ast`` over the dataset ``(default, named)``.

    ``binding`` pre-binds variables (normally ``{"this": node}``) by
    substituting the constants into the pattern; the bound values are added
    to every row. Rows come back sorted.
    """
    binding = binding or {}
    for feature in (ast.values,):
        if feature is not None:
            raise EvaluationError("VALUES cannot be evaluated in a constraint")
    dataset = query_dataset(ast, default, named)
    where = substitute(ast.where, binding) if binding else ast.where
    evaluator = Evaluator(dataset)
    solutions = evaluator.group(where, dataset.default)
    rows = project(ast, solutions, evaluator, dataset.default)
    if binding:
        wanted = set(binding) if ast.select_all else {
            (i.var.name if isinstance(i, Projection) else i.name) for i in ast.projection}
        for row in rows:
            for k, v in binding.items():
                if k in wanted:
                    row[k] = v
        rows.sort(key=_solution_key)
    return rows


def evaluate_select(ast: Query, view, binding: Optional[dict] = None) -> list[dict]:
    """Run ``ast`` on an evaluation dataset (or a plain :class:`Dataset`)."""
    dataset = getattr(view, "view", view)
    return evaluate_query(ast, dataset.default, dataset.named, binding)
