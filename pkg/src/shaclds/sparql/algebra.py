"""Syntax tree for the supported SELECT subset."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, is_dataclass, replace
from typing import Any, Iterator, Optional, Union

from ..model import BNode, IRI, Literal

_TERMS = (IRI, BNode, Literal)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


# property paths


@dataclass(frozen=True)
class InversePath:
    path: Any


@dataclass(frozen=True)
class SequencePath:
    steps: tuple


@dataclass(frozen=True)
class AlternativePath:
    options: tuple


@dataclass(frozen=True)
class OneOrMorePath:
    path: Any


@dataclass(frozen=True)
class ZeroOrMorePath:
    path: Any


Path = Union[IRI, InversePath, SequencePath, AlternativePath, OneOrMorePath, ZeroOrMorePath]


@dataclass(frozen=True)
class TriplePattern:
    subject: Any
    predicate: Any  # Var, IRI, or a path object
    object: Any


# graph patterns


@dataclass(frozen=True)
class BGP:
    patterns: tuple


@dataclass(frozen=True)
class Group:
    elements: tuple


@dataclass(frozen=True)
class OptionalPattern:
    group: Group


@dataclass(frozen=True)
class UnionPattern:
    groups: tuple


@dataclass(frozen=True)
class GraphPattern:
    name: Any  # IRI or Var
    group: Group


@dataclass(frozen=True)
class Filter:
    expr: Any


@dataclass(frozen=True)
class Bind:
    expr: Any
    var: Var


@dataclass(frozen=True)
class MinusPattern:
    group: Group


@dataclass(frozen=True)
class ServicePattern:
    endpoint: Any
    group: Group
    silent: bool = False


@dataclass(frozen=True)
class ValuesPattern:
    variables: tuple
    rows: tuple


# expressions


@dataclass(frozen=True)
class BinaryExpr:
    op: str
    left: Any
    right: Any


@dataclass(frozen=True)
class UnaryExpr:
    op: str
    operand: Any


@dataclass(frozen=True)
class FunctionCall:
    name: str  # upper-cased builtin name
    args: tuple


@dataclass(frozen=True)
class InExpr:
    operand: Any
    options: tuple
    negated: bool = False


@dataclass(frozen=True)
class ExistsExpr:
    group: Group
    negated: bool = False


@dataclass(frozen=True)
class Projection:
    expr: Any
    var: Var


@dataclass(frozen=True)
class Query:
    projection: tuple  # of Var / Projection; empty means SELECT *
    where: Group
    from_graphs: tuple = ()
    from_named: tuple = ()
    distinct: bool = False
    values: Optional[ValuesPattern] = None
    prefixes: tuple = field(default=(), compare=False)

    @property
    def select_all(self) -> bool:
        return not self.projection


def walk(node: Any) -> Iterator[Any]:
    """Pre-order traversal over every AST node and nested term."""
    yield node
    if isinstance(node, (tuple, list)):
        for item in node:
            yield from walk(item)
    elif is_dataclass(node) and not isinstance(node, type) and not isinstance(node, _TERMS):
        for f in fields(node):
            if f.compare:
                yield from walk(getattr(node, f.name))


def substitute(node: Any, binding: dict) -> Any:
    """Replace bound variables by their terms everywhere, including inside
    EXISTS groups. Binds and projections keep their target variable."""
    if isinstance(node, Var):
        return binding.get(node.name, node)
    if isinstance(node, tuple):
        return tuple(substitute(x, binding) for x in node)
    if isinstance(node, (Bind, Projection)):
        return replace(node, expr=substitute(node.expr, binding))
    if isinstance(node, ValuesPattern):
        return node
    if is_dataclass(node) and not isinstance(node, _TERMS):
        changes = {f.name: substitute(getattr(node, f.name), binding) for f in fields(node) if f.compare}
        return replace(node, **changes)
    return node
