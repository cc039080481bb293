"""SPARQL-based constraints: each solution row is one validation result."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..model import BNode, IRI, Literal, Term, term_key
from ..namespaces import SH
from ..results import RawResult
from .algebra import Query, Var, walk
from .evaluate import evaluate_select
from .parser import parse_query

_TEMPLATE_VAR = re.compile(r"\{[?$]([A-Za-z0-9_]+)\}")


class ConstraintError(ValueError):
    pass


@dataclass
class SparqlConstraint:
    select_text: str
    owner_shape: Term
    severity: IRI = SH.Violation
    messages: tuple = ()
    node: Optional[Term] = None  # the sh:sparql value in the shapes graph
    ast: Query = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if "$PATH" in self.select_text:
            raise ConstraintError("$PATH substitution is not supported")
        self.ast = parse_query(self.select_text)
        if not any(isinstance(n, Var) and n.name == "this" for n in walk(self.ast.where)):
            raise ConstraintError("SPARQL constraint query must mention $this")


def _render(term: Term) -> str:
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, BNode):
        return term.n3()
    return term.lexical


def fill_template(message: Literal, row: dict) -> Literal:
    def repl(m: re.Match) -> str:
        value = row.get(m.group(1))
        return _render(value) if value is not None else m.group(0)

    text = _TEMPLATE_VAR.sub(repl, message.lexical)
    if message.language:
        return Literal(text, language=message.language)
    return Literal(text, message.datatype)


def validate_sparql_constraint(c: SparqlConstraint, focus_nodes: Iterable[Term], view,
                               path=None) -> list[RawResult]:
    results = []
    for node in sorted(focus_nodes, key=term_key):
        for row in evaluate_select(c.ast, view, {"this": node}):
            messages = tuple(fill_template(m, row) for m in c.messages)
            if not messages and isinstance(row.get("message"), Literal):
                messages = (row["message"],)
            results.append(RawResult(
                focus_node=node,
                component=SH.SPARQLConstraintComponent,
                source_shape=c.owner_shape,
                severity=c.severity,
                path=row.get("path", path),
                value=row.get("value", node if path is None else None),
                messages=messages,
                source_constraint=c.node,
            ))
    return results
