"""Features a SPARQL-based constraint may not use."""

from __future__ import annotations

from dataclasses import dataclass

from .algebra import Bind, MinusPattern, Projection, Query, ServicePattern, ValuesPattern, Var, walk

RESERVED_VARIABLES = ("shapesGraph", "currentShape")


@dataclass(frozen=True)
class ProhibitedFeature:
    feature: str
    detail: str

    def __str__(self) -> str:
        return f"{self.feature}: {self.detail}"


def check_prohibited(ast: Query) -> list[ProhibitedFeature]:
    found: list[ProhibitedFeature] = []
    seen_vars: set[str] = set()
    nodes = list(walk(ast.where)) + list(walk(ast.projection))
    if ast.values is not None:
        nodes.append(ast.values)
    for node in nodes:
        if isinstance(node, MinusPattern):
            found.append(ProhibitedFeature("MINUS", "MINUS is not allowed in constraints"))
        elif isinstance(node, ServicePattern):
            found.append(ProhibitedFeature("SERVICE", "federated queries are not allowed in constraints"))
        elif isinstance(node, ValuesPattern):
            found.append(ProhibitedFeature("VALUES", "VALUES is not allowed in constraints"))
        elif isinstance(node, (Bind, Projection)) and node.var.name == "this":
            found.append(ProhibitedFeature("?this rebinding", "?this may not be the target of AS"))
        elif isinstance(node, Var) and node.name in RESERVED_VARIABLES and node.name not in seen_vars:
            seen_vars.add(node.name)
            found.append(ProhibitedFeature(
                f"${node.name}", f"pre-bound variable ${node.name} has no defined behaviour"))
    return found
