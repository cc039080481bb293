"""Reading target declarations out of a shapes dataset.

A shapes dataset keeps SHACL shapes in named graphs. Triples using the
``shds:targetGraph*`` predicates, with a shapes-graph IRI as subject, say
which data graphs (or combinations of them) each shapes graph validates.
They may sit in the default graph or in any named graph; the subject decides
which shapes graph they belong to.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .model import BNode, Dataset, Graph, IRI, Literal, Term, term_key
from .namespaces import RDF_FIRST, RDF_NIL, RDF_REST, SHDS

TARGET_GRAPH = SHDS.targetGraph
TARGET_GRAPH_EXCLUDE = SHDS.targetGraphExclude
TARGET_GRAPH_PATTERN = SHDS.targetGraphPattern
TARGET_GRAPH_PATTERN_EXCLUDE = SHDS.targetGraphPatternExclude
TARGET_GRAPH_COMBINATION = SHDS.targetGraphCombination
AND, OR, MINUS = SHDS["and"], SHDS["or"], SHDS.minus
OPERATORS = {AND: "and", OR: "or", MINUS: "minus"}

TARGETING_PREDICATES = (
    TARGET_GRAPH, TARGET_GRAPH_EXCLUDE, TARGET_GRAPH_PATTERN,
    TARGET_GRAPH_PATTERN_EXCLUDE, TARGET_GRAPH_COMBINATION,
)


@dataclass(frozen=True)
class GraphRef:
    """A graph reference: a named graph IRI or one of the reserved IRIs."""

    kind: str  # "named" | "default" | "all-named" | "all"
    iri: Optional[IRI] = None

    @classmethod
    def from_iri(cls, iri: IRI) -> GraphRef:
        if iri == SHDS.default:
            return DEFAULT_REF
        if iri == SHDS.named:
            return ALL_NAMED_REF
        if iri == SHDS.all:
            return ALL_REF
        return cls("named", iri)

    @property
    def reserved(self) -> bool:
        return self.kind != "named"

    def to_iri(self) -> IRI:
        if self.kind == "named":
            return self.iri
        return {"default": SHDS.default, "all-named": SHDS.named, "all": SHDS.all}[self.kind]

    def __str__(self) -> str:
        return self.to_iri().value


DEFAULT_REF = GraphRef("default")
ALL_NAMED_REF = GraphRef("all-named")
ALL_REF = GraphRef("all")


@dataclass(frozen=True)
class Leaf:
    ref: GraphRef

    def key(self) -> str:
        return f"<{self.ref}>"


@dataclass(frozen=True)
class And:
    operands: tuple

    def key(self) -> str:
        return "and(" + ",".join(o.key() for o in self.operands) + ")"


@dataclass(frozen=True)
class Or:
    operands: tuple

    def key(self) -> str:
        return "or(" + ",".join(o.key() for o in self.operands) + ")"


@dataclass(frozen=True)
class Minus:
    left: object
    right: object

    @property
    def operands(self) -> tuple:
        return (self.left, self.right)

    def key(self) -> str:
        return f"minus({self.left.key()},{self.right.key()})"


CombinationExpr = Union[Leaf, And, Or, Minus]


def expr_depth(expr: CombinationExpr) -> int:
    if isinstance(expr, Leaf):
        return 0
    return 1 + max(expr_depth(o) for o in expr.operands)


@dataclass
class TargetDeclarationSet:
    includes: set = field(default_factory=set)
    excludes: set = field(default_factory=set)
    include_patterns: set = field(default_factory=set)
    exclude_patterns: set = field(default_factory=set)
    combinations: list = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.includes or self.include_patterns or self.combinations)


@dataclass
class ShapesDataset:
    underlying: Dataset
    declarations: dict[IRI, TargetDeclarationSet]

    def shapes_graph(self, iri: IRI) -> Optional[Graph]:
        return self.underlying.named.get(iri)

    def shapes_graph_iris(self) -> list[IRI]:
        return sorted(self.declarations, key=lambda i: i.value)


@dataclass(frozen=True)
class WellformednessViolation:
    subject: Term
    predicate: IRI
    node: Optional[Term]
    message: str

    def __str__(self) -> str:
        node = f" at {self.node.n3()}" if self.node is not None else ""
        return f"{self.subject.n3()} {self.predicate.n3()}{node}: {self.message}"


class ShapesDatasetError(ValueError):
    def __init__(self, violations: list[WellformednessViolation]) -> None:
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class CombinationError(ShapesDatasetError):
    pass


# -- RDF lists --------------------------------------------------------------


def read_list(head: Term, g: Graph) -> tuple[Optional[list], Optional[str]]:
    """Items of a well-formed RDF list, or ``(None, reason)``."""
    items = []
    seen = set()
    node = head
    while node != RDF_NIL:
        if not isinstance(node, BNode):
            return None, f"list cell {node.n3()} is not a blank node"
        if node in seen:
            return None, "cyclic list"
        seen.add(node)
        firsts = g.objects(node, RDF_FIRST)
        rests = g.objects(node, RDF_REST)
        if len(firsts) != 1 or len(rests) != 1:
            return None, f"list cell {node.n3()} needs exactly one rdf:first and one rdf:rest"
        items.append(next(iter(firsts)))
        node = next(iter(rests))
    return items, None


# -- combination expressions -----------------------------------------------


class _CombinationReader:
    def __init__(self, g: Graph, subject: Term) -> None:
        self.g = g
        self.subject = subject
        self.problems: list[WellformednessViolation] = []
        self.active: set = set()

    def problem(self, node: Term, message: str) -> None:
        self.problems.append(WellformednessViolation(self.subject, TARGET_GRAPH_COMBINATION, node, message))

    def top(self, node: Term) -> Optional[CombinationExpr]:
        if isinstance(node, IRI):
            ref = GraphRef.from_iri(node)
            if ref.kind in ("all-named", "all"):
                self.problem(node, f"{node.n3()} denotes several graphs; use it inside shds:or or shds:and")
                return None
            return Leaf(ref)
        return self.operand(node, under_minus=False)

    def operand(self, node: Term, under_minus: bool) -> Optional[CombinationExpr]:
        if isinstance(node, Literal):
            self.problem(node, "a graph combination cannot be a literal")
            return None
        if isinstance(node, IRI):
            ref = GraphRef.from_iri(node)
            if under_minus and ref.kind in ("all-named", "all"):
                self.problem(node, f"{node.n3()} is not allowed as an operand of shds:minus")
                return None
            return Leaf(ref)
        if node in self.active:
            self.problem(node, "cyclic graph combination")
            return None
        ops = [(p, o) for p in OPERATORS for o in self.g.objects(node, p)]
        if len(ops) != 1:
            found = "none" if not ops else str(len(ops))
            self.problem(node, f"graph combination node needs exactly one of shds:and, shds:or, shds:minus ({found} found)")
            return None
        pred, head = ops[0]
        op = OPERATORS[pred]
        items, reason = read_list(head, self.g)
        if items is None:
            self.problem(node, f"shds:{op} value is not a well-formed list: {reason}")
            return None
        if op == "minus" and len(items) != 2:
            self.problem(node, f"shds:minus takes exactly two operands ({len(items)} given)")
            return None
        if not items:
            self.problem(node, f"shds:{op} needs at least one operand")
            return None
        self.active.add(node)
        operands = [self.operand(item, under_minus=(op == "minus")) for item in items]
        self.active.discard(node)
        if any(o is None for o in operands):
            return None
        if op == "minus":
            return Minus(operands[0], operands[1])
        return (And if op == "and" else Or)(tuple(operands))


def parse_combination(node: Term, g: Graph, subject: Optional[Term] = None) -> CombinationExpr:
    """Read the expression tree rooted at the object of a combination triple."""
    reader = _CombinationReader(g, subject if subject is not None else node)
    expr = reader.top(node)
    if expr is None:
        raise CombinationError(reader.problems)
    return expr


# -- declarations -----------------------------------------------------------


def _scan(s_dataset: Dataset, data: Optional[Dataset]):
    decls: dict[IRI, TargetDeclarationSet] = {}
    combos: dict[IRI, dict] = {}
    violations: list[WellformednessViolation] = []
    for _, g in s_dataset.graphs_of():
        for pred in TARGETING_PREDICATES:
            for s, p, o in sorted(g.triples(None, pred, None), key=lambda t: (term_key(t[0]), term_key(t[2]))):
                if not isinstance(s, IRI):
                    violations.append(WellformednessViolation(s, p, o, "subject must be the IRI of a shapes graph"))
                    continue
                decl = decls.setdefault(s, TargetDeclarationSet())
                if p in (TARGET_GRAPH, TARGET_GRAPH_EXCLUDE):
                    if not isinstance(o, IRI):
                        violations.append(WellformednessViolation(s, p, o, "target graph must be an IRI"))
                        continue
                    ref = GraphRef.from_iri(o)
                    if data is not None and p == TARGET_GRAPH and not ref.reserved and o not in data.named:
                        violations.append(WellformednessViolation(
                            s, p, o, "not a reserved IRI nor a named graph of the data dataset"))
                    (decl.includes if p == TARGET_GRAPH else decl.excludes).add(ref)
                elif p in (TARGET_GRAPH_PATTERN, TARGET_GRAPH_PATTERN_EXCLUDE):
                    if not isinstance(o, Literal):
                        violations.append(WellformednessViolation(s, p, o, "graph pattern must be a literal"))
                        continue
                    try:
                        re.compile(o.lexical)
                    except re.error as exc:
                        violations.append(WellformednessViolation(s, p, o, f"invalid regular expression: {exc}"))
                        continue
                    target = decl.include_patterns if p == TARGET_GRAPH_PATTERN else decl.exclude_patterns
                    target.add(o.lexical)
                else:
                    reader = _CombinationReader(g, s)
                    expr = reader.top(o)
                    if expr is None:
                        violations.extend(reader.problems)
                        continue
                    combos.setdefault(s, {})[o] = expr
    for s, by_node in combos.items():
        ordered = sorted(by_node.items(), key=lambda kv: (kv[1].key(), term_key(kv[0])))
        decls[s].combinations = [expr for _, expr in ordered]
    return decls, violations


def extract_declarations(s_dataset: Dataset) -> ShapesDataset:
    """Collect every shapes graph's target declarations.

    Raises :class:`ShapesDatasetError` when a declaration is malformed.
    Named shapes graphs without declarations are present with an empty set.
    """
    decls, violations = _scan(s_dataset, None)
    if violations:
        raise ShapesDatasetError(violations)
    for name in s_dataset.named:
        decls.setdefault(name, TargetDeclarationSet())
    return ShapesDataset(s_dataset, decls)


def check_wellformed(s_dataset: Dataset, data: Optional[Dataset] = None) -> list[WellformednessViolation]:
    """Structural checks on target declarations; returns violations, never raises.

    With ``data``, plain ``shds:targetGraph`` IRIs must also name one of its
    named graphs.
    """
    _, violations = _scan(s_dataset, data)
    return violations
