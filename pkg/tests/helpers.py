"""Random instance generators and brute-force oracles shared by the tests.

The oracles work on plain Python sets and tuples and never call the engine,
so agreement between the two is meaningful.
"""

from __future__ import annotations

import random
import re
from itertools import product
from pathlib import Path

from hypothesis import strategies as st

from shaclds.model import BNode, Dataset, Graph, IRI, Literal
from shaclds.namespaces import RDF_FIRST, RDF_NIL, RDF_REST, SHDS

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
CHECKS = ROOT / "checks"

EX = "http://example.org/"


def ex(name: str) -> IRI:
    return IRI(EX + name)


SUBJECTS = [ex(f"s{i}") for i in range(4)] + [BNode("x0"), BNode("x1")]
PREDICATES = [ex(f"p{i}") for i in range(3)]
OBJECTS = SUBJECTS + [Literal("a"), Literal("1", "http://www.w3.org/2001/XMLSchema#integer"),
                      Literal("hi", language="en")]
GRAPH_NAMES = [ex(f"g{i}") for i in range(4)]


# -- random data -------------------------------------------------------------


def random_triple(rng: random.Random):
    return (rng.choice(SUBJECTS), rng.choice(PREDICATES), rng.choice(OBJECTS))


def random_graph(rng: random.Random, max_triples: int = 20) -> Graph:
    return Graph(random_triple(rng) for _ in range(rng.randint(0, max_triples)))


def random_dataset(rng: random.Random, max_graphs: int = 4, max_triples: int = 20) -> Dataset:
    """Default graph plus up to ``max_graphs - 1`` named graphs."""
    names = rng.sample(GRAPH_NAMES, rng.randint(0, max_graphs - 1))
    return Dataset(random_graph(rng, max_triples), {n: random_graph(rng, max_triples) for n in names})


triples_st = st.tuples(st.sampled_from(SUBJECTS), st.sampled_from(PREDICATES), st.sampled_from(OBJECTS))
graphs_st = st.builds(Graph, st.lists(triples_st, max_size=20))
datasets_st = st.builds(
    lambda default, named: Dataset(default, named),
    graphs_st,
    st.dictionaries(st.sampled_from(GRAPH_NAMES), graphs_st, max_size=3),
)


# -- random declarations -----------------------------------------------------

RESERVED = ("default", "named", "all")


def random_expr(rng: random.Random, names: list, depth: int, in_minus: bool = False, top: bool = True):
    """A combination tree as nested tuples: ("leaf", x) | ("and"|"or", [..]) | ("minus", a, b).

    Leaves are graph IRIs or reserved words; named/all only appear as
    operands of and/or (anywhere else they are ill-formed).
    """
    if depth <= 1 or rng.random() < 0.3:
        pool = list(names) + ["default"] + ([] if in_minus or top else ["named", "all"])
        pool.append(ex("missing"))
        return ("leaf", rng.choice(pool))
    op = rng.choice(("and", "or", "minus"))
    if op == "minus":
        return ("minus", random_expr(rng, names, depth - 1, True, False),
                random_expr(rng, names, depth - 1, True, False))
    return (op, [random_expr(rng, names, depth - 1, False, False) for _ in range(rng.randint(1, 3))])


def expr_depth(e) -> int:
    if e[0] == "leaf":
        return 1
    kids = e[1] if e[0] in ("and", "or") else [e[1], e[2]]
    return 1 + max(expr_depth(k) for k in kids)


def random_declaration(rng: random.Random, d: Dataset) -> dict:
    names = sorted(d.named, key=lambda n: n.value)
    refs = names + list(RESERVED) + [ex("missing")]
    return {
        "includes": rng.sample(refs, rng.randint(0, 3)),
        "excludes": rng.sample(refs, rng.randint(0, 2)),
        "include_patterns": rng.sample(["g[01]", "g2$", "example", "nomatch"], rng.randint(0, 1)),
        "exclude_patterns": rng.sample(["g1", "g3"], rng.randint(0, 1)),
        "combinations": [random_expr(rng, names, 3) for _ in range(rng.randint(0, 3))],
    }


def _ref_iri(x) -> IRI:
    return SHDS[x] if isinstance(x, str) else x


class _Writer:
    def __init__(self) -> None:
        self.g = Graph()
        self.n = 0

    def fresh(self) -> BNode:
        self.n += 1
        return BNode(f"w{self.n}")

    def rdf_list(self, items) -> object:
        head = RDF_NIL
        for item in reversed(items):
            cell = self.fresh()
            self.g.add((cell, RDF_FIRST, item))
            self.g.add((cell, RDF_REST, head))
            head = cell
        return head

    def expr(self, e):
        if e[0] == "leaf":
            return _ref_iri(e[1])
        node = self.fresh()
        kids = e[1] if e[0] in ("and", "or") else [e[1], e[2]]
        self.g.add((node, SHDS[e[0]], self.rdf_list([self.expr(k) for k in kids])))
        return node


def declaration_to_shapes(s_iri: IRI, decl: dict) -> Dataset:
    """Write a declaration as triples in the default graph of a shapes dataset."""
    w = _Writer()
    for x in decl["includes"]:
        w.g.add((s_iri, SHDS.targetGraph, _ref_iri(x)))
    for x in decl["excludes"]:
        w.g.add((s_iri, SHDS.targetGraphExclude, _ref_iri(x)))
    for p in decl["include_patterns"]:
        w.g.add((s_iri, SHDS.targetGraphPattern, Literal(p)))
    for p in decl["exclude_patterns"]:
        w.g.add((s_iri, SHDS.targetGraphPatternExclude, Literal(p)))
    for e in decl["combinations"]:
        w.g.add((s_iri, SHDS.targetGraphCombination, w.expr(e)))
    return Dataset(w.g, {s_iri: Graph()})


# -- oracles -----------------------------------------------------------------

DEFAULT = "DEFAULT"


def oracle_graphs(d: Dataset) -> dict:
    """Every graph of D as name -> frozenset of triples; DEFAULT names the default graph."""
    out = {DEFAULT: frozenset(d.default)}
    out.update({n: frozenset(g) for n, g in d.named.items()})
    return out


def oracle_expand(x, graphs: dict) -> list:
    if x == "default":
        return [DEFAULT]
    if x == "named":
        return [n for n in graphs if n != DEFAULT]
    if x == "all":
        return list(graphs)
    return [x] if x in graphs else []


def oracle_eval(e, graphs: dict) -> frozenset:
    """[C]_D bottom-up with naive set operations."""
    if e[0] == "leaf":
        names = oracle_expand(e[1], graphs)
        return graphs[names[0]] if names else frozenset()
    if e[0] == "minus":
        return oracle_eval(e[1], graphs) - oracle_eval(e[2], graphs)
    operands = []
    for k in e[1]:
        if k[0] == "leaf" and k[1] in ("named", "all"):
            operands.extend(graphs[n] for n in oracle_expand(k[1], graphs))
        else:
            operands.append(oracle_eval(k, graphs))
    if not operands:
        return frozenset()
    acc = operands[0]
    for g in operands[1:]:
        acc = acc & g if e[0] == "and" else acc | g
    return acc


def oracle_targets(decl: dict, d: Dataset) -> tuple[dict, list]:
    """(T_D as name -> triples, C_D as a list of triple sets)."""
    graphs = oracle_graphs(d)
    t_in = {n for x in decl["includes"] for n in oracle_expand(x, graphs)}
    t_out = {n for x in decl["excludes"] for n in oracle_expand(x, graphs)}
    for p in decl["include_patterns"]:
        t_in |= {n for n in graphs if n != DEFAULT and re.search(p, n.value)}
    for p in decl["exclude_patterns"]:
        t_out |= {n for n in graphs if n != DEFAULT and re.search(p, n.value)}
    direct = {n: graphs[n] for n in t_in - t_out}
    # an IRI declared twice is one triple; blank-node combinations stay distinct
    unique, seen = [], set()
    for e in decl["combinations"]:
        if e[0] == "leaf":
            if e[1] in seen:
                continue
            seen.add(e[1])
        unique.append(e)
    combos = [oracle_eval(e, graphs) for e in unique]
    return direct, combos


def brute_force_bgp(patterns: list, triples) -> list[dict]:
    """All variable bindings making every pattern a triple of ``triples``.

    Variables are strings starting with '?'. Enumerates the full cross
    product of triples, one per pattern.
    """
    triples = list(triples)
    out = []
    for combo in product(triples, repeat=len(patterns)):
        binding: dict = {}
        ok = True
        for pat, t in zip(patterns, combo):
            for slot, term in zip(pat, t):
                if isinstance(slot, str):
                    if binding.setdefault(slot, term) != term:
                        ok = False
                        break
                elif slot != term:
                    ok = False
                    break
            if not ok:
                break
        if ok and binding not in out:
            out.append(binding)
    return out


def closure_pairs(edges: set) -> set:
    """Transitive closure by fixpoint iteration."""
    closure = set(edges)
    while True:
        extra = {(a, d) for a, b in closure for c, d in closure if b == c} - closure
        if not extra:
            return closure
        closure |= extra


def engine_targets(decl: dict, d: Dataset) -> tuple[dict, list]:
    """resolve_targets output in the oracle's shape."""
    from collections import Counter

    from shaclds.shapes_dataset import extract_declarations
    from shaclds.targets import DerivedIds, resolve_targets

    s_iri = ex("shapes")
    sd = extract_declarations(declaration_to_shapes(s_iri, decl))
    focus = resolve_targets(s_iri, sd, d, DerivedIds())
    direct = [f for f in focus if not f.is_combination]
    names = [DEFAULT if f.derived_id == SHDS.default else f.derived_id for f in direct]
    assert len(names) == len(set(names)), "duplicate direct target"
    combos = [frozenset(f.triples) for f in focus if f.is_combination]
    return dict(zip(names, (frozenset(f.triples) for f in direct))), Counter(combos)
