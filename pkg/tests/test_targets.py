from __future__ import annotations

import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shaclds.model import Dataset, Graph, graph_intersection, graph_union
from shaclds.namespaces import SHDS
from shaclds.parsing import parse_dataset
from shaclds.shapes_dataset import (
    ALL_NAMED_REF, ALL_REF, DEFAULT_REF, And, GraphRef, Leaf, Minus, Or, TargetDeclarationSet,
    extract_declarations,
)
from shaclds.targets import (
    DefaultSource, DerivedIds, NamedSource, derived_number, direct_targets, evaluate_combination,
    expand_reserved, resolve_targets,
)
from helpers import (
    DEFAULT, engine_targets, ex, oracle_targets, random_dataset, random_declaration,
)

FAMOUS = """@prefix ex: <http://example.org/> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
ex:Bob a foaf:Person ; foaf:knows ex:Yara .
ex:City1Graph { ex:Yara a foaf:Person ; foaf:knows ex:Zed . ex:David a foaf:Person . }
ex:famous { ex:Zed a ex:FamousPerson . }
"""


@pytest.fixture
def famous() -> Dataset:
    return parse_dataset(FAMOUS)


def named(name: str) -> GraphRef:
    return GraphRef("named", ex(name))


class TestExpand:
    def test_all(self, famous):
        assert [n for n, _ in expand_reserved(ALL_REF, famous)] == [None, ex("City1Graph"), ex("famous")]

    def test_default(self, famous):
        assert expand_reserved(DEFAULT_REF, famous) == [(None, famous.default)]

    def test_missing_named_graph_warns(self, famous, caplog):
        assert expand_reserved(named("missing"), famous) == []
        assert "missing" in caplog.text


class TestDirect:
    def test_exclusion_of_famous(self, famous):
        decl = TargetDeclarationSet(includes={ALL_REF}, excludes={named("famous")})
        out = direct_targets(decl, famous)
        assert [f.derived_id for f in out] == [SHDS.default, ex("City1Graph")]
        assert isinstance(out[0].provenance, DefaultSource)
        assert out[1].provenance == NamedSource(ex("City1Graph"))

    def test_named(self, famous):
        out = direct_targets(TargetDeclarationSet(includes={ALL_NAMED_REF}), famous)
        assert [f.derived_id for f in out] == [ex("City1Graph"), ex("famous")]

    def test_self_cancellation(self, famous):
        assert direct_targets(TargetDeclarationSet(includes={DEFAULT_REF}, excludes={DEFAULT_REF}), famous) == []

    def test_pattern_is_partial_match_and_skips_default(self, famous):
        out = direct_targets(TargetDeclarationSet(include_patterns={"ity1"}), famous)
        assert [f.derived_id for f in out] == [ex("City1Graph")]


class TestCombination:
    def test_union_connects_bob(self, famous):
        f = evaluate_combination(Or((Leaf(DEFAULT_REF), Leaf(named("City1Graph")))), famous, DerivedIds())
        assert len(f.triples) == len(famous.default) + len(famous.named[ex("City1Graph")])
        assert f.is_combination

    def test_and_idempotent(self, famous):
        g = famous.named[ex("City1Graph")]
        f = evaluate_combination(And((Leaf(named("City1Graph")), Leaf(named("City1Graph")))), famous)
        assert f.triples == g and f.triples is not g

    def test_minus_of_all_union(self, famous):
        expr = Minus(Or((Leaf(ALL_REF),)), Leaf(named("famous")))
        f = evaluate_combination(expr, famous)
        expected = graph_union(famous.default, famous.named[ex("City1Graph")])
        assert f.triples == expected

    def test_fresh_ids_differ(self, famous):
        ids = DerivedIds()
        expr = Or((Leaf(ALL_NAMED_REF),))
        a, b = evaluate_combination(expr, famous, ids), evaluate_combination(expr, famous, ids)
        assert a.triples == b.triples and a.derived_id != b.derived_id

    def test_fresh_id_skips_existing_graph_name(self):
        from shaclds.model import IRI
        d = Dataset(Graph(), {IRI("urn:shaclds:derived:0"): Graph()})
        f = evaluate_combination(Leaf(DEFAULT_REF), d, DerivedIds())
        assert derived_number(f.derived_id) == 1

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_operand_permutation(self, seed):
        rng = random.Random(seed)
        d = random_dataset(rng)
        leaves = [Leaf(DEFAULT_REF)] + [Leaf(GraphRef("named", n)) for n in d.named]
        shuffled = leaves[:]
        rng.shuffle(shuffled)
        for op in (And, Or):
            assert evaluate_combination(op(tuple(leaves)), d).triples == evaluate_combination(op(tuple(shuffled)), d).triples

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10_000))
    def test_partition_law(self, seed):
        rng = random.Random(seed)
        d = random_dataset(rng)
        refs = [DEFAULT_REF] + [GraphRef("named", n) for n in d.named]
        a, b = Leaf(rng.choice(refs)), Leaf(rng.choice(refs))
        left = evaluate_combination(Minus(a, b), d).triples
        both = evaluate_combination(And((a, b)), d).triples
        assert graph_union(left, both) == evaluate_combination(a, d).triples


class TestResolve:
    def test_combination_not_subject_to_exclusion(self, famous):
        sd = extract_declarations(parse_dataset("""@prefix ex: <http://example.org/> .
            @prefix shds: <http://www.w3id.org/shacl-ds#> .
            ex:s shds:targetGraph shds:all ; shds:targetGraphExclude ex:City1Graph ;
                 shds:targetGraphCombination [ shds:or ( ex:City1Graph ) ] .
            ex:s { }"""))
        out = resolve_targets(ex("s"), sd, famous, DerivedIds())
        assert [f.derived_id for f in out[:2]] == [SHDS.default, ex("famous")]
        assert out[2].is_combination and out[2].triples == famous.named[ex("City1Graph")]

    def test_empty_declaration(self, famous):
        sd = extract_declarations(parse_dataset("<http://example.org/s> { }"))
        assert resolve_targets(ex("s"), sd, famous) == []

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 100_000))
    def test_matches_oracle(self, seed):
        rng = random.Random(seed)
        d = random_dataset(rng)
        decl = random_declaration(rng, d)
        assert engine_targets(decl, d) == (lambda o: (o[0], Counter(o[1])))(oracle_targets(decl, d))
