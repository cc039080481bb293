from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shaclds.model import Dataset, Graph
from shaclds.namespaces import SHDS
from shaclds.shapes_dataset import ALL_REF, DEFAULT_REF, GraphRef, Leaf, Or
from shaclds.targets import DerivedIds, direct_targets, evaluate_combination
from shaclds.shapes_dataset import TargetDeclarationSet
from shaclds.view import ViewError, build_view
from helpers import ex, random_dataset


def view_violations(d: Dataset, focus, ev) -> list[str]:
    """The four evaluation-dataset invariants, checked structurally."""
    problems = []
    if set(ev.view.default) != set(focus.triples):
        problems.append("default is not the focus graph")
    for name, g in d.named.items():
        if name not in ev.view.named or set(ev.view.named[name]) != set(g):
            problems.append(f"named graph {name.value} changed")
    if ev.view.named.get(SHDS.default) is not d.default:
        problems.append("shds:default is not the original default graph")
    if set(ev.view.named) != set(d.named) | {SHDS.default}:
        problems.append("unexpected named graphs")
    if focus.is_combination and focus.derived_id in ev.view.named:
        problems.append("derived graph exposed as a named graph")
    return problems


def focus_graphs(d: Dataset, rng: random.Random):
    yield from direct_targets(TargetDeclarationSet(includes={ALL_REF}), d)
    refs = [DEFAULT_REF] + [GraphRef("named", n) for n in d.named]
    yield evaluate_combination(Or(tuple(Leaf(r) for r in rng.sample(refs, rng.randint(1, len(refs))))), d, DerivedIds())


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_invariants_for_every_focus_kind(seed):
    rng = random.Random(seed)
    d = random_dataset(rng)
    for focus in focus_graphs(d, rng):
        ev = build_view(d, focus)
        assert view_violations(d, focus, ev) == []
        assert len(ev.view.named) == len(d.named) + 1


def test_figure_example():
    d = Dataset(Graph([(ex("a"), ex("p"), ex("b"))]),
                {ex("n1"): Graph([(ex("c"), ex("p"), ex("d"))]), ex("n2"): Graph()})
    (_, n1, _) = direct_targets(TargetDeclarationSet(includes={ALL_REF}), d)
    ev = build_view(d, n1)
    assert ev.default is d.named[ex("n1")]
    assert ev.view.named[SHDS.default] is d.default


def test_does_not_touch_origin():
    d = random_dataset(random.Random(3))
    before = dict(d.named)
    build_view(d, direct_targets(TargetDeclarationSet(includes={DEFAULT_REF}), d)[0])
    assert d.named == before and SHDS.default not in d.named


def test_reserved_name_collision():
    d = Dataset(Graph(), {SHDS.default: Graph()})
    focus = direct_targets(TargetDeclarationSet(includes={DEFAULT_REF}), d)[0]
    with pytest.raises(ViewError):
        build_view(d, focus)
