"""Acceptance criteria, one function each.

Every criterion returns ``(passed, detail)``. Under pytest each one is a test
and the outcome lines are repeated in the terminal summary; run this file
directly to print just the lines.
"""

from __future__ import annotations

import io
import logging
import os
import random
import subprocess
import sys
from collections import Counter
from contextlib import redirect_stdout
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from shaclds.cli import cmd_check_shapes  # noqa: E402
from shaclds.engine import validate  # noqa: E402
from shaclds.harness import CATEGORIES, load_cases, run_case  # noqa: E402
from shaclds.model import graph_difference, graph_intersection, graph_union, term_key  # noqa: E402
from shaclds.namespaces import SH, SHDS  # noqa: E402
from shaclds.parsing import load_dataset, parse_dataset  # noqa: E402
from shaclds.report import conforms, report_results  # noqa: E402
from shaclds.shapes_dataset import (  # noqa: E402
    ALL_REF, DEFAULT_REF, GraphRef, Leaf, Or, TargetDeclarationSet, check_wellformed,
)
from shaclds.sparql import ProhibitedFeatureError, parse_query  # noqa: E402
from shaclds.targets import DerivedIds, direct_targets, evaluate_combination  # noqa: E402
from shaclds.view import build_view  # noqa: E402
from helpers import (  # noqa: E402
    CHECKS, CORPUS, ROOT, engine_targets, ex, expr_depth, oracle_targets, random_dataset,
    random_declaration, random_graph,
)
from test_view import view_violations  # noqa: E402

OUTCOMES: dict[int, str] = {}

PREFIXES = """@prefix ex: <http://example.org/> .
@prefix s: <http://example.org/shapes/> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix shds: <http://www.w3id.org/shacl-ds#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
"""


def _results(report) -> list[tuple]:
    rows = [(report.value(r, SH.focusNode), report.value(r, SHDS.focusGraph),
             report.value(r, SH.resultSeverity)) for r in report_results(report)]
    return sorted(rows, key=lambda row: tuple(term_key(t) for t in row))


def criterion_1():
    """Per-graph targeting: Alice typed in one named graph, untyped in another."""
    data = parse_dataset(PREFIXES + """ex:typed { ex:Alice a foaf:Person ; foaf:name "Alice" . }
        ex:untyped { ex:Alice foaf:name "Alice" . }""")
    shapes = parse_dataset(PREFIXES + """s:people shds:targetGraph shds:named .
        s:people { s:AliceShape a sh:NodeShape ; sh:targetNode ex:Alice ; sh:class foaf:Person . }""")
    report = validate(data, shapes)
    got = _results(report)
    ok = got == [(ex("Alice"), ex("untyped"), SH.Violation)] and conforms(report) is False
    return ok, f"{len(got)} violation(s), focus graphs {[g.value for _, g, _ in got]}, conforms={conforms(report)}"


FAMOUS_DATA = PREFIXES + """ex:Bob a foaf:Person ; foaf:knows ex:Yara .
ex:City1Graph { ex:Yara a foaf:Person ; foaf:knows ex:Zed . ex:David a foaf:Person . }
ex:famous { ex:Zed a ex:FamousPerson . }"""
FAMOUS_SHAPE = '''{ s:KnowsFamous a sh:NodeShape ; sh:targetClass foaf:Person ; sh:sparql [ sh:select """
    PREFIX foaf: <http://xmlns.com/foaf/0.1/>
    PREFIX ex: <http://example.org/>
    SELECT $this WHERE { $this a foaf:Person .
      FILTER NOT EXISTS { $this foaf:knows+ ?f . GRAPH ex:famous { ?f a ex:FamousPerson } } }""" ] . }'''


def criterion_2():
    """Exclusion: all graphs except ex:famous."""
    shapes = parse_dataset(PREFIXES + "s:f shds:targetGraph shds:all ; shds:targetGraphExclude ex:famous .\ns:f "
                           + FAMOUS_SHAPE)
    got = [(n, g) for n, g, _ in _results(validate(parse_dataset(FAMOUS_DATA), shapes))]
    expected = [(ex("Bob"), SHDS.default), (ex("David"), ex("City1Graph"))]
    return got == expected, "results " + ", ".join(f"{n.value.rsplit('/', 1)[1]}@{g.value}" for n, g in got)


def criterion_3():
    """Combination: union of the default graph and ex:City1Graph."""
    shapes = parse_dataset(PREFIXES + "s:f shds:targetGraphCombination [ shds:or ( shds:default ex:City1Graph ) ] .\ns:f "
                           + FAMOUS_SHAPE)
    got = [n for n, _, _ in _results(validate(parse_dataset(FAMOUS_DATA), shapes))]
    return got == [ex("David")], f"focus nodes {[n.value for n in got]}"


def criterion_4():
    """resolve_targets against the brute-force oracle on 200 random instances."""
    rng = random.Random(20240404)
    mismatches, depth3 = 0, 0
    for _ in range(200):
        d = random_dataset(rng, max_graphs=4, max_triples=20)
        decl = random_declaration(rng, d)
        depth3 += any(expr_depth(e) == 3 for e in decl["combinations"])
        direct, combos = oracle_targets(decl, d)
        if engine_targets(decl, d) != (direct, Counter(combos)):
            mismatches += 1
    return mismatches == 0 and depth3 > 0, f"{mismatches} mismatches in 200 instances ({depth3} with depth-3 combinations)"


def criterion_5():
    """Set-algebra laws on 500 random graph pairs."""
    rng = random.Random(5005)
    failures = 0
    for _ in range(500):
        a, b, c = random_graph(rng), random_graph(rng), random_graph(rng)
        checks = [
            graph_union(a, b) == graph_union(b, a),
            graph_intersection(a, b) == graph_intersection(b, a),
            graph_union(graph_union(a, b), c) == graph_union(a, graph_union(b, c)),
            graph_intersection(graph_intersection(a, b), c) == graph_intersection(a, graph_intersection(b, c)),
            len(graph_difference(a, a)) == 0,
            graph_union(graph_difference(a, b), graph_intersection(a, b)) == a,
        ]
        failures += not all(checks)
    return failures == 0, f"{failures} failures in 500 pairs"


def criterion_6():
    """build_view invariants for named, default and combination focus graphs."""
    rng = random.Random(606)
    failures, kinds = 0, Counter()
    for _ in range(200):
        d = random_dataset(rng)
        focus = list(direct_targets(TargetDeclarationSet(includes={ALL_REF}), d))
        refs = [DEFAULT_REF] + [GraphRef("named", n) for n in d.named]
        chosen = tuple(Leaf(r) for r in rng.sample(refs, rng.randint(1, len(refs))))
        focus.append(evaluate_combination(Or(chosen), d, DerivedIds()))
        for f in focus:
            kinds[type(f.provenance).__name__] += 1
            failures += bool(view_violations(d, f, build_view(d, f)))
    ok = failures == 0 and len(kinds) == 3
    return ok, f"{failures} failures over {sum(kinds.values())} views ({dict(sorted(kinds.items()))})"


def criterion_7():
    """Shipped corpus: at least 3 cases per category, all passing."""
    cases = load_cases(CORPUS)
    per = Counter(c.category for c in cases)
    failed = [c.id for c in cases if not run_case(c).passed]
    ok = not failed and all(per[c] >= 3 for c in CATEGORIES)
    return ok, f"{len(cases) - len(failed)}/{len(cases)} passed; per category {dict(sorted(per.items()))}"


def criterion_8():
    """Well-formedness negatives are flagged with exit 1; positives are clean."""
    bad = []
    negatives = sorted((CHECKS / "wellformedness" / "negative").glob("*.trig"))
    positives = sorted((CHECKS / "wellformedness" / "positive").glob("*.trig"))
    required = {"literal-target", "double-operator", "minus-three", "minus-one", "named-in-minus"}
    with redirect_stdout(io.StringIO()):
        for p in negatives:
            if not check_wellformed(load_dataset(p)) or cmd_check_shapes(str(p)) != 1:
                bad.append(p.stem)
        for p in positives:
            if check_wellformed(load_dataset(p)) or cmd_check_shapes(str(p)) != 0:
                bad.append(p.stem)
    missing = required - {p.stem for p in negatives}
    ok = not bad and not missing
    return ok, f"{len(negatives)} negative / {len(positives)} positive cases, misjudged: {bad or 'none'}"


FEATURES = {"minus": "MINUS", "service": "SERVICE", "values": "VALUES", "bind-this": "?this rebinding",
            "project-this": "?this rebinding", "shapes-graph": "$shapesGraph", "current-shape": "$currentShape"}


def criterion_9():
    """The 10-query prohibited corpus is fully rejected with named features."""
    queries = sorted((CHECKS / "sparql-prohibited").glob("*.rq"))
    rejected = 0
    for q in queries:
        want = next(v for k, v in FEATURES.items() if q.stem.startswith(k))
        try:
            parse_query(q.read_text())
        except ProhibitedFeatureError as exc:
            rejected += want in [v.feature for v in exc.violations]
    ok = len(queries) == 10 and rejected == len(queries)
    return ok, f"{rejected}/{len(queries)} rejected with the expected feature"


DETERMINISM_SCRIPT = """
import sys
from pathlib import Path
from shaclds.engine import validate
from shaclds.harness import load_cases
from shaclds.namespaces import REPORT_PREFIXES
from shaclds.parsing import load_dataset
from shaclds.serializer import serialize_graph
for case in load_cases(Path(sys.argv[1])):
    report = validate(load_dataset(case.data_path), load_dataset(case.shapes_path))
    sys.stdout.buffer.write(case.id.encode() + b"\\n" + serialize_graph(report, "turtle", REPORT_PREFIXES))
"""


def criterion_10():
    """Two full corpus runs, in separate processes with different hash seeds, are byte-identical."""
    outputs = []
    for seed in ("1", "4242"):
        env = dict(os.environ, PYTHONHASHSEED=seed, PYTHONPATH=str(ROOT / "src"))
        proc = subprocess.run([sys.executable, "-c", DETERMINISM_SCRIPT, str(CORPUS)],
                              capture_output=True, env=env, timeout=120)
        if proc.returncode != 0:
            return False, proc.stderr.decode()[-300:]
        outputs.append(proc.stdout)
    return outputs[0] == outputs[1] and bool(outputs[0]), f"{len(outputs[0])} bytes per run, identical={outputs[0] == outputs[1]}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


def _record(number: int) -> bool:
    try:
        ok, detail = CRITERIA[number]()
    except Exception as exc:  # a crash is a failure with its reason shown
        ok, detail = False, f"error: {type(exc).__name__}: {exc}"
    OUTCOMES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {CRITERIA[number].__doc__.strip()} -- {detail}"
    print(OUTCOMES[number])
    return ok


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    assert _record(number), OUTCOMES[number]


if __name__ == "__main__":
    logging.basicConfig(level=logging.ERROR)
    results = [_record(n) for n in sorted(CRITERIA)]
    sys.exit(0 if all(results) else 1)
