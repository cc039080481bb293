"""Manifest-driven conformance runner.

A corpus directory holds one sub-directory per case::

    case-name/
        meta.toml            id = "...", category = 1..5, description = "..."
        data.trig            (or data.nq)
        shapes.trig          (or shapes.nq)
        expected-report.ttl

A case passes when the produced report is isomorphic to the expected one.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, TextIO

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .engine import validate
from .model import graph_isomorphic
from .parsing import guess_format, load_dataset, parse_dataset

CATEGORIES = {
    1: "simple targets and predefined IRIs",
    2: "exclusions",
    3: "simple combinations",
    4: "nested combinations",
    5: "SPARQL with dataset-level keywords",
}


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # not a pytest class

    id: str
    data_path: Path
    shapes_path: Path
    expected_report_path: Path
    category: int
    description: str = ""


@dataclass
class CaseOutcome:
    case: TestCase
    passed: bool
    detail: str = ""


def _pick(directory: Path, stem: str) -> Path:
    for suffix in (".trig", ".nq", ".ttl"):
        candidate = directory / f"{stem}{suffix}"
        if candidate.exists():
            return candidate
    return directory / f"{stem}.trig"


def load_case(directory: Path) -> TestCase:
    meta_path = directory / "meta.toml"
    try:
        meta = tomllib.loads(meta_path.read_text(encoding="utf-8"))
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ManifestError(f"{meta_path}: {exc}") from None
    category = meta.get("category")
    if category not in CATEGORIES:
        raise ManifestError(f"{meta_path}: category must be one of 1..5, got {category!r}")
    return TestCase(
        id=str(meta.get("id", directory.name)),
        data_path=_pick(directory, "data"),
        shapes_path=_pick(directory, "shapes"),
        expected_report_path=directory / "expected-report.ttl",
        category=category,
        description=str(meta.get("description", "")),
    )


def load_cases(manifest_dir: Path) -> list[TestCase]:
    manifest_dir = Path(manifest_dir)
    if not manifest_dir.is_dir():
        raise ManifestError(f"{manifest_dir} is not a directory")
    cases = [load_case(d) for d in sorted(manifest_dir.iterdir()) if (d / "meta.toml").exists()]
    return sorted(cases, key=lambda c: c.id)


def run_case(case: TestCase) -> CaseOutcome:
    try:
        data = load_dataset(case.data_path)
        shapes = load_dataset(case.shapes_path)
        report = validate(data, shapes)
    except Exception as exc:  # a broken case counts as a failure, not a crash
        return CaseOutcome(case, False, f"error: {exc}")
    if not case.expected_report_path.exists():
        return CaseOutcome(case, False, f"error: missing {case.expected_report_path.name}")
    try:
        expected = parse_dataset(case.expected_report_path.read_bytes(),
                                 guess_format(case.expected_report_path)).default
    except Exception as exc:
        return CaseOutcome(case, False, f"error: expected report: {exc}")
    if graph_isomorphic(report, expected):
        return CaseOutcome(case, True)
    return CaseOutcome(case, False, f"report differs ({len(report)} vs {len(expected)} expected triples)")


def run_manifest(manifest_dir: Path, out: TextIO, only: Optional[set] = None) -> list[CaseOutcome]:
    outcomes = []
    for case in load_cases(manifest_dir):
        if only and case.id not in only:
            continue
        outcome = run_case(case)
        outcomes.append(outcome)
        status = "PASS" if outcome.passed else "FAIL"
        detail = f"  {outcome.detail}" if outcome.detail else ""
        out.write(f"{status} [{case.category}] {case.id}{detail}\n")
    out.write("\n")
    for cat, name in CATEGORIES.items():
        group = [o for o in outcomes if o.case.category == cat]
        passed = sum(o.passed for o in group)
        out.write(f"category {cat} ({name}): {passed}/{len(group)} passed\n")
    passed = sum(o.passed for o in outcomes)
    out.write(f"{passed} passed, {len(outcomes) - passed} failed\n")
    return outcomes
