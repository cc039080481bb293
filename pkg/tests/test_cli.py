from __future__ import annotations

import shutil

import pytest

from shaclds.cli import cmd_check_shapes, cmd_test, cmd_validate, main
from conftest import FAMOUS_DATA, FAMOUS_SHAPE, PREFIXES
from helpers import CHECKS, CORPUS


@pytest.fixture
def files(tmp_path):
    data = tmp_path / "data.trig"
    data.write_text(FAMOUS_DATA)
    shapes = tmp_path / "shapes.trig"
    shapes.write_text(PREFIXES + "s:famous shds:targetGraph shds:all ; shds:targetGraphExclude ex:famous .\n"
                      + "s:famous {" + FAMOUS_SHAPE + "}")
    ok = tmp_path / "ok.trig"
    ok.write_text(PREFIXES + "s:g shds:targetGraph shds:named . s:g { s:S sh:targetNode ex:Zed ; sh:nodeKind sh:IRI . }")
    return tmp_path, data, shapes, ok


def test_conforming_pair_exits_zero(files, capsysbinary):
    _, data, _, ok = files
    assert cmd_validate(str(data), str(ok)) == 0
    assert b"sh:conforms true" in capsysbinary.readouterr().out


def test_famous_pair_exits_one_with_two_results(files, capsysbinary):
    _, data, shapes, _ = files
    assert main(["validate", "--data", str(data), "--shapes", str(shapes)]) == 1
    out = capsysbinary.readouterr().out
    assert out.count(b"a sh:ValidationResult") == 2


def test_output_file_and_trig(files):
    tmp, data, shapes, _ = files
    out = tmp / "report.trig"
    assert main(["validate", "--data", str(data), "--shapes", str(shapes), "--output", str(out),
                 "--output-format", "trig"]) == 1
    assert out.read_text().rstrip().endswith("}")


def test_success_output_is_byte_stable(files, capsysbinary):
    _, data, shapes, _ = files
    cmd_validate(str(data), str(shapes))
    first = capsysbinary.readouterr().out
    cmd_validate(str(data), str(shapes))
    assert capsysbinary.readouterr().out == first


@pytest.mark.parametrize("content", ['@prefix shds: <http://www.w3id.org/shacl-ds#> . <http://x/s> shds:targetGraph "g" . <http://x/s> {}',
                                     "this is not trig"])
def test_bad_shapes_exit_two(files, capsys, content):
    tmp, data, _, _ = files
    bad = tmp / "bad.trig"
    bad.write_text(content)
    assert cmd_validate(str(data), str(bad)) == 2
    assert "error" in capsys.readouterr().err


def test_missing_file_exit_two(tmp_path, capsys):
    assert cmd_validate(str(tmp_path / "nope.trig"), str(tmp_path / "nope2.trig")) == 2


def test_check_shapes_codes(tmp_path, capsys):
    assert cmd_check_shapes(str(CHECKS / "wellformedness/positive/alice-named.trig")) == 0
    assert cmd_check_shapes(str(CHECKS / "wellformedness/negative/minus-three.trig")) == 1
    junk = tmp_path / "junk.trig"
    junk.write_text("{{{")
    assert cmd_check_shapes(str(junk)) == 2


def test_corpus_command(capsys):
    assert cmd_test(str(CORPUS)) == 0
    out = capsys.readouterr().out
    assert "0 failed" in out and "category 5" in out


def test_corpus_with_wrong_expectation(tmp_path, capsys):
    case = tmp_path / "case"
    shutil.copytree(CORPUS / "c1-alice-per-graph", case)
    text = (case / "expected-report.ttl").read_text().replace("ex:g2", "ex:g1")
    (case / "expected-report.ttl").write_text(text)
    assert cmd_test(str(tmp_path)) == 1
    assert "FAIL" in capsys.readouterr().out


def test_missing_expected_report_fails_case(tmp_path, capsys):
    shutil.copytree(CORPUS / "c1-alice-per-graph", tmp_path / "case")
    (tmp_path / "case" / "expected-report.ttl").unlink()
    assert cmd_test(str(tmp_path)) == 1


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as info:
        main(["validate", "--data", "x"])
    assert info.value.code == 2
