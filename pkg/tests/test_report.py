from __future__ import annotations

import pytest

from shaclds.engine import validate
from shaclds.model import BNode, Graph, IRI, Literal, graph_isomorphic
from shaclds.namespaces import REPORT_PREFIXES, RDF_TYPE, SH, SHDS, XSD
from shaclds.parsing import parse_graph
from shaclds.report import ReportError, build_report, conforms, focus_order, report_results
from shaclds.serializer import serialize_graph
from helpers import ex


def results_by(report: Graph, pred: IRI) -> list:
    return sorted((report.value(r, pred) for r in report_results(report)), key=lambda t: t.n3())


class TestAnnotations:
    def test_every_result_has_both_annotations(self, famous_data, famous_exclusion_shapes):
        report = validate(famous_data, famous_exclusion_shapes)
        nodes = report_results(report)
        assert len(nodes) == 2
        for r in nodes:
            assert len(report.objects(r, SHDS.focusGraph)) == 1
            assert len(report.objects(r, SHDS.sourceShapeGraph)) == 1
        assert results_by(report, SHDS.focusGraph) == [ex("City1Graph"), SHDS.default]

    def test_combination_copy_is_self_contained(self, famous_data, famous_union_shapes):
        report = validate(famous_data, famous_union_shapes)
        (r,) = report_results(report)
        copy = report.value(r, SHDS.focusGraph)
        assert isinstance(copy, BNode)
        expected = parse_graph("""@prefix shds: <http://www.w3id.org/shacl-ds#> .
            @prefix ex: <http://example.org/> .
            [] shds:or ( shds:default ex:City1Graph ) .""")
        reachable = Graph()
        frontier = [copy]
        while frontier:
            node = frontier.pop()
            for t in report.triples(node, None, None):
                reachable.add(t)
                if isinstance(t[2], BNode):
                    frontier.append(t[2])
        assert graph_isomorphic(reachable, expected)

    def test_round_trip(self, famous_data, famous_union_shapes):
        report = validate(famous_data, famous_union_shapes)
        for fmt in ("turtle", "trig"):
            text = serialize_graph(report, fmt, REPORT_PREFIXES)
            from shaclds.parsing import parse_dataset
            assert graph_isomorphic(parse_dataset(text, fmt).default, report)


class TestConforms:
    def test_empty_report(self):
        assert conforms(build_report([])) is True

    def test_malformed_report(self):
        with pytest.raises(ReportError):
            conforms(Graph())
        g = Graph([(BNode("r"), RDF_TYPE, SH.ValidationReport), (BNode("r"), SH.conforms, Literal("maybe"))])
        with pytest.raises(ReportError):
            conforms(g)

    def test_flag_matches_violation_presence(self, famous_data, famous_exclusion_shapes):
        report = validate(famous_data, famous_exclusion_shapes)
        assert conforms(report) is False
        assert len(list(report.triples(None, SH.conforms, Literal("false", XSD.boolean.value)))) == 1
