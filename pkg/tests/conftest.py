from __future__ import annotations

import pytest

from shaclds.parsing import parse_dataset

PREFIXES = """@prefix ex: <http://example.org/> .
@prefix s: <http://example.org/shapes/> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix shds: <http://www.w3id.org/shacl-ds#> .
@prefix foaf: <http://xmlns.com/foaf/0.1/> .
"""

FAMOUS_DATA = PREFIXES + """
ex:Bob a foaf:Person ; foaf:knows ex:Yara .
ex:City1Graph { ex:Yara a foaf:Person ; foaf:knows ex:Zed . ex:David a foaf:Person . }
ex:famous { ex:Zed a ex:FamousPerson . }
"""

FAMOUS_SHAPE = '''
  s:KnowsFamous a sh:NodeShape ; sh:targetClass foaf:Person ; sh:sparql [ sh:select """
    PREFIX foaf: <http://xmlns.com/foaf/0.1/>
    PREFIX ex: <http://example.org/>
    SELECT $this WHERE { $this a foaf:Person .
      FILTER NOT EXISTS { $this foaf:knows+ ?f . GRAPH ex:famous { ?f a ex:FamousPerson } } }""" ] .
'''


@pytest.fixture
def famous_data():
    return parse_dataset(FAMOUS_DATA)


@pytest.fixture
def famous_exclusion_shapes():
    return parse_dataset(PREFIXES + "s:famous shds:targetGraph shds:all ; shds:targetGraphExclude ex:famous .\n"
                         + "s:famous {" + FAMOUS_SHAPE + "}")


@pytest.fixture
def famous_union_shapes():
    return parse_dataset(PREFIXES + "s:famous shds:targetGraphCombination [ shds:or ( shds:default ex:City1Graph ) ] .\n"
                         + "s:famous {" + FAMOUS_SHAPE + "}")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import OUTCOMES

    if not OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(OUTCOMES):
        terminalreporter.write_line(OUTCOMES[number])
