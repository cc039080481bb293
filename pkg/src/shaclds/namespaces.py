"""Vocabulary IRIs used throughout the engine."""

from __future__ import annotations

import os

from .model import IRI

SHDS_DEFAULT_BASE = "http://www.w3id.org/shacl-ds#"
# Alternate binding published for the meta-validation shapes dataset.
SHDS_ALT_BASE = "https://w3id.org/shacl-ds/shacl-ds#"

SHDS_BASE = os.environ.get("SHACLDS_NS_OVERRIDE") or SHDS_DEFAULT_BASE

SH_BASE = "http://www.w3.org/ns/shacl#"
RDF_BASE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_BASE = "http://www.w3.org/2000/01/rdf-schema#"
XSD_BASE = "http://www.w3.org/2001/XMLSchema#"


class Namespace(str):
    """A string IRI prefix; attribute or item access mints IRIs."""

    def term(self, name: str) -> IRI:
        return IRI(self + name)

    def __getattr__(self, name: str) -> IRI:
        if name.startswith("__"):
            raise AttributeError(name)
        return self.term(name)

    def __getitem__(self, name):  # type: ignore[override]
        if isinstance(name, str):
            return self.term(name)
        return str.__getitem__(self, name)


SHDS = Namespace(SHDS_BASE)
SH = Namespace(SH_BASE)
RDF = Namespace(RDF_BASE)
RDFS = Namespace(RDFS_BASE)
XSD = Namespace(XSD_BASE)

RDF_TYPE = RDF.type
RDF_FIRST = RDF.first
RDF_REST = RDF.rest
RDF_NIL = RDF.nil

# Prefixes bound when serializing reports.
REPORT_PREFIXES = {
    "sh": SH_BASE,
    "shds": SHDS_BASE,
    "rdf": RDF_BASE,
    "xsd": XSD_BASE,
    "foaf": "http://xmlns.com/foaf/0.1/",
    "ex": "http://example.org/",
    "s": "http://example.org/shapes/",
    "d": "http://example.org/data/",
}
