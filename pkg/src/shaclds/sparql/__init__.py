"""SPARQL SELECT subset used by SPARQL-based constraints."""

from .algebra import Query
from .constraint import SparqlConstraint, validate_sparql_constraint
from .evaluate import evaluate_query, evaluate_select
from .parser import (
    ProhibitedFeatureError, SparqlSyntaxError, UnsupportedFeatureError, parse_query,
)
from .prohibited import ProhibitedFeature, check_prohibited

__all__ = [
    "ProhibitedFeature", "ProhibitedFeatureError", "Query", "SparqlConstraint",
    "SparqlSyntaxError", "UnsupportedFeatureError", "check_prohibited", "evaluate_query",
    "evaluate_select", "parse_query", "validate_sparql_constraint",
]
