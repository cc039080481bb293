"""Validation of RDF datasets with shapes datasets.

Shapes graphs are named graphs of a shapes dataset; ``shds:`` targeting
triples bind each one to data graphs, to set combinations of data graphs,
or to both. Results carry the shapes graph and the focus graph they came from.
"""

from .engine import ValidationRun, WellformednessError, validate, validate_dataset
from .model import BNode, Dataset, Graph, IRI, Literal, graph_isomorphic
from .parsing import ParseError, load_dataset, parse_dataset
from .report import conforms
from .serializer import serialize_dataset, serialize_graph
from .shapes_dataset import check_wellformed, extract_declarations

__version__ = "0.1.0"

__all__ = [
    "BNode", "Dataset", "Graph", "IRI", "Literal", "ParseError", "ValidationRun",
    "WellformednessError", "check_wellformed", "conforms", "extract_declarations",
    "graph_isomorphic", "load_dataset", "parse_dataset", "serialize_dataset",
    "serialize_graph", "validate", "validate_dataset",
]
