"""Evaluation datasets: what validation sees for one focus graph."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Dataset
from .namespaces import SHDS
from .targets import FocusGraph


class ViewError(ValueError):
    pass


@dataclass
class EvaluationDataset:
    view: Dataset
    focus: FocusGraph
    origin: Dataset

    @property
    def default(self):
        return self.view.default


def build_view(d: Dataset, focus: FocusGraph) -> EvaluationDataset:
    """The focus graph becomes the default graph; the original default graph
    moves to the named graph ``shds:default``; every named graph stays.

    Graph objects are shared with ``d``, not copied.
    """
    if SHDS.default in d.named:
        raise ViewError(f"data dataset already has a named graph called {SHDS.default.value}")
    named = dict(d.named)
    named[SHDS.default] = d.default
    return EvaluationDataset(Dataset(focus.triples, named), focus, d)
