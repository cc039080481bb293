from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Optional

from .model import IRI, Literal, Term
from .namespaces import SH

SEVERITIES = (SH.Violation, SH.Warning, SH.Info)


@dataclass(frozen=True)
class RawResult:
    """One constraint failure, before dataset-level annotation."""

    focus_node: Term
    component: IRI
    source_shape: Term
    severity: IRI = SH.Violation
    path: Optional[Any] = None
    value: Optional[Term] = None
    messages: tuple[Literal, ...] = ()
    source_constraint: Optional[Term] = None

    def __post_init__(self) -> None:
        if self.severity not in SEVERITIES:
            raise ValueError(f"unknown severity {self.severity}")
