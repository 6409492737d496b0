"""Pydantic records written by the command-line workflows."""

from __future__ import annotations

import hashlib
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from services.graph_core import Graph, save_edge_list


def graph_fingerprint(g: Graph) -> str:
    """SHA-256 of the canonical edge-list rendering of ``g``."""
    return hashlib.sha256(save_edge_list(g).encode("utf-8")).hexdigest()


class RunRecord(BaseModel):
    """Reproducibility record of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    command: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    objective: Optional[str] = None
    modularity: Optional[float] = None
    z_modularity: Optional[float] = None
    communities: Optional[int] = None
    nmi: Optional[float] = None
    temperatures_run: Optional[int] = None
    restart_values: List[float] = Field(default_factory=list)
    graph_sha256: Optional[str] = None
    vertices: Optional[int] = None
    edges: Optional[int] = None
    wall_time_seconds: float = Field(default=0.0, ge=0)


class SweepRow(BaseModel):
    """NMI statistics of one objective at one ``p_out`` value."""

    model_config = ConfigDict(frozen=True)

    p_out: float = Field(ge=0, le=1)
    objective: str
    mean_nmi: float
    std_nmi: float = Field(ge=0)
    runs: int = Field(ge=1)
