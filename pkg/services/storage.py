"""File helpers for graphs, partitions and run records."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List

import orjson
from pydantic import BaseModel

from services.generators import LabeledGraph
from services.graph_core import (
    Graph,
    Partition,
    load_edge_list,
    load_partition,
    save_edge_list,
    save_partition,
)
from services.settings import get_settings

_logger = logging.getLogger(__name__)

_JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS


def data_dir() -> Path:
    path = Path(get_settings().data_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def read_graph(path: str | Path) -> Graph:
    return load_edge_list(Path(path).read_text(encoding="utf-8"))


def write_graph(path: str | Path, g: Graph) -> None:
    _write_text(Path(path), save_edge_list(g))


def read_partition(path: str | Path, g: Graph) -> Partition:
    return load_partition(Path(path).read_text(encoding="utf-8"), g)


def write_partition(path: str | Path, p: Partition, g: Graph) -> None:
    _write_text(Path(path), save_partition(p, g))


def _without_isolated(p: Partition, g: Graph) -> str:
    return "".join(
        f"{g.labels[v]} {p.assignment[v]}\n" for v in range(g.n) if g.degrees[v] > 0
    )


def write_labeled_graph(prefix: str | Path, lg: LabeledGraph) -> List[Path]:
    """Write ``<prefix>.edges``, ``<prefix>.truth`` and one file per named division.

    The edge-list format cannot carry isolated vertices, so they are left
    out of every partition file written alongside it.
    """
    prefix = Path(prefix)
    g = lg.graph
    isolated = sum(1 for d in g.degrees if d == 0)
    if isolated:
        _logger.warning(
            "%d isolated vertices are not representable in the edge list; "
            "dropping them from partition files",
            isolated,
        )

    written: List[Path] = []
    edges_path = prefix.with_name(prefix.name + ".edges")
    write_graph(edges_path, g)
    written.append(edges_path)

    divisions: Dict[str, Partition] = {}
    if lg.ground_truth is not None:
        divisions["truth"] = lg.ground_truth
    for name, division in lg.named_divisions.items():
        divisions[_safe_name(name)] = division
    for suffix, division in divisions.items():
        path = prefix.with_name(f"{prefix.name}.{suffix}")
        _write_text(path, _without_isolated(division, g))
        written.append(path)
    _logger.info("Wrote %s graph to %s", lg.family, ", ".join(str(p) for p in written))
    return written


def _safe_name(name: str) -> str:
    return name.replace("*", "star").replace("/", "_")


def write_record(path: str | Path, record: BaseModel) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(record.model_dump(mode="json"), option=_JSON_OPTIONS) + b"\n")
