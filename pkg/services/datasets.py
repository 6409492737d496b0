"""Real-world benchmark networks.

The karate club and Les Misérables graphs ship with networkx. The college
football network is downloaded once from its public distribution and kept
in the data directory next to a SHA-256 sidecar that later loads verify.
"""

from __future__ import annotations

import hashlib
import io
import logging
import re
import zipfile
from pathlib import Path
from typing import Callable, Dict, Optional

import networkx as nx
import requests

from services.generators import LabeledGraph
from services.graph_core import build_graph, partition_from_labels
from services.settings import get_settings

_LOGGER = logging.getLogger(__name__)

FOOTBALL_URL = "http://www-personal.umich.edu/~mejn/netdata/football.zip"
_FOOTBALL_ARCHIVE = "football.zip"
_WHITESPACE = re.compile(r"\s+")


class DatasetError(ValueError):
    """A dataset could not be fetched or failed verification."""


def _label(node: object) -> str:
    return _WHITESPACE.sub("_", str(node).strip())


def _from_networkx(
    name: str, graph: nx.Graph, truth_attribute: Optional[str], params: Dict[str, object]
) -> LabeledGraph:
    labels = {node: _label(node) for node in graph.nodes}
    if len(set(labels.values())) != len(labels):
        raise DatasetError(f"{name}: vertex labels collide after sanitizing")
    g = build_graph(
        ((labels[u], labels[v]) for u, v in graph.edges() if u != v),
        vertices=[labels[node] for node in graph.nodes],
    )
    truth = None
    if truth_attribute is not None:
        truth = partition_from_labels(
            g,
            {labels[node]: data[truth_attribute] for node, data in graph.nodes(data=True)},
        )
    return LabeledGraph(family=name, graph=g, ground_truth=truth, params=params)


def karate() -> LabeledGraph:
    """Zachary's karate club: 34 vertices, 78 edges, truth = the two factions."""
    graph = nx.relabel_nodes(nx.karate_club_graph(), lambda node: node + 1)
    return _from_networkx("karate", graph, "club", {"source": "networkx"})


def les_miserables() -> LabeledGraph:
    """Character co-appearance network: 77 vertices, 254 edges, no ground truth."""
    return _from_networkx("lesmis", nx.les_miserables_graph(), None, {"source": "networkx"})


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".sha256")


def _download(url: str, destination: Path) -> None:
    timeout = get_settings().http_timeout
    _LOGGER.info("Downloading %s", url)
    try:
        response = requests.get(url, timeout=timeout)
        response.raise_for_status()
    except requests.RequestException as exc:
        raise DatasetError(f"download of {url} failed: {exc}") from exc
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_bytes(response.content)
    digest = hashlib.sha256(response.content).hexdigest()
    _sidecar(destination).write_text(digest + "\n", encoding="utf-8")
    _LOGGER.info("Cached %s (%d bytes, sha256 %s)", destination, len(response.content), digest)


def cached_archive(
    name: str, url: str, data_dir: Optional[Path] = None
) -> bytes:
    """Bytes of the cached archive ``name``, downloading it on first use."""
    root = Path(data_dir) if data_dir is not None else Path(get_settings().data_dir)
    path = root / "datasets" / name
    if not path.exists():
        _download(url, path)
    payload = path.read_bytes()
    sidecar = _sidecar(path)
    if sidecar.exists():
        expected = sidecar.read_text(encoding="utf-8").strip()
        actual = hashlib.sha256(payload).hexdigest()
        if actual != expected:
            _LOGGER.warning("Checksum mismatch for %s: %s != %s", path, actual, expected)
            raise DatasetError(f"cached file {path} does not match its checksum")
    else:
        _LOGGER.warning("No checksum recorded for %s", path)
    return payload


def parse_football_archive(payload: bytes) -> LabeledGraph:
    with zipfile.ZipFile(io.BytesIO(payload)) as archive:
        gml = archive.read("football.gml").decode("utf-8")
    # The distributed file starts with a free-text line networkx cannot parse.
    lines = gml.split("\n")[1:]
    graph = nx.parse_gml(lines)
    return _from_networkx("football", graph, "value", {"source": FOOTBALL_URL})


def football(data_dir: Optional[Path] = None) -> LabeledGraph:
    """American college football: 115 teams, truth = conference."""
    return parse_football_archive(cached_archive(_FOOTBALL_ARCHIVE, FOOTBALL_URL, data_dir))


DATASETS: Dict[str, Callable[[], LabeledGraph]] = {
    "karate": karate,
    "lesmis": les_miserables,
    "football": football,
}


def load_dataset(name: str) -> LabeledGraph:
    loader = DATASETS.get(name)
    if loader is None:
        raise DatasetError(f"unknown dataset: {name} (known: {', '.join(sorted(DATASETS))})")
    return loader()
