"""Immutable simple undirected graphs, partitions, and their text formats.

Edge-list format: UTF-8, one whitespace-separated label pair per line,
``#`` comment lines and blank lines ignored. Partition format: one
``label community_id`` pair per line.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Sequence, Tuple

_LOGGER = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Malformed edge-list or partition text."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PartitionError(ValueError):
    """A partition that does not cover the graph's vertex set exactly once."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with dense vertex indices ``0..n-1``."""

    n: int
    m: int
    adjacency: Tuple[Tuple[int, ...], ...]
    degrees: Tuple[int, ...]
    labels: Tuple[str, ...]
    index: Dict[str, int] = field(repr=False)
    duplicates_collapsed: int = 0

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def edges(self) -> Iterator[Tuple[int, int]]:
        """Yield every edge once as ``(u, v)`` with ``u < v``."""
        for u, neighbors in enumerate(self.adjacency):
            for v in neighbors:
                if u < v:
                    yield u, v

    def edge_set(self) -> frozenset[frozenset[str]]:
        """Edges as unordered label pairs, independent of index order."""
        labels = self.labels
        return frozenset(frozenset((labels[u], labels[v])) for u, v in self.edges())

    def to_networkx(self):
        import networkx as nx

        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph


@dataclass(frozen=True)
class Partition:
    """Assignment of every vertex to exactly one of ``k`` dense communities."""

    assignment: Tuple[int, ...]

    def __post_init__(self) -> None:
        seen = set(self.assignment)
        if seen != set(range(len(seen))):
            raise PartitionError("community indices must be dense 0..k-1")

    @classmethod
    def from_assignment(cls, assignment: Iterable[int | str]) -> "Partition":
        """Renumber arbitrary community ids densely in first-appearance order."""
        renumber: Dict[object, int] = {}
        dense: List[int] = []
        for community in assignment:
            if community not in renumber:
                renumber[community] = len(renumber)
            dense.append(renumber[community])
        return cls(tuple(dense))

    @classmethod
    def from_groups(cls, groups: Sequence[Iterable[int]], n: int) -> "Partition":
        assignment = [-1] * n
        for community, members in enumerate(groups):
            for v in members:
                if assignment[v] != -1:
                    raise PartitionError(f"vertex {v} assigned twice")
                assignment[v] = community
        if -1 in assignment:
            raise PartitionError(f"vertex {assignment.index(-1)} is uncovered")
        return cls.from_assignment(assignment)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def k(self) -> int:
        return max(self.assignment) + 1 if self.assignment else 0

    @property
    def members(self) -> Tuple[Tuple[int, ...], ...]:
        groups: List[List[int]] = [[] for _ in range(self.k)]
        for v, community in enumerate(self.assignment):
            groups[community].append(v)
        return tuple(tuple(group) for group in groups)

    def sizes(self) -> List[int]:
        sizes = [0] * self.k
        for community in self.assignment:
            sizes[community] += 1
        return sizes

    def canonical(self) -> "Partition":
        return Partition.from_assignment(self.assignment)

    def same_communities(self, other: "Partition") -> bool:
        """True when both partitions have identical membership sets."""
        return self.canonical().assignment == other.canonical().assignment


def build_graph(
    edges: Iterable[Tuple[object, object]],
    vertices: Iterable[object] | None = None,
) -> Graph:
    """Build a graph from label pairs; indices follow first appearance.

    ``vertices`` pre-registers labels (in order) so isolated vertices survive
    and index order is fixed by the caller. Parallel edges are collapsed and
    counted; self-loops and empty edge sets are rejected.
    """
    index: Dict[str, int] = {}
    labels: List[str] = []

    def _intern(label: object) -> int:
        key = str(label)
        position = index.get(key)
        if position is None:
            position = len(labels)
            index[key] = position
            labels.append(key)
        return position

    if vertices is not None:
        for label in vertices:
            if str(label) in index:
                raise ValueError(f"duplicate vertex label: {label}")
            _intern(label)

    neighbor_sets: List[set[int]] = [set() for _ in labels]
    duplicates = 0
    m = 0
    for a, b in edges:
        if str(a) == str(b):
            raise ValueError(f"self-loop on vertex {a}")
        u = _intern(a)
        v = _intern(b)
        while len(neighbor_sets) < len(labels):
            neighbor_sets.append(set())
        if v in neighbor_sets[u]:
            duplicates += 1
            continue
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
        m += 1

    if m == 0:
        raise ValueError("graph has no edges; quality functions are undefined")
    if duplicates:
        _LOGGER.info("Collapsed %d duplicate edges", duplicates)

    adjacency = tuple(tuple(sorted(neighbors)) for neighbors in neighbor_sets)
    degrees = tuple(len(neighbors) for neighbors in adjacency)
    return Graph(
        n=len(labels),
        m=m,
        adjacency=adjacency,
        degrees=degrees,
        labels=tuple(labels),
        index=index,
        duplicates_collapsed=duplicates,
    )


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped.split()


def load_edge_list(text: str) -> Graph:
    edges: List[Tuple[str, str]] = []
    for number, tokens in _content_lines(text):
        if len(tokens) != 2:
            raise GraphFormatError(
                f"expected 2 labels per edge, found {len(tokens)}", line=number
            )
        edges.append((tokens[0], tokens[1]))
    if not edges:
        raise GraphFormatError("edge list is empty")
    return build_graph(edges)


def save_edge_list(g: Graph) -> str:
    labels = g.labels
    return "".join(f"{labels[u]} {labels[v]}\n" for u, v in g.edges())


def singleton_partition(g: Graph) -> Partition:
    return Partition(tuple(range(g.n)))


def load_partition(text: str, g: Graph) -> Partition:
    assigned: Dict[int, str] = {}
    for number, tokens in _content_lines(text):
        if len(tokens) != 2:
            raise GraphFormatError(
                f"expected 'label community_id', found {len(tokens)} tokens",
                line=number,
            )
        label, community = tokens
        v = g.index.get(label)
        if v is None:
            raise PartitionError(f"unknown vertex label: {label} (line {number})")
        if v in assigned:
            raise PartitionError(f"duplicate vertex: {label} (line {number})")
        assigned[v] = community
    missing = [g.labels[v] for v in range(g.n) if v not in assigned]
    if missing:
        preview = ", ".join(missing[:5])
        raise PartitionError(f"uncovered vertex: {preview} ({len(missing)} total)")
    return Partition.from_assignment(assigned[v] for v in range(g.n))


def save_partition(p: Partition, g: Graph) -> str:
    return "".join(
        f"{label} {community}\n" for label, community in zip(g.labels, p.assignment)
    )


def partition_from_labels(g: Graph, communities: Mapping[str, object]) -> Partition:
    """Partition from a label → community-id mapping covering ``g``."""
    missing = [label for label in g.labels if label not in communities]
    if missing:
        raise PartitionError(f"uncovered vertex: {missing[0]}")
    return Partition.from_assignment(communities[label] for label in g.labels)
