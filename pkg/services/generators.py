"""Benchmark network families bundled with their reference divisions."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from services.graph_core import Graph, Partition, build_graph

_LOGGER = logging.getLogger(__name__)

HANOI_MAX_DISKS = 8


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """A generated graph with its ground truth and named reference divisions."""

    family: str
    graph: Graph
    ground_truth: Optional[Partition]
    named_divisions: Dict[str, Partition] = field(default_factory=dict)
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        divisions = dict(self.named_divisions)
        if self.ground_truth is not None:
            divisions.setdefault("ground_truth", self.ground_truth)
        for name, division in divisions.items():
            if division.n != self.graph.n:
                raise ValueError(f"division '{name}' does not partition the graph")


def _clique_edges(vertices: Sequence[int]) -> List[Tuple[int, int]]:
    return list(itertools.combinations(vertices, 2))


# ── ring of cliques ────────────────────────────────────────────────────────


def ring_of_cliques(p: int, q: int) -> LabeledGraph:
    """``q`` cliques ``K_p`` in a ring; clique i's vertex 0 links to clique i+1's vertex 1.

    ``n = p·q`` and ``m = q·(1 + p(p−1)/2)``.
    """
    if p < 3:
        raise ValueError(f"clique size p must be >= 3, got {p}")
    if q < 2:
        raise ValueError(f"clique count q must be >= 2, got {q}")

    edges: List[Tuple[int, int]] = []
    for clique in range(q):
        base = clique * p
        edges.extend(_clique_edges(range(base, base + p)))
    for clique in range(q):
        successor = (clique + 1) % q
        edges.append((clique * p, successor * p + 1))

    graph = build_graph(edges, vertices=range(p * q))
    cliques = Partition.from_assignment(v // p for v in range(p * q))
    divisions = {"C*": cliques}
    if q % 2 == 0 and q > 2:
        divisions["pairs_merged"] = Partition.from_assignment(
            v // (2 * p) for v in range(p * q)
        )
    return LabeledGraph(
        family="ring",
        graph=graph,
        ground_truth=cliques,
        named_divisions=divisions,
        params={"p": p, "q": q},
    )


def ring_grouped_division(lg: LabeledGraph, s: Sequence[int]) -> Partition:
    """Division into consecutive runs of ``s_i`` cliques, starting at clique 0."""
    if lg.family != "ring":
        raise ValueError("grouped divisions are defined for clique rings only")
    p = int(lg.params["p"])
    q = int(lg.params["q"])
    if any(size < 1 for size in s):
        raise ValueError("group sizes must be positive")
    if sum(s) != q:
        raise ValueError(f"group sizes sum to {sum(s)}, ring has {q} cliques")
    clique_group: List[int] = []
    for group, size in enumerate(s):
        clique_group.extend([group] * size)
    return Partition.from_assignment(clique_group[v // p] for v in range(p * q))


# ── two pairwise identical cliques ─────────────────────────────────────────


def two_pairwise_cliques(p: int, q: int) -> LabeledGraph:
    """Cliques C₁, C₂ of size ``q`` and C₃, C₄ of size ``p`` joined by single edges.

    Connectors: C₁–C₂, C₃–C₄, C₁–C₃, C₂–C₄, so ``n = 2(p+q)`` and
    ``m = p(p−1) + q(q−1) + 4``. Each clique uses its vertex 0 for the first
    connector it appears in and vertex 1 for the second.
    """
    if p < 3:
        raise ValueError(f"small clique size p must be >= 3, got {p}")
    if q <= p:
        raise ValueError(f"large clique size q must exceed p, got p={p}, q={q}")

    sizes = (q, q, p, p)
    offsets = [0, q, 2 * q, 2 * q + p]
    edges: List[Tuple[int, int]] = []
    for offset, size in zip(offsets, sizes):
        edges.extend(_clique_edges(range(offset, offset + size)))
    ports = [0, 0, 0, 0]
    for a, b in ((0, 1), (2, 3), (0, 2), (1, 3)):
        edges.append((offsets[a] + ports[a], offsets[b] + ports[b]))
        ports[a] += 1
        ports[b] += 1

    n = 2 * (p + q)
    graph = build_graph(edges, vertices=range(n))
    clique_of = [c for c, size in enumerate(sizes) for _ in range(size)]
    division_a = Partition.from_assignment(clique_of)
    division_b = Partition.from_assignment(min(c, 2) for c in clique_of)
    return LabeledGraph(
        family="pairwise",
        graph=graph,
        ground_truth=division_a,
        named_divisions={"C_A": division_a, "C_B": division_b},
        params={"p": p, "q": q},
    )


# ── planted l-partition ────────────────────────────────────────────────────


def planted_partition(
    n: int, l: int, p_in: float, p_out: float, seed: int
) -> LabeledGraph:
    """``l`` equal groups; same-group pairs link with ``p_in``, others with ``p_out``."""
    if n < 2 or l < 1 or n % l != 0:
        raise ValueError(f"l={l} must divide n={n} (n >= 2)")
    if not 0.0 <= p_out < p_in <= 1.0:
        raise ValueError(f"need 0 <= p_out < p_in <= 1, got p_in={p_in}, p_out={p_out}")

    group_size = n // l
    groups = np.arange(n) // group_size
    sequence = np.random.SeedSequence(seed)
    attempt = 0
    while True:
        rng = np.random.default_rng(sequence)
        edges: List[Tuple[int, int]] = []
        for u in range(n - 1):
            others = np.arange(u + 1, n)
            probabilities = np.where(groups[others] == groups[u], p_in, p_out)
            hits = others[rng.random(others.size) < probabilities]
            edges.extend((u, int(v)) for v in hits)
        if edges:
            break
        attempt += 1
        _LOGGER.warning("Planted partition drew no edges; regenerating (attempt %d)", attempt)
        sequence = sequence.spawn(1)[0]

    graph = build_graph(edges, vertices=range(n))
    truth = Partition.from_assignment(int(g) for g in groups)
    return LabeledGraph(
        family="planted",
        graph=graph,
        ground_truth=truth,
        named_divisions={},
        params={"n": n, "l": l, "p_in": p_in, "p_out": p_out, "seed": seed},
    )


def expected_planted_edges(n: int, l: int, p_in: float, p_out: float) -> float:
    group_size = n // l
    intra_pairs = l * group_size * (group_size - 1) // 2
    inter_pairs = n * (n - 1) // 2 - intra_pairs
    return intra_pairs * p_in + inter_pairs * p_out


# ── Hanoi graph ────────────────────────────────────────────────────────────


def _hanoi_moves(state: Tuple[int, ...]) -> List[Tuple[int, ...]]:
    """States reachable by one legal move; disk 0 is the smallest."""
    top: Dict[int, int] = {}
    for disk in range(len(state) - 1, -1, -1):
        top[state[disk]] = disk
    neighbors: List[Tuple[int, ...]] = []
    for peg, disk in top.items():
        for destination in range(3):
            if destination == peg:
                continue
            if destination in top and top[destination] < disk:
                continue
            moved = list(state)
            moved[disk] = destination
            neighbors.append(tuple(moved))
    return neighbors


def hanoi_graph(d: int) -> LabeledGraph:
    """State graph of the ``d``-disk tower of Hanoi: ``3^d`` vertices, ``3(3^d−1)/2`` edges.

    A vertex label lists the peg of each disk, smallest disk first.
    """
    if not 1 <= d <= HANOI_MAX_DISKS:
        raise ValueError(f"disk count must be in 1..{HANOI_MAX_DISKS}, got {d}")
    states = list(itertools.product(range(3), repeat=d))
    label = {state: "".join(str(peg) for peg in state) for state in states}
    edges: List[Tuple[str, str]] = []
    for state in states:
        for neighbor in _hanoi_moves(state):
            if state < neighbor:
                edges.append((label[state], label[neighbor]))
    graph = build_graph(edges, vertices=[label[state] for state in states])
    return LabeledGraph(
        family="hanoi",
        graph=graph,
        ground_truth=None,
        named_divisions={},
        params={"d": d},
    )
