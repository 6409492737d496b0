"""Modularity Q and Z-modularity Z, exact and incremental.

Both qualities are functions of three integers: the number of
intra-community edges ``intra = Σ m_C``, the squared degree sum
``sq = Σ D_C²`` and the edge count ``m``. With ``p = sq / (2m)²`` (the
probability that a random degree-preserving edge lands inside a community)

    Q = intra/m − p
    Z = (intra/m − p) / sqrt(p (1 − p))

Q is exactly Z's numerator. The sample size of the underlying binomial
model never depends on the division and is left out of Z. The single
community (p = 1) is scored Z = 0, the limit of sqrt((1 − p)/p).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import List, NamedTuple, Set, Tuple

from services.graph_core import Graph, Partition

NEW_COMMUNITY = -1


class Objective(str, Enum):
    MODULARITY = "modularity"
    Z_MODULARITY = "z_modularity"

    @classmethod
    def from_string(cls, value: str) -> "Objective":
        mapping = {
            "modularity": cls.MODULARITY,
            "q": cls.MODULARITY,
            "z_modularity": cls.Z_MODULARITY,
            "zmodularity": cls.Z_MODULARITY,
            "z-modularity": cls.Z_MODULARITY,
            "z": cls.Z_MODULARITY,
        }
        try:
            return mapping[value.strip().lower()]
        except KeyError:
            raise ValueError(f"Unknown objective: {value}") from None


def modularity_value(intra_edges: int, sq_degree_sum: int, m: int) -> float:
    return intra_edges / m - sq_degree_sum / (4 * m * m)


def z_modularity_value(intra_edges: int, sq_degree_sum: int, m: int) -> float:
    four_m2 = 4 * m * m
    if sq_degree_sum >= four_m2:
        return 0.0
    p = sq_degree_sum / four_m2
    return (intra_edges / m - p) / math.sqrt(p * (1.0 - p))


def evaluate(objective: Objective, intra_edges: int, sq_degree_sum: int, m: int) -> float:
    if objective is Objective.MODULARITY:
        return modularity_value(intra_edges, sq_degree_sum, m)
    return z_modularity_value(intra_edges, sq_degree_sum, m)


class MoveEval(NamedTuple):
    intra_edges: int
    sq_degree_sum: int
    links_source: int
    links_target: int


class MergeEval(NamedTuple):
    intra_edges: int
    sq_degree_sum: int
    links_between: int


class SplitEval(NamedTuple):
    intra_edges: int
    sq_degree_sum: int
    edges_kept: int
    edges_split: int
    degree_kept: int
    degree_split: int


def _recount(g: Graph, assignment: List[int], k: int) -> Tuple[List[int], List[int]]:
    edge_counts = [0] * k
    degree_sums = [0] * k
    for v, community in enumerate(assignment):
        degree_sums[community] += g.degrees[v]
    for u, v in g.edges():
        if assignment[u] == assignment[v]:
            edge_counts[assignment[u]] += 1
    return edge_counts, degree_sums


class QualityState:
    """Per-community aggregates over a shared graph, updated in O(deg v).

    Single-owner and mutable. Community indices stay dense: a community
    emptied by a move is replaced by the last one.
    """

    def __init__(
        self,
        graph: Graph,
        assignment: List[int],
        members: List[Set[int]],
        edge_counts: List[int],
        degree_sums: List[int],
    ) -> None:
        self.graph = graph
        self.assignment = assignment
        self.members = members
        self.edge_counts = edge_counts
        self.degree_sums = degree_sums
        self.intra_edges = sum(edge_counts)
        self.sq_degree_sum = sum(d * d for d in degree_sums)

    @property
    def k(self) -> int:
        return len(self.members)

    @property
    def m(self) -> int:
        return self.graph.m

    def value(self, objective: Objective) -> float:
        return evaluate(objective, self.intra_edges, self.sq_degree_sum, self.graph.m)

    def copy(self) -> "QualityState":
        return QualityState(
            self.graph,
            list(self.assignment),
            [set(group) for group in self.members],
            list(self.edge_counts),
            list(self.degree_sums),
        )

    def to_partition(self) -> Partition:
        return Partition.from_assignment(self.assignment)

    def check_consistency(self) -> None:
        """Recompute every aggregate from scratch; raise on any drift."""
        k = self.k
        for community, group in enumerate(self.members):
            if not group:
                raise RuntimeError(f"community {community} is empty")
            for v in group:
                if self.assignment[v] != community:
                    raise RuntimeError(f"members/assignment mismatch at vertex {v}")
        if sum(len(group) for group in self.members) != self.graph.n:
            raise RuntimeError("members do not cover the vertex set")
        edge_counts, degree_sums = _recount(self.graph, self.assignment, k)
        if edge_counts != self.edge_counts or degree_sums != self.degree_sums:
            raise RuntimeError("per-community aggregates drifted")
        if self.intra_edges != sum(edge_counts):
            raise RuntimeError("intra_edges drifted")
        if self.sq_degree_sum != sum(d * d for d in degree_sums):
            raise RuntimeError("sq_degree_sum drifted")

    # ── individual moves ───────────────────────────────────────────────────

    def move_aggregates(self, v: int, target: int) -> MoveEval:
        source = self.assignment[v]
        links_source = 0
        links_target = 0
        assignment = self.assignment
        for u in self.graph.adjacency[v]:
            community = assignment[u]
            if community == source:
                links_source += 1
            elif community == target:
                links_target += 1
        degree = self.graph.degrees[v]
        d_source = self.degree_sums[source]
        d_target = self.degree_sums[target] if target != NEW_COMMUNITY else 0
        sq = (
            self.sq_degree_sum
            - d_source * d_source
            - d_target * d_target
            + (d_source - degree) ** 2
            + (d_target + degree) ** 2
        )
        intra = self.intra_edges - links_source + links_target
        return MoveEval(intra, sq, links_source, links_target)

    def commit_move(self, v: int, target: int, evaluation: MoveEval) -> None:
        source = self.assignment[v]
        if target == NEW_COMMUNITY:
            target = len(self.members)
            self.members.append(set())
            self.edge_counts.append(0)
            self.degree_sums.append(0)
        degree = self.graph.degrees[v]
        self.members[source].discard(v)
        self.members[target].add(v)
        self.assignment[v] = target
        self.edge_counts[source] -= evaluation.links_source
        self.edge_counts[target] += evaluation.links_target
        self.degree_sums[source] -= degree
        self.degree_sums[target] += degree
        self.intra_edges = evaluation.intra_edges
        self.sq_degree_sum = evaluation.sq_degree_sum
        if not self.members[source]:
            self._drop_community(source)

    def _drop_community(self, community: int) -> None:
        last = len(self.members) - 1
        if community != last:
            moved = self.members[last]
            for u in moved:
                self.assignment[u] = community
            self.members[community] = moved
            self.edge_counts[community] = self.edge_counts[last]
            self.degree_sums[community] = self.degree_sums[last]
        self.members.pop()
        self.edge_counts.pop()
        self.degree_sums.pop()

    # ── collective moves ───────────────────────────────────────────────────

    def merge_aggregates(self, a: int, b: int) -> MergeEval:
        if len(self.members[a]) > len(self.members[b]):
            a, b = b, a
        assignment = self.assignment
        adjacency = self.graph.adjacency
        links = 0
        for v in self.members[a]:
            for u in adjacency[v]:
                if assignment[u] == b:
                    links += 1
        d_a = self.degree_sums[a]
        d_b = self.degree_sums[b]
        sq = self.sq_degree_sum + 2 * d_a * d_b
        return MergeEval(self.intra_edges + links, sq, links)

    def commit_merge(self, a: int, b: int, evaluation: MergeEval) -> None:
        if len(self.members[a]) > len(self.members[b]):
            a, b = b, a
        for v in self.members[a]:
            self.assignment[v] = b
        self.members[b].update(self.members[a])
        self.members[a] = set()
        self.edge_counts[b] += self.edge_counts[a] + evaluation.links_between
        self.degree_sums[b] += self.degree_sums[a]
        self.edge_counts[a] = 0
        self.degree_sums[a] = 0
        self.intra_edges = evaluation.intra_edges
        self.sq_degree_sum = evaluation.sq_degree_sum
        self._drop_community(a)

    def split_aggregates(self, community: int, part: Set[int]) -> SplitEval:
        """Aggregates after moving ``part`` (a subset of ``community``) out."""
        assignment = self.assignment
        adjacency = self.graph.adjacency
        degrees = self.graph.degrees
        inside_part = 0
        cut = 0
        degree_split = 0
        for v in part:
            degree_split += degrees[v]
            for u in adjacency[v]:
                if assignment[u] != community:
                    continue
                if u in part:
                    inside_part += 1
                else:
                    cut += 1
        edges_split = inside_part // 2
        edges_kept = self.edge_counts[community] - edges_split - cut
        d_total = self.degree_sums[community]
        degree_kept = d_total - degree_split
        sq = (
            self.sq_degree_sum
            - d_total * d_total
            + degree_kept * degree_kept
            + degree_split * degree_split
        )
        return SplitEval(
            self.intra_edges - cut,
            sq,
            edges_kept,
            edges_split,
            degree_kept,
            degree_split,
        )

    def commit_split(
        self, community: int, part: Set[int], evaluation: SplitEval
    ) -> None:
        new_index = len(self.members)
        for v in part:
            self.assignment[v] = new_index
        self.members[community].difference_update(part)
        self.members.append(set(part))
        self.edge_counts[community] = evaluation.edges_kept
        self.degree_sums[community] = evaluation.degree_kept
        self.edge_counts.append(evaluation.edges_split)
        self.degree_sums.append(evaluation.degree_split)
        self.intra_edges = evaluation.intra_edges
        self.sq_degree_sum = evaluation.sq_degree_sum


def build_state(g: Graph, p: Partition) -> QualityState:
    if p.n != g.n:
        raise ValueError(f"partition covers {p.n} vertices, graph has {g.n}")
    assignment = list(p.assignment)
    k = p.k
    members: List[Set[int]] = [set() for _ in range(k)]
    for v, community in enumerate(assignment):
        members[community].add(v)
    edge_counts, degree_sums = _recount(g, assignment, k)
    return QualityState(g, assignment, members, edge_counts, degree_sums)


def modularity(state: QualityState) -> float:
    return modularity_value(state.intra_edges, state.sq_degree_sum, state.graph.m)


def z_modularity(state: QualityState) -> float:
    return z_modularity_value(state.intra_edges, state.sq_degree_sum, state.graph.m)


def null_probability(state: QualityState) -> float:
    m = state.graph.m
    return state.sq_degree_sum / (4 * m * m)


def apply_move(state: QualityState, v: int, target: int) -> Tuple[float, float]:
    """Move ``v`` to ``target`` (or ``NEW_COMMUNITY``); return (ΔQ, ΔZ).

    Moving a vertex to its own community, or a singleton to a new one, is a
    no-op with zero deltas.
    """
    source = state.assignment[v]
    if target == source or (
        target == NEW_COMMUNITY and len(state.members[source]) == 1
    ):
        return 0.0, 0.0
    if target != NEW_COMMUNITY and not 0 <= target < state.k:
        raise ValueError(f"unknown community: {target}")
    q_before = modularity(state)
    z_before = z_modularity(state)
    state.commit_move(v, target, state.move_aggregates(v, target))
    return modularity(state) - q_before, z_modularity(state) - z_before


def merge_communities(state: QualityState, a: int, b: int) -> Tuple[float, float]:
    """Merge communities ``a`` and ``b``; return (ΔQ, ΔZ)."""
    if a == b or not (0 <= a < state.k and 0 <= b < state.k):
        raise ValueError(f"cannot merge communities {a} and {b}")
    q_before = modularity(state)
    z_before = z_modularity(state)
    state.commit_merge(a, b, state.merge_aggregates(a, b))
    return modularity(state) - q_before, z_modularity(state) - z_before


def split_community(
    state: QualityState, community: int, side: Set[int]
) -> Tuple[float, float]:
    """Move ``side`` out of ``community`` into a new community; return (ΔQ, ΔZ)."""
    if not 0 <= community < state.k:
        raise ValueError(f"unknown community: {community}")
    members = state.members[community]
    if not side or not side < members:
        raise ValueError("split side must be a non-empty proper subset of the community")
    q_before = modularity(state)
    z_before = z_modularity(state)
    state.commit_split(community, set(side), state.split_aggregates(community, side))
    return modularity(state) - q_before, z_modularity(state) - z_before


def evaluate_partition(g: Graph, p: Partition) -> Tuple[float, float]:
    """(Q, Z) of ``p`` computed from scratch."""
    state = build_state(g, p)
    return modularity(state), z_modularity(state)
