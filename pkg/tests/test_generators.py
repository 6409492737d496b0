"""Unit tests for the benchmark generators."""

from __future__ import annotations

import networkx as nx
import pytest

from services.generators import (
    HANOI_MAX_DISKS,
    expected_planted_edges,
    hanoi_graph,
    planted_partition,
    ring_grouped_division,
    ring_of_cliques,
    two_pairwise_cliques,
)
from services.graph_core import save_edge_list

# ── ring of cliques ────────────────────────────────────────────────────────────


@pytest.mark.parametrize("p", range(3, 9))
@pytest.mark.parametrize("q", [2, 3, 5, 16, 64])
def test_ring_sizes(p: int, q: int) -> None:
    lg = ring_of_cliques(p, q)
    assert lg.graph.n == p * q
    assert lg.graph.m == q * (1 + p * (p - 1) // 2)
    assert lg.ground_truth.k == q


def test_ring_is_connected_and_bridges_join_neighbours() -> None:
    lg = ring_of_cliques(5, 6)
    graph = lg.graph.to_networkx()
    assert nx.is_connected(graph)
    truth = lg.ground_truth.assignment
    bridges = [(u, v) for u, v in lg.graph.edges() if truth[u] != truth[v]]
    assert len(bridges) == 6
    for u, v in bridges:
        assert (truth[v] - truth[u]) % 6 in (1, 5)


def test_ring_pairs_merged_division() -> None:
    lg = ring_of_cliques(5, 40)
    pairs = lg.named_divisions["pairs_merged"]
    assert pairs.k == 20
    assert set(pairs.sizes()) == {10}
    assert "pairs_merged" not in ring_of_cliques(5, 7).named_divisions


def test_ring_rejects_small_parameters() -> None:
    with pytest.raises(ValueError):
        ring_of_cliques(2, 5)
    with pytest.raises(ValueError):
        ring_of_cliques(5, 1)


def test_grouped_division_uses_consecutive_runs() -> None:
    lg = ring_of_cliques(3, 5)
    division = ring_grouped_division(lg, [2, 1, 2])
    assert division.k == 3
    assert division.sizes() == [6, 3, 6]
    assert division.assignment[:6] == (0,) * 6


def test_grouped_division_validates_composition() -> None:
    lg = ring_of_cliques(3, 5)
    with pytest.raises(ValueError):
        ring_grouped_division(lg, [2, 2])
    with pytest.raises(ValueError):
        ring_grouped_division(lg, [0, 5])


# ── two pairwise cliques ───────────────────────────────────────────────────────


@pytest.mark.parametrize("p,q", [(3, 4), (5, 8), (5, 16), (7, 30), (20, 64)])
def test_pairwise_sizes(p: int, q: int) -> None:
    lg = two_pairwise_cliques(p, q)
    assert lg.graph.n == 2 * (p + q)
    assert lg.graph.m == p * (p - 1) + q * (q - 1) + 4
    assert nx.is_connected(lg.graph.to_networkx())


def test_pairwise_divisions() -> None:
    lg = two_pairwise_cliques(5, 8)
    division_a = lg.named_divisions["C_A"]
    division_b = lg.named_divisions["C_B"]
    assert division_a.sizes() == [8, 8, 5, 5]
    assert division_b.sizes() == [8, 8, 10]
    assert lg.ground_truth == division_a


def test_pairwise_bridge_topology() -> None:
    lg = two_pairwise_cliques(5, 8)
    clique = lg.named_divisions["C_A"].assignment
    joined = sorted(
        tuple(sorted((clique[u], clique[v])))
        for u, v in lg.graph.edges()
        if clique[u] != clique[v]
    )
    assert joined == [(0, 1), (0, 2), (1, 3), (2, 3)]


def test_pairwise_requires_p_below_q() -> None:
    with pytest.raises(ValueError):
        two_pairwise_cliques(5, 5)
    with pytest.raises(ValueError):
        two_pairwise_cliques(2, 8)


# ── planted partition ──────────────────────────────────────────────────────────


def test_planted_is_reproducible_for_a_seed() -> None:
    first = planted_partition(200, 4, 0.3, 0.02, seed=7)
    second = planted_partition(200, 4, 0.3, 0.02, seed=7)
    assert save_edge_list(first.graph) == save_edge_list(second.graph)
    other = planted_partition(200, 4, 0.3, 0.02, seed=8)
    assert save_edge_list(first.graph) != save_edge_list(other.graph)


def test_planted_noiseless_case_is_disjoint_cliques() -> None:
    lg = planted_partition(20, 4, 1.0, 0.0, seed=0)
    assert lg.graph.m == 4 * 10
    components = list(nx.connected_components(lg.graph.to_networkx()))
    assert len(components) == 4
    assert lg.ground_truth.k == 4


def test_planted_edge_count_near_expectation() -> None:
    lg = planted_partition(400, 8, 0.2, 0.01, seed=1)
    expected = expected_planted_edges(400, 8, 0.2, 0.01)
    assert abs(lg.graph.m - expected) < 5 * expected**0.5


def test_planted_validates_parameters() -> None:
    with pytest.raises(ValueError):
        planted_partition(10, 3, 0.5, 0.1, seed=0)
    with pytest.raises(ValueError):
        planted_partition(10, 2, 0.1, 0.5, seed=0)


# ── Hanoi graph ────────────────────────────────────────────────────────────────


@pytest.mark.parametrize("d", range(1, 7))
def test_hanoi_sizes(d: int) -> None:
    lg = hanoi_graph(d)
    assert lg.graph.n == 3**d
    assert lg.graph.m == 3 * (3**d - 1) // 2
    assert lg.ground_truth is None
    assert nx.is_connected(lg.graph.to_networkx())


def test_hanoi_degrees() -> None:
    lg = hanoi_graph(3)
    assert sorted(set(lg.graph.degrees)) == [2, 3]
    assert lg.graph.degrees.count(2) == 3


def test_hanoi_rejects_out_of_range() -> None:
    with pytest.raises(ValueError):
        hanoi_graph(0)
    with pytest.raises(ValueError):
        hanoi_graph(HANOI_MAX_DISKS + 1)
