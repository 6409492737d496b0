"""Tests for services/analytic_oracle.py."""

from __future__ import annotations

import numpy as np
import pytest

from services.analytic_oracle import (
    PAIRWISE_ERRATA,
    PAIRWISE_TABLE_REFERENCE,
    RING_TABLE_REFERENCE,
    check_implication,
    check_never_merge,
    compositions,
    direct_pairwise_values,
    f,
    pairwise_aggregates,
    random_composition,
    reproduce_tables,
    ring_q_grouped,
    ring_q_star,
    ring_z_grouped,
    ring_z_star,
    round_half_up,
)
from services.generators import ring_grouped_division, ring_of_cliques
from services.quality import build_state, modularity, modularity_value, z_modularity

ORACLE = 1e-9

# ── ring closed forms ──────────────────────────────────────────────────────────


def test_smallest_ring_z_star() -> None:
    assert ring_z_star(3, 2) == pytest.approx(0.5, abs=ORACLE)


def test_ring_reference_values() -> None:
    assert ring_q_star(5, 20) == pytest.approx(0.859091, abs=1e-6)
    assert ring_q_grouped(5, 40, [2] * 20) == pytest.approx(0.904545, abs=1e-6)
    assert ring_z_grouped(5, 40, [2] * 20) == pytest.approx(4.1504, abs=1e-4)


def test_single_group_scores_zero() -> None:
    assert ring_q_grouped(5, 10, [10]) == 0.0
    assert ring_z_grouped(5, 10, [10]) == 0.0


def test_grouped_rejects_bad_composition() -> None:
    with pytest.raises(ValueError):
        ring_z_grouped(5, 10, [3, 3])
    with pytest.raises(ValueError):
        ring_z_star(2, 10)


def test_f_domain() -> None:
    assert f(0.5, 2, 10) == pytest.approx((1 - 0.2 - 0.5) / 0.5)
    with pytest.raises(ValueError):
        f(0.0, 2, 10)
    with pytest.raises(ValueError):
        f(0.5, 0, 10)
    with pytest.raises(ValueError):
        f(0.5, 11, 10)


def test_f_matches_clique_division() -> None:
    m = 220
    assert f(1 / 20, 20, m) == pytest.approx(ring_z_star(5, 20), abs=ORACLE)


@pytest.mark.parametrize("p", [3, 4, 5])
def test_closed_forms_match_direct_evaluation(p: int) -> None:
    for q in range(2, 13):
        lg = ring_of_cliques(p, q)
        for s in compositions(q):
            state = build_state(lg.graph, ring_grouped_division(lg, s))
            assert modularity(state) == pytest.approx(ring_q_grouped(p, q, s), abs=ORACLE)
            assert z_modularity(state) == pytest.approx(ring_z_grouped(p, q, s), abs=ORACLE)
        star = build_state(lg.graph, lg.named_divisions["C*"])
        assert z_modularity(star) == pytest.approx(ring_z_star(p, q), abs=ORACLE)
        assert modularity(star) == pytest.approx(ring_q_star(p, q), abs=ORACLE)


# ── compositions ───────────────────────────────────────────────────────────────


def test_compositions_enumerate_all() -> None:
    found = list(compositions(4))
    assert len(found) == 8
    assert len(set(found)) == 8
    assert all(sum(s) == 4 for s in found)
    assert (4,) in found and (1, 1, 1, 1) in found


def test_random_composition_sums_to_q() -> None:
    rng = np.random.default_rng(0)
    for _ in range(200):
        s = random_composition(37, rng)
        assert sum(s) == 37
        assert min(s) >= 1


# ── never-merge theorem ────────────────────────────────────────────────────────


@pytest.mark.parametrize("p", [3, 4, 5])
@pytest.mark.parametrize("q", range(2, 13))
def test_never_merge_exhaustive(p: int, q: int) -> None:
    report = check_never_merge(p, q)
    assert report.exhaustive
    assert report.holds
    assert report.compositions_checked == 2 ** (q - 1) - 1


@pytest.mark.parametrize("q", [40, 80, 1000])
def test_never_merge_sampled(q: int) -> None:
    report = check_never_merge(5, q, trials=10_000, seed=q)
    assert not report.exhaustive
    assert report.holds
    assert report.best_grouped < report.z_star


# ── two pairwise cliques ───────────────────────────────────────────────────────


@pytest.mark.parametrize("p,q", [(3, 4), (5, 8), (5, 16), (6, 20)])
def test_simple_aggregates_match_generated_graph(p: int, q: int) -> None:
    direct = direct_pairwise_values(p, q)
    for suffix, division in (("a", "C_A"), ("b", "C_B")):
        intra, sq, m = pairwise_aggregates(p, q, division)
        assert modularity_value(intra, sq, m) == pytest.approx(direct[f"q_{suffix}"], abs=ORACLE)
        assert sq / (4 * m * m) == pytest.approx(direct[f"p_{suffix}"], abs=ORACLE)


def test_simple_wiring_values() -> None:
    direct = direct_pairwise_values(5, 8)
    assert direct["q_a"] == pytest.approx(0.649375, abs=1e-6)
    assert direct["q_b"] == pytest.approx(0.6240625, abs=1e-6)


def test_folded_connector_moves_one_edge_inside() -> None:
    simple = pairwise_aggregates(5, 8, "C_A")
    folded = pairwise_aggregates(5, 8, "C_A", folded_connector=True)
    assert folded[0] == simple[0] + 1
    assert folded[2] == simple[2]


def test_pairwise_aggregates_reject_unknown_division() -> None:
    with pytest.raises(ValueError):
        pairwise_aggregates(5, 8, "C_C")


def test_implication_on_full_grid() -> None:
    for q in range(4, 65):
        for p in range(3, q):
            assert check_implication(p, q, direct=False).holds, (p, q)


@pytest.mark.parametrize("p,q", [(3, 4), (5, 8), (5, 16), (4, 30)])
def test_implication_direct(p: int, q: int) -> None:
    direct = check_implication(p, q, direct=True)
    fast = check_implication(p, q, direct=False)
    assert direct.holds
    assert direct.q_a == pytest.approx(fast.q_a, abs=ORACLE)
    assert direct.z_b == pytest.approx(fast.z_b, abs=ORACLE)


# ── tables ─────────────────────────────────────────────────────────────────────


def test_reproduce_tables_all_within_tolerance() -> None:
    ring_rows, pairwise_rows = reproduce_tables()
    assert len(ring_rows) == len(RING_TABLE_REFERENCE) == 4
    assert len(pairwise_rows) == len(PAIRWISE_TABLE_REFERENCE) == 4
    for row in ring_rows + pairwise_rows:
        assert row.ok, row


def test_pairwise_first_row_values() -> None:
    _, pairwise_rows = reproduce_tables()
    row = pairwise_rows[0]
    assert (row.n, row.m, row.p, row.q) == (26, 80, 5, 8)
    q_a, q_b, z_a, z_b = row.values()
    assert q_a == pytest.approx(0.6618, abs=5e-4)
    assert z_a == pytest.approx(1.443, abs=5e-4)
    assert z_b == pytest.approx(1.345, abs=5e-4)
    erratum = row.cells[1]
    assert erratum.note
    assert erratum.compared == pytest.approx(0.3385, abs=5e-4)
    assert q_b > erratum.compared


def test_pairwise_errata_cover_exactly_two_cells() -> None:
    _, pairwise_rows = reproduce_tables()
    noted = {
        (row.q, cell.column): cell
        for row in pairwise_rows
        for cell in row.cells
        if cell.note
    }
    assert set(noted) == {(q, column) for _, q, column in PAIRWISE_ERRATA}
    assert set(noted) == {(8, "q_2"), (16, "z_1")}
    double_rounded = noted[(16, "z_1")]
    assert double_rounded.computed == pytest.approx(1.143457, abs=1e-6)
    assert double_rounded.compared == 1.144
    assert double_rounded.reference == pytest.approx(1.144)


def test_ring_large_row_uses_wide_tolerance() -> None:
    ring_rows, _ = reproduce_tables()
    last = ring_rows[-1]
    assert (last.n, last.m) == (5000, 11000)
    assert last.cells[2].tolerance == 5e-3
    assert last.cells[0].tolerance == 5e-4


def test_round_half_up() -> None:
    assert round_half_up(1.14345, 4) == 1.1435
    assert round_half_up(round_half_up(1.143457, 4), 3) == 1.144
    assert round_half_up(2.5, 0) == 3.0
