"""Simulated-annealing maximization of modularity or Z-modularity.

The move scheme follows Guimerà and Amaral: at every temperature perform
``f_i · n²`` individual vertex moves and ``f_c · n`` merge plus ``f_c · n``
split attempts. Merges only pair communities that share an edge.
Improvements are always accepted, a worsening Δ with probability
``exp(Δ/T)``. Splits are proposed by a short nested annealing
of a bisection on the chosen community, scored with the global objective.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from services.graph_core import Graph, Partition, singleton_partition
from services.parallel import map_ordered
from services.quality import (
    NEW_COMMUNITY,
    Objective,
    QualityState,
    build_state,
    evaluate,
    modularity,
    z_modularity,
)

_LOGGER = logging.getLogger(__name__)

_SPLIT_COOLING = 0.5


class AnnealConfig(BaseModel):
    """Annealing schedule and move mix.

    Temperatures left as ``None`` resolve against the graph size:
    ``initial_temperature = 1/n`` and ``min_temperature = 1e-6/n``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    initial_temperature: Optional[float] = Field(default=None, gt=0)
    cooling_factor: float = Field(default=0.995, gt=0, lt=1)
    individual_moves_per_t: float = Field(default=1.0, gt=0)
    collective_moves_per_t: float = Field(default=1.0, gt=0)
    min_temperature: Optional[float] = Field(default=None, gt=0)
    stagnation_limit: int = Field(default=25, gt=0)
    stagnation_tolerance: float = Field(default=1e-9, ge=0)
    rng_seed: int = Field(default=0, ge=0, lt=2**64)
    objective: Objective = Objective.Z_MODULARITY
    split_temperatures: int = Field(default=10, gt=0)
    check_invariants: bool = False

    def resolved(self, n: int) -> "AnnealConfig":
        update: Dict[str, Any] = {}
        if self.initial_temperature is None:
            update["initial_temperature"] = 1.0 / n
        if self.min_temperature is None:
            update["min_temperature"] = 1e-6 / n
        return self.model_copy(update=update) if update else self

    def individual_moves(self, n: int) -> int:
        return max(1, round(self.individual_moves_per_t * n * n))

    def collective_moves(self, n: int) -> int:
        return max(1, round(self.collective_moves_per_t * n))


@dataclass
class AnnealResult:
    best_partition: Partition
    best_value: float
    objective: Objective
    objective_trace: List[float] = field(default_factory=list)
    temperatures_run: int = 0
    seed_used: int = 0
    modularity: float = 0.0
    z_modularity: float = 0.0
    elapsed_seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "objective": self.objective.value,
            "best_value": self.best_value,
            "modularity": self.modularity,
            "z_modularity": self.z_modularity,
            "communities": self.best_partition.k,
            "temperatures_run": self.temperatures_run,
            "seed_used": self.seed_used,
            "objective_trace": list(self.objective_trace),
        }


def derive_seed(seed: int, *indices: int) -> int:
    """Independent 64-bit seed for the task at ``indices`` under ``seed``."""
    sequence = np.random.SeedSequence([seed, *indices])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def _accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    if delta >= 0:
        return True
    return rng.random() < math.exp(delta / temperature)


def _pick(rng: np.random.Generator, count: int) -> int:
    return min(int(rng.random() * count), count - 1)


def propose_individual_move(
    state: QualityState, rng: np.random.Generator
) -> Optional[Tuple[int, int]]:
    """Uniform vertex, uniform target among other communities or a new one.

    A new community is not offered to a vertex that is already alone.
    """
    v = _pick(rng, state.graph.n)
    source = state.assignment[v]
    k = state.k
    offers_new = len(state.members[source]) > 1
    choices = (k - 1) + (1 if offers_new else 0)
    if choices == 0:
        return None
    index = _pick(rng, choices)
    if index < k - 1:
        return v, index if index < source else index + 1
    return v, NEW_COMMUNITY


def propose_merge(
    state: QualityState, rng: np.random.Generator
) -> Optional[Tuple[int, int]]:
    """Uniform community and a uniform community it shares an edge with.

    Returns ``None`` when the chosen community has no outside neighbours.
    """
    k = state.k
    if k < 2:
        return None
    a = _pick(rng, k)
    adjacency = state.graph.adjacency
    assignment = state.assignment
    touching = sorted(
        {assignment[u] for v in state.members[a] for u in adjacency[v]} - {a}
    )
    if not touching:
        return None
    return a, touching[_pick(rng, len(touching))]


def propose_split(
    state: QualityState,
    rng: np.random.Generator,
    *,
    temperature: float,
    objective: Objective,
    steps: int = 10,
) -> Optional[Tuple[int, Set[int]]]:
    """Pick a community and anneal a bisection of it.

    Returns ``(community, part)`` where ``part`` is the side that would
    leave, or ``None`` when the community is a singleton or the bisection
    collapses to one side.
    """
    community = _pick(rng, state.k)
    members = sorted(state.members[community])
    size = len(members)
    if size < 2:
        return None

    graph = state.graph
    adjacency = graph.adjacency
    degrees = graph.degrees
    assignment = state.assignment
    m = graph.m

    in_part = {v: rng.random() < 0.5 for v in members}
    part_size = sum(in_part.values())
    if part_size in (0, size):
        in_part[members[0]] = not in_part[members[0]]
        part_size = sum(in_part.values())

    initial = state.split_aggregates(
        community, {v for v, flag in in_part.items() if flag}
    )
    cut = state.intra_edges - initial.intra_edges
    d_part = initial.degree_split
    d_total = state.degree_sums[community]
    base_intra = state.intra_edges
    base_sq = state.sq_degree_sum - d_total * d_total

    def _score(cut_edges: int, degree_part: int) -> float:
        degree_kept = d_total - degree_part
        sq = base_sq + degree_kept * degree_kept + degree_part * degree_part
        return evaluate(objective, base_intra - cut_edges, sq, m)

    current = _score(cut, d_part)
    nested_temperature = temperature
    for _ in range(steps):
        for _ in range(size):
            v = members[_pick(rng, size)]
            leaving_part = in_part[v]
            if leaving_part and part_size == 1:
                continue
            if not leaving_part and part_size == size - 1:
                continue
            links_part = 0
            links_kept = 0
            for u in adjacency[v]:
                if assignment[u] != community:
                    continue
                if in_part[u]:
                    links_part += 1
                else:
                    links_kept += 1
            if leaving_part:
                new_cut = cut - links_kept + links_part
                new_d_part = d_part - degrees[v]
            else:
                new_cut = cut - links_part + links_kept
                new_d_part = d_part + degrees[v]
            candidate = _score(new_cut, new_d_part)
            if _accept(candidate - current, nested_temperature, rng):
                in_part[v] = not leaving_part
                part_size += -1 if leaving_part else 1
                cut = new_cut
                d_part = new_d_part
                current = candidate
        nested_temperature *= _SPLIT_COOLING

    part = {v for v, flag in in_part.items() if flag}
    if not part or len(part) == size:
        return None
    return community, part


class _Annealer:
    def __init__(self, g: Graph, cfg: AnnealConfig, initial: Partition) -> None:
        self.graph = g
        self.cfg = cfg
        self.objective = cfg.objective
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.state = build_state(g, initial)
        self.current = self.state.value(self.objective)
        self.best_value = self.current
        self.best_assignment = list(self.state.assignment)

    def _record(self) -> bool:
        if self.current > self.best_value:
            self.best_value = self.current
            self.best_assignment = list(self.state.assignment)
            return True
        return False

    def _after_accept(self) -> bool:
        if self.cfg.check_invariants:
            self.state.check_consistency()
        return self._record()

    def individual_sweep(self, temperature: float, moves: int) -> bool:
        improved = False
        state = self.state
        m = self.graph.m
        for _ in range(moves):
            proposal = propose_individual_move(state, self.rng)
            if proposal is None:
                continue
            v, target = proposal
            evaluation = state.move_aggregates(v, target)
            candidate = evaluate(
                self.objective, evaluation.intra_edges, evaluation.sq_degree_sum, m
            )
            if _accept(candidate - self.current, temperature, self.rng):
                state.commit_move(v, target, evaluation)
                self.current = candidate
                improved |= self._after_accept()
        return improved

    def collective_sweep(self, temperature: float, moves: int) -> bool:
        improved = False
        state = self.state
        m = self.graph.m
        for _ in range(moves):
            pair = propose_merge(state, self.rng)
            if pair is not None:
                a, b = pair
                evaluation = state.merge_aggregates(a, b)
                candidate = evaluate(
                    self.objective, evaluation.intra_edges, evaluation.sq_degree_sum, m
                )
                if _accept(candidate - self.current, temperature, self.rng):
                    state.commit_merge(a, b, evaluation)
                    self.current = candidate
                    improved |= self._after_accept()

            split = propose_split(
                state,
                self.rng,
                temperature=temperature,
                objective=self.objective,
                steps=self.cfg.split_temperatures,
            )
            if split is not None:
                community, part = split
                evaluation = state.split_aggregates(community, part)
                candidate = evaluate(
                    self.objective, evaluation.intra_edges, evaluation.sq_degree_sum, m
                )
                if _accept(candidate - self.current, temperature, self.rng):
                    state.commit_split(community, part, evaluation)
                    self.current = candidate
                    improved |= self._after_accept()
        return improved


def anneal(
    g: Graph, cfg: AnnealConfig, initial_partition: Partition | None = None
) -> AnnealResult:
    """Maximize ``cfg.objective`` over partitions of ``g``.

    Deterministic for a given graph and config (seed included).
    """
    started = time.perf_counter()
    cfg = cfg.resolved(g.n)
    assert cfg.initial_temperature is not None and cfg.min_temperature is not None
    annealer = _Annealer(g, cfg, initial_partition or singleton_partition(g))
    individual = cfg.individual_moves(g.n)
    collective = cfg.collective_moves(g.n)

    temperature = cfg.initial_temperature
    trace: List[float] = []
    stagnant = 0
    # Stop once the current state is frozen, not merely once the best stalls.
    while temperature >= cfg.min_temperature and stagnant < cfg.stagnation_limit:
        start_value = annealer.current
        improved = annealer.individual_sweep(temperature, individual)
        improved |= annealer.collective_sweep(temperature, collective)
        settled = abs(annealer.current - start_value) <= cfg.stagnation_tolerance
        stagnant = stagnant + 1 if settled and not improved else 0
        trace.append(annealer.best_value)
        if cfg.check_invariants:
            annealer.state.check_consistency()
        _LOGGER.debug(
            "T=%.3e current=%.6f best=%.6f k=%d",
            temperature,
            annealer.current,
            annealer.best_value,
            annealer.state.k,
        )
        temperature *= cfg.cooling_factor

    best_partition = Partition.from_assignment(annealer.best_assignment)
    best_state = build_state(g, best_partition)
    result = AnnealResult(
        best_partition=best_partition,
        best_value=annealer.best_value,
        objective=cfg.objective,
        objective_trace=trace,
        temperatures_run=len(trace),
        seed_used=cfg.rng_seed,
        modularity=modularity(best_state),
        z_modularity=z_modularity(best_state),
        elapsed_seconds=time.perf_counter() - started,
    )
    _LOGGER.info(
        "Annealing seed=%d objective=%s finished: best=%.6f k=%d after %d temperatures",
        cfg.rng_seed,
        cfg.objective.value,
        result.best_value,
        best_partition.k,
        result.temperatures_run,
    )
    return result


def _anneal_task(task: Tuple[Graph, AnnealConfig]) -> AnnealResult:
    graph, cfg = task
    return anneal(graph, cfg)


def anneal_restarts(
    g: Graph, cfg: AnnealConfig, restarts: int = 1, jobs: int = 1
) -> Tuple[AnnealResult, List[AnnealResult]]:
    """Best of ``restarts`` independent runs with seeds derived from ``cfg``.

    Returns the winner (highest objective, lowest restart index on ties)
    and every run in restart order.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    tasks = [
        (g, cfg.model_copy(update={"rng_seed": derive_seed(cfg.rng_seed, index)}))
        for index in range(restarts)
    ]
    runs = map_ordered(_anneal_task, tasks, jobs)
    best = runs[0]
    for run in runs[1:]:
        if run.best_value > best.best_value:
            best = run
    return best, runs


__all__ = [
    "AnnealConfig",
    "AnnealResult",
    "anneal",
    "anneal_restarts",
    "derive_seed",
    "propose_individual_move",
    "propose_merge",
    "propose_split",
]
