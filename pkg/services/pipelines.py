"""Workflows bridging the CLI with the optimizer, generators and oracles."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from services import analytic_oracle, datasets, generators, storage
from services.analytic_oracle import TableRow
from services.generators import LabeledGraph
from services.graph_core import Graph, Partition
from services.metrics import nmi
from services.optimizer import AnnealConfig, AnnealResult, anneal, anneal_restarts, derive_seed
from services.parallel import map_ordered
from services.quality import Objective, build_state, modularity, null_probability, z_modularity

_LOGGER = logging.getLogger(__name__)

DATASET_PREFIX = "dataset:"
FAMILIES = ("ring", "ring-grouped", "pairwise", "planted", "hanoi")


# ── inputs ─────────────────────────────────────────────────────────────────


def load_graph_source(source: str) -> Tuple[Graph, Optional[Partition]]:
    """Edge-list path, or ``dataset:<name>`` for a bundled/cached network."""
    if source.startswith(DATASET_PREFIX):
        lg = datasets.load_dataset(source[len(DATASET_PREFIX) :])
        return lg.graph, lg.ground_truth
    return storage.read_graph(source), None


# ── detect / evaluate ──────────────────────────────────────────────────────


@dataclass
class DetectionOutcome:
    best: AnnealResult
    runs: List[AnnealResult]
    nmi: Optional[float] = None

    def restart_rows(self) -> List[Dict[str, Any]]:
        return [
            {
                "restart": index,
                "seed": run.seed_used,
                "objective": run.objective.value,
                "best_value": run.best_value,
                "modularity": run.modularity,
                "z_modularity": run.z_modularity,
                "communities": run.best_partition.k,
                "temperatures_run": run.temperatures_run,
            }
            for index, run in enumerate(self.runs)
        ]

    def summary(self) -> Dict[str, Any]:
        return {
            "objective": self.best.objective.value,
            "communities": self.best.best_partition.k,
            "modularity": self.best.modularity,
            "z_modularity": self.best.z_modularity,
            "nmi": self.nmi,
        }


def detect(
    g: Graph,
    cfg: AnnealConfig,
    restarts: int = 1,
    jobs: int = 1,
    truth: Optional[Partition] = None,
) -> DetectionOutcome:
    best, runs = anneal_restarts(g, cfg, restarts=restarts, jobs=jobs)
    score = nmi(best.best_partition, truth) if truth is not None else None
    _LOGGER.info(
        "Detected %d communities: Q=%.4f Z=%.4f",
        best.best_partition.k,
        best.modularity,
        best.z_modularity,
    )
    return DetectionOutcome(best=best, runs=runs, nmi=score)


@dataclass(frozen=True)
class Evaluation:
    modularity: float
    z_modularity: float
    communities: int
    null_probability: float
    nmi: Optional[float] = None


def evaluate(g: Graph, p: Partition, truth: Optional[Partition] = None) -> Evaluation:
    state = build_state(g, p)
    return Evaluation(
        modularity=modularity(state),
        z_modularity=z_modularity(state),
        communities=state.k,
        null_probability=null_probability(state),
        nmi=nmi(p, truth) if truth is not None else None,
    )


# ── generate ───────────────────────────────────────────────────────────────


def generate(family: str, params: Dict[str, Any]) -> LabeledGraph:
    if family == "ring":
        return generators.ring_of_cliques(int(params["p"]), int(params["q"]))
    if family == "ring-grouped":
        lg = generators.ring_of_cliques(int(params["p"]), int(params["q"]))
        groups = [int(size) for size in params["groups"]]
        grouped = generators.ring_grouped_division(lg, groups)
        return LabeledGraph(
            family=lg.family,
            graph=lg.graph,
            ground_truth=lg.ground_truth,
            named_divisions={**lg.named_divisions, "grouped": grouped},
            params={**lg.params, "groups": groups},
        )
    if family == "pairwise":
        return generators.two_pairwise_cliques(int(params["p"]), int(params["q"]))
    if family == "planted":
        return generators.planted_partition(
            int(params["n"]),
            int(params["l"]),
            float(params["p_in"]),
            float(params["p_out"]),
            int(params["seed"]),
        )
    if family == "hanoi":
        return generators.hanoi_graph(int(params["d"]))
    raise ValueError(f"unknown family: {family} (known: {', '.join(FAMILIES)})")


# ── sweep ──────────────────────────────────────────────────────────────────


def parse_range(spec: str) -> List[float]:
    """``a:b:step`` → ``[a, a+step, …]`` up to ``b`` inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"range must look like a:b:step, got '{spec}'")
    start, stop, step = (float(part) for part in parts)
    if step <= 0:
        raise ValueError("range step must be positive")
    if stop < start:
        raise ValueError("range end precedes its start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + index * step, 10) for index in range(count)]


@dataclass(frozen=True)
class SweepTask:
    n: int
    l: int  # noqa: E741
    p_in: float
    p_out: float
    graph_seed: int
    cfg: AnnealConfig


def _sweep_task(task: SweepTask) -> float:
    lg = generators.planted_partition(task.n, task.l, task.p_in, task.p_out, task.graph_seed)
    result = anneal(lg.graph, task.cfg)
    assert lg.ground_truth is not None
    return nmi(result.best_partition, lg.ground_truth)


@dataclass
class SweepPoint:
    p_out: float
    objective: Objective
    scores: List[float] = field(default_factory=list)

    def as_row(self) -> Dict[str, Any]:
        values = np.asarray(self.scores, dtype=float)
        return {
            "p_out": self.p_out,
            "objective": self.objective.value,
            "mean_nmi": float(values.mean()),
            "std_nmi": float(values.std()),
            "runs": int(values.size),
        }


def sweep(
    n: int,
    l: int,  # noqa: E741
    p_in: float,
    p_out_values: Sequence[float],
    seeds_per_point: int,
    objectives: Sequence[Objective],
    cfg: AnnealConfig,
    seed: int = 0,
    jobs: int = 1,
) -> List[SweepPoint]:
    """NMI of annealed partitions against the planted truth over a ``p_out`` grid.

    Every objective sees the same ``seeds_per_point`` graphs at each point.
    """
    if seeds_per_point < 1:
        raise ValueError("seeds per point must be at least 1")
    if not objectives:
        raise ValueError("at least one objective is required")
    for p_out in p_out_values:
        if not 0.0 <= p_out < p_in <= 1.0:
            raise ValueError(f"need 0 <= p_out < p_in <= 1, got p_out={p_out}")

    points: List[SweepPoint] = []
    tasks: List[SweepTask] = []
    for point_index, p_out in enumerate(p_out_values):
        for objective in objectives:
            points.append(SweepPoint(p_out=p_out, objective=objective))
            for replica in range(seeds_per_point):
                run_cfg = cfg.model_copy(
                    update={
                        "objective": objective,
                        "rng_seed": derive_seed(seed, point_index, replica, 1),
                    }
                )
                tasks.append(
                    SweepTask(n, l, p_in, p_out, derive_seed(seed, point_index, replica), run_cfg)
                )
    _LOGGER.info("Sweep: %d points, %d annealing runs", len(points), len(tasks))
    scores = map_ordered(_sweep_task, tasks, jobs)
    for index, point in enumerate(points):
        start = index * seeds_per_point
        point.scores = scores[start : start + seeds_per_point]
    return points


# ── tables ─────────────────────────────────────────────────────────────────


def tables() -> Tuple[List[TableRow], bool]:
    ring_rows, pairwise_rows = analytic_oracle.reproduce_tables()
    rows = ring_rows + pairwise_rows
    return rows, all(row.ok for row in rows)
