"""Command-line entrypoint: ``python -m app.main <command> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, NoReturn, Optional, Sequence

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from app.models import RunRecord, SweepRow, graph_fingerprint  # noqa: E402
from services import datasets, exports, pipelines, presets, storage  # noqa: E402
from services.analytic_oracle import ToleranceError  # noqa: E402
from services.quality import Objective  # noqa: E402
from services.settings import get_settings  # noqa: E402

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_TOLERANCE = 3


class UsageError(Exception):
    """Raised in place of argparse's own exit so usage errors map to exit 1."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _objective(value: str) -> Objective:
    try:
        return Objective.from_string(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(value: str) -> int:
    number = int(value)
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return number


def _common_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ...")
    parent.add_argument("--record", type=Path, default=None, help="write a RunRecord JSON here")
    return parent


def _schedule_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("annealing schedule")
    group.add_argument("--preset", default=None, help="named schedule from presets.json")
    group.add_argument("--seed", type=int, default=0)
    group.add_argument("--restarts", type=_positive_int, default=None)
    group.add_argument("--jobs", type=_positive_int, default=None)
    group.add_argument("--initial-temperature", type=float, default=None)
    group.add_argument("--cooling-factor", type=float, default=None)
    group.add_argument("--individual-moves", type=float, default=None, dest="individual_moves_per_t")
    group.add_argument("--collective-moves", type=float, default=None, dest="collective_moves_per_t")
    group.add_argument("--min-temperature", type=float, default=None)
    group.add_argument("--stagnation-limit", type=int, default=None)
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _common_parent()
    schedule = _schedule_parent()
    parser = _ArgumentParser(
        prog="zmod",
        description="Community detection with modularity and Z-modularity.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    detect = commands.add_parser(
        "detect", parents=[common, schedule], help="anneal a partition of a graph"
    )
    detect.add_argument("graph", help="edge-list file or dataset:<name>")
    detect.add_argument("--objective", type=_objective, default=Objective.Z_MODULARITY)
    detect.add_argument("--out", type=Path, default=None, help="partition file")
    detect.add_argument("--truth", type=Path, default=None, help="ground-truth partition file")
    detect.add_argument("--csv", type=Path, default=None, help="per-restart CSV summary")
    detect.add_argument("--report", type=Path, default=None, help="Markdown report")

    generate = commands.add_parser(
        "generate", parents=[common], help="write a benchmark network and its divisions"
    )
    generate.add_argument("family", choices=pipelines.FAMILIES)
    generate.add_argument("--p", type=int, default=None, help="clique size (small clique for pairwise)")
    generate.add_argument("--q", type=int, default=None, help="clique count (large clique for pairwise)")
    generate.add_argument("--groups", default=None, help="comma-separated run lengths for ring-grouped")
    generate.add_argument("--n", type=int, default=None)
    generate.add_argument("--l", type=int, default=None)
    generate.add_argument("--p-in", type=float, default=None)
    generate.add_argument("--p-out", type=float, default=None)
    generate.add_argument("--d", type=int, default=None, help="Hanoi disk count")
    generate.add_argument("--seed", type=int, default=0)
    generate.add_argument("--out-prefix", type=Path, required=True)

    evaluate = commands.add_parser(
        "evaluate", parents=[common], help="score a partition of a graph"
    )
    evaluate.add_argument("graph", help="edge-list file or dataset:<name>")
    evaluate.add_argument("partition", type=Path)
    evaluate.add_argument("--truth", type=Path, default=None)

    sweep = commands.add_parser(
        "sweep", parents=[common, schedule], help="NMI against planted partitions over p_out"
    )
    sweep.add_argument("--family", choices=("planted",), default="planted")
    sweep.add_argument("--n", type=_positive_int, required=True)
    sweep.add_argument("--l", type=_positive_int, required=True)
    sweep.add_argument("--p-in", type=float, required=True)
    sweep.add_argument("--p-out-range", required=True, help="a:b:step, inclusive")
    sweep.add_argument("--seeds-per-point", type=_positive_int, default=5)
    sweep.add_argument(
        "--objective",
        type=_objective,
        action="append",
        default=None,
        help="repeatable; default both objectives",
    )
    sweep.add_argument("--out", type=Path, default=None)

    tables = commands.add_parser(
        "tables", parents=[common], help="reproduce the reference quality tables"
    )
    tables.add_argument("--out", type=Path, default=None)

    fetch = commands.add_parser(
        "fetch", parents=[common], help="cache a real-world dataset as edge list + truth"
    )
    fetch.add_argument("dataset", choices=sorted(datasets.DATASETS))
    return parser


# ── helpers ────────────────────────────────────────────────────────────────


def _configure_logging(level: Optional[str]) -> None:
    name = (level or get_settings().log_level).upper()
    numeric = logging.getLevelName(name)
    if not isinstance(numeric, int):
        raise UsageError(f"unknown log level: {name}")
    if not logging.root.handlers:
        logging.basicConfig(
            level=numeric,
            stream=sys.stderr,
            format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        )
    else:
        logging.root.setLevel(numeric)


def _schedule(args: argparse.Namespace, objective: Optional[Objective] = None):
    overrides: Dict[str, Any] = {
        "rng_seed": args.seed,
        "restarts": args.restarts,
        "initial_temperature": args.initial_temperature,
        "cooling_factor": args.cooling_factor,
        "individual_moves_per_t": args.individual_moves_per_t,
        "collective_moves_per_t": args.collective_moves_per_t,
        "min_temperature": args.min_temperature,
        "stagnation_limit": args.stagnation_limit,
    }
    if objective is not None:
        overrides["objective"] = objective
    return presets.resolve_preset(args.preset, overrides)


def _jobs(args: argparse.Namespace) -> int:
    return args.jobs if args.jobs is not None else get_settings().jobs


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")


def _emit_record(args: argparse.Namespace, record: RunRecord) -> None:
    if args.record is not None:
        storage.write_record(args.record, record)
        _LOGGER.info("Run record written to %s", args.record)


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"record", "log_level", "handler"}
    parameters: Dict[str, Any] = {}
    for key, value in sorted(vars(args).items()):
        if key in skip or value is None:
            continue
        if isinstance(value, Objective):
            value = value.value
        elif isinstance(value, list):
            value = [item.value if isinstance(item, Objective) else item for item in value]
        elif isinstance(value, Path):
            value = str(value)
        parameters[key] = value
    return parameters


# ── commands ───────────────────────────────────────────────────────────────


def cmd_detect(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    g, dataset_truth = pipelines.load_graph_source(args.graph)
    truth = storage.read_partition(args.truth, g) if args.truth is not None else dataset_truth
    cfg, restarts = _schedule(args, args.objective)
    outcome = pipelines.detect(g, cfg, restarts=restarts, jobs=_jobs(args), truth=truth)
    best = outcome.best

    if args.out is not None:
        storage.write_partition(args.out, best.best_partition, g)
    if args.csv is not None:
        _write_text(args.csv, exports.render_detection_csv(outcome.restart_rows()))
    if args.report is not None:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_bytes(
            exports.render_detection_report(outcome.summary(), outcome.restart_rows())
        )

    line = f"communities={best.best_partition.k} Q={best.modularity:.4f} Z={best.z_modularity:.4f}"
    if outcome.nmi is not None:
        line += f" NMI={outcome.nmi:.4f}"
    print(line)

    _emit_record(
        args,
        RunRecord(
            command="detect",
            parameters=_parameters(args),
            seed=cfg.rng_seed,
            objective=cfg.objective.value,
            modularity=best.modularity,
            z_modularity=best.z_modularity,
            communities=best.best_partition.k,
            nmi=outcome.nmi,
            temperatures_run=best.temperatures_run,
            restart_values=[run.best_value for run in outcome.runs],
            graph_sha256=graph_fingerprint(g),
            vertices=g.n,
            edges=g.m,
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    return EXIT_OK


def _require(args: argparse.Namespace, family: str, *names: str) -> Dict[str, Any]:
    missing = [name for name in names if getattr(args, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise UsageError(f"generate {family} needs {flags}")
    return {name: getattr(args, name) for name in names}


def cmd_generate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    family = args.family
    if family == "ring":
        params = _require(args, family, "p", "q")
    elif family == "ring-grouped":
        params = _require(args, family, "p", "q", "groups")
        try:
            params["groups"] = [int(size) for size in params["groups"].split(",")]
        except ValueError as exc:
            raise UsageError(f"--groups must be comma-separated integers: {exc}") from exc
    elif family == "pairwise":
        params = _require(args, family, "p", "q")
    elif family == "planted":
        params = _require(args, family, "n", "l", "p_in", "p_out")
        params["seed"] = args.seed
    else:
        params = _require(args, family, "d")

    lg = pipelines.generate(family, params)
    written = storage.write_labeled_graph(args.out_prefix, lg)
    print(f"family={family} n={lg.graph.n} m={lg.graph.m} files={len(written)}")
    _emit_record(
        args,
        RunRecord(
            command="generate",
            parameters=_parameters(args),
            seed=args.seed if family == "planted" else None,
            graph_sha256=graph_fingerprint(lg.graph),
            vertices=lg.graph.n,
            edges=lg.graph.m,
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    g, dataset_truth = pipelines.load_graph_source(args.graph)
    partition = storage.read_partition(args.partition, g)
    truth = storage.read_partition(args.truth, g) if args.truth is not None else dataset_truth
    result = pipelines.evaluate(g, partition, truth)
    line = (
        f"communities={result.communities} Q={result.modularity:.4f} "
        f"Z={result.z_modularity:.4f} p={result.null_probability:.4f}"
    )
    if result.nmi is not None:
        line += f" NMI={result.nmi:.4f}"
    print(line)
    _emit_record(
        args,
        RunRecord(
            command="evaluate",
            parameters=_parameters(args),
            modularity=result.modularity,
            z_modularity=result.z_modularity,
            communities=result.communities,
            nmi=result.nmi,
            graph_sha256=graph_fingerprint(g),
            vertices=g.n,
            edges=g.m,
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    objectives: List[Objective] = args.objective or [
        Objective.MODULARITY,
        Objective.Z_MODULARITY,
    ]
    cfg, _ = _schedule(args)
    points = pipelines.sweep(
        n=args.n,
        l=args.l,
        p_in=args.p_in,
        p_out_values=pipelines.parse_range(args.p_out_range),
        seeds_per_point=args.seeds_per_point,
        objectives=objectives,
        cfg=cfg,
        seed=args.seed,
        jobs=_jobs(args),
    )
    rows = [SweepRow.model_validate(point.as_row()) for point in points]
    text = exports.render_sweep_csv(row.model_dump() for row in rows)
    if args.out is not None:
        _write_text(args.out, text)
    sys.stdout.write(text)
    _emit_record(
        args,
        RunRecord(
            command="sweep",
            parameters=_parameters(args),
            seed=args.seed,
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    return EXIT_OK


def cmd_tables(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    rows, ok = pipelines.tables()
    text = exports.render_tables_csv(rows)
    if args.out is not None:
        _write_text(args.out, text)
    sys.stdout.write(text)
    for row in rows:
        for cell in row.cells:
            if cell.note:
                _LOGGER.info(
                    "%s (%d, %d) %s: %s", row.table, row.p, row.q, cell.column, cell.note
                )
    _emit_record(
        args,
        RunRecord(
            command="tables",
            parameters=_parameters(args),
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    if not ok:
        failed = [f"{row.table}({row.p},{row.q})" for row in rows if not row.ok]
        raise ToleranceError(f"rows outside tolerance: {', '.join(failed)}")
    return EXIT_OK


def cmd_fetch(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    lg = datasets.load_dataset(args.dataset)
    written = storage.write_labeled_graph(storage.data_dir() / args.dataset, lg)
    for path in written:
        print(path)
    _emit_record(
        args,
        RunRecord(
            command="fetch",
            parameters=_parameters(args),
            graph_sha256=graph_fingerprint(lg.graph),
            vertices=lg.graph.n,
            edges=lg.graph.m,
            wall_time_seconds=time.perf_counter() - started,
        ),
    )
    return EXIT_OK


_COMMANDS = {
    "detect": cmd_detect,
    "generate": cmd_generate,
    "evaluate": cmd_evaluate,
    "sweep": cmd_sweep,
    "tables": cmd_tables,
    "fetch": cmd_fetch,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _configure_logging(args.log_level)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except ToleranceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
