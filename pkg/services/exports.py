"""CSV and Markdown renderers for command outputs."""

from __future__ import annotations

import csv
import io
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional, Sequence

from services.analytic_oracle import TableRow

FLOAT_DIGITS = 6

TABLE_COLUMNS = ("table", "n", "m", "p", "q", "q_1", "q_2", "z_1", "z_2", "status")
SWEEP_COLUMNS = ("p_out", "objective", "mean_nmi", "std_nmi", "runs")
DETECTION_COLUMNS = (
    "restart",
    "seed",
    "objective",
    "best_value",
    "modularity",
    "z_modularity",
    "communities",
    "temperatures_run",
)


def _cell(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.{FLOAT_DIGITS}f}"
    return str(value)


def render_csv(columns: Sequence[str], rows: Iterable[Mapping[str, object]]) -> str:
    """Header row plus one line per mapping; floats use fixed precision."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[column]) for column in columns])
    return buffer.getvalue()


def render_tables_csv(rows: Iterable[TableRow]) -> str:
    def _records():
        for row in rows:
            record = {"table": row.table, "n": row.n, "m": row.m, "p": row.p, "q": row.q}
            for cell in row.cells:
                record[cell.column] = cell.computed
            record["status"] = "ok" if row.ok else "FAIL"
            yield record

    return render_csv(TABLE_COLUMNS, _records())


def render_sweep_csv(rows: Iterable[Mapping[str, object]]) -> str:
    return render_csv(SWEEP_COLUMNS, rows)


def render_detection_csv(rows: Iterable[Mapping[str, object]]) -> str:
    return render_csv(DETECTION_COLUMNS, rows)


def render_markdown(
    title: str, body: str, generated_at: Optional[datetime] = None
) -> bytes:
    stamp = (generated_at or datetime.now(timezone.utc)).isoformat()
    content = f"# {title}\n\n{body}\n\n_Generated {stamp}_\n"
    return content.encode("utf-8")


def render_detection_report(
    summary: Mapping[str, object],
    restarts: Iterable[Mapping[str, object]],
    generated_at: Optional[datetime] = None,
) -> bytes:
    """Markdown summary of a detection run: headline values and a restart table."""
    lines = [
        f"- objective: {summary['objective']}",
        f"- communities: {summary['communities']}",
        f"- Q: {_cell(float(summary['modularity']))}",
        f"- Z: {_cell(float(summary['z_modularity']))}",
    ]
    if summary.get("nmi") is not None:
        lines.append(f"- NMI vs truth: {_cell(float(summary['nmi']))}")
    lines += [
        "",
        "| restart | seed | best | Q | Z | k |",
        "|---|---|---|---|---|---|",
    ]
    for row in restarts:
        lines.append(
            "| {restart} | {seed} | {best} | {q} | {z} | {k} |".format(
                restart=row["restart"],
                seed=row["seed"],
                best=_cell(float(row["best_value"])),
                q=_cell(float(row["modularity"])),
                z=_cell(float(row["z_modularity"])),
                k=row["communities"],
            )
        )
    return render_markdown("Community detection", "\n".join(lines), generated_at)
