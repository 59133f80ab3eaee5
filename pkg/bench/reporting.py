import csv
import logging
import math
import os
import sys
from typing import IO, Iterable, List, Optional

from bench.runner import MethodSummary
from bench.sweeps import PhaseCell

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "experiment_id",
    "method",
    "n",
    "d",
    "N",
    "k",
    "trials",
    "noise_epsilon",
    "success_rate",
    "support_rate",
    "mean_rel_error",
    "mean_time_s",
]
PHASE_COLUMNS = ["method", "n", "d", "delta", "k", "trials", "success_rate"]


def _num(value: Optional[float]) -> str:
    if value is None:
        return "timeout"
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return format(value, ".6g")


def summary_row(row: MethodSummary) -> dict:
    return {
        "experiment_id": row.experiment_id,
        "method": row.method,
        "n": row.n,
        "d": row.d,
        "N": row.N,
        "k": row.k,
        "trials": row.trials,
        "noise_epsilon": _num(row.noise_epsilon),
        "success_rate": _num(row.success_rate),
        "support_rate": _num(row.support_rate),
        "mean_rel_error": _num(row.mean_rel_error),
        "mean_time_s": _num(row.mean_time_s),
    }


def phase_row(cell: PhaseCell) -> dict:
    return {
        "method": cell.method,
        "n": cell.n,
        "d": cell.d,
        "delta": _num(cell.delta),
        "k": cell.k,
        "trials": cell.trials,
        "success_rate": _num(cell.success_rate),
    }


def _write(rows: List[dict], columns: List[str], path: Optional[str]) -> None:
    if path in (None, "-"):
        _write_stream(rows, columns, sys.stdout)
        return
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        _write_stream(rows, columns, f)
    logger.info("✅ Wrote %d rows to %s", len(rows), path)


def _write_stream(rows: List[dict], columns: List[str], stream: IO[str]) -> None:
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def write_summary_csv(rows: Iterable[MethodSummary], path: Optional[str] = None) -> None:
    """Write summary rows to path, or stdout for None / "-"."""
    _write([summary_row(r) for r in rows], SUMMARY_COLUMNS, path)


def write_phase_csv(cells: Iterable[PhaseCell], path: Optional[str] = None) -> None:
    _write([phase_row(c) for c in cells], PHASE_COLUMNS, path)
