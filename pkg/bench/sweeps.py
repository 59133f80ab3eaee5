"""
Parameter sweeps built on run_experiment.

Current Implementation:
- Phase diagrams over (delta = N/n, k) with optional per-method time budgets
- Stacked phase diagrams, one row per degree
- Noise-level sweep (true noise equals the configured epsilon)
- Epsilon-as-tuning sweep (fixed true noise, varying configured epsilon)
- Single-parameter timing sweeps over n, d, N or k
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set

import numpy as np

from bench.instances import ExperimentSpec
from bench.runner import ExperimentResult, MethodSummary, ProgressCallback, run_experiment

logger = logging.getLogger(__name__)

SWEEPABLE_FIELDS = ("n", "d", "N", "k")


@dataclass
class PhaseCell:
    method: str
    n: int
    d: int
    delta: float
    k: int
    trials: int
    success_rate: Optional[float]
    timed_out: bool = False


@dataclass
class SweepResult:
    rows: List[MethodSummary]
    interrupted: bool = False


@dataclass
class PhaseDiagram:
    cells: List[PhaseCell]
    interrupted: bool = False


def derive(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    """Copy of spec with changes applied and validated."""
    return ExperimentSpec.model_validate({**spec.model_dump(), **changes})


def _measurements(n: int, delta: float) -> int:
    return max(1, int(round(delta * n)))


def _measured_time(result: ExperimentResult, method: str) -> float:
    """Mean wall time per solve, whether or not the summary reports it."""
    times = [r.wall_time_seconds for r in result.records if r.method == method]
    return float(np.mean(times)) if times else 0.0


def phase_diagram(
    spec: ExperimentSpec,
    k_values: Iterable[int],
    deltas: Iterable[float],
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> PhaseDiagram:
    """Success fraction for every (delta, k, method) cell.

    With spec.time_budget_s set, a method whose mean solve time in a cell exceeds the budget
    is marked timed-out for that cell and for every larger k at the same delta.
    """
    k_values = sorted(int(k) for k in k_values)
    deltas = [float(x) for x in deltas]
    if any(delta < 1 for delta in deltas):
        raise ValueError("phase diagrams are defined for delta = N/n >= 1")
    if any(k < 0 or k > spec.n for k in k_values):
        raise ValueError(f"k values must lie in [0, {spec.n}]")

    cells: List[PhaseCell] = []
    for delta in deltas:
        N = _measurements(spec.n, delta)
        skipped: Set[str] = set()
        for k in k_values:
            active = [m for m in spec.methods if m not in skipped]
            for method in skipped:
                cells.append(PhaseCell(method, spec.n, spec.d, delta, k, spec.trials, None, True))
            if not active:
                continue
            cell_spec = derive(
                spec,
                N=N,
                k=k,
                methods=active,
                experiment_id=f"{spec.experiment_id}-delta{delta:g}-k{k}",
            )
            result = run_experiment(cell_spec, threads=threads, progress=progress)
            for row in result.summary():
                over = (
                    spec.time_budget_s is not None
                    and _measured_time(result, row.method) > spec.time_budget_s
                )
                if over:
                    logger.info(
                        "⚠️ %s exceeded the %.3gs budget at delta=%g k=%d; later cells skipped",
                        row.method,
                        spec.time_budget_s,
                        delta,
                        k,
                    )
                    skipped.add(row.method)
                cells.append(
                    PhaseCell(
                        row.method,
                        spec.n,
                        spec.d,
                        delta,
                        k,
                        result.completed_trials,
                        None if over else row.success_rate,
                        over,
                    )
                )
            if result.interrupted:
                return PhaseDiagram(cells, interrupted=True)
    _log_shape_checks(cells)
    return PhaseDiagram(cells)


def phase_diagram_rows(
    spec: ExperimentSpec,
    degrees: Iterable[int],
    k_values: Iterable[int],
    deltas: Iterable[float],
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> PhaseDiagram:
    """One phase diagram per degree, concatenated in the order given."""
    k_values = list(k_values)
    deltas = list(deltas)
    cells: List[PhaseCell] = []
    for d in degrees:
        row_spec = derive(spec, d=int(d), experiment_id=f"{spec.experiment_id}-d{int(d)}")
        diagram = phase_diagram(row_spec, k_values, deltas, threads, progress)
        cells.extend(diagram.cells)
        if diagram.interrupted:
            return PhaseDiagram(cells, interrupted=True)
    return PhaseDiagram(cells)


def _log_shape_checks(cells: Sequence[PhaseCell]) -> None:
    """Soft checks on the diagram shape; violations are logged, never raised."""
    by_key: Dict[tuple, Dict[int, float]] = {}
    for cell in cells:
        if cell.success_rate is not None:
            by_key.setdefault((cell.method, cell.delta), {})[cell.k] = cell.success_rate
    for (method, delta), curve in by_key.items():
        ks = sorted(curve)
        for a, b in zip(ks, ks[1:]):
            if curve[b] > curve[a]:
                logger.info(
                    "Success of %s at delta=%g rose from %.2f (k=%d) to %.2f (k=%d)",
                    method,
                    delta,
                    curve[a],
                    a,
                    curve[b],
                    b,
                )
    aga = sorted((delta, curve) for (method, delta), curve in by_key.items() if method == "aga")
    for (d_lo, lo), (d_hi, hi) in zip(aga, aga[1:]):
        for k in sorted(set(lo) & set(hi)):
            if hi[k] < lo[k]:
                logger.info(
                    "AGA success at k=%d dropped from %.2f (delta=%g) to %.2f (delta=%g)",
                    k,
                    lo[k],
                    d_lo,
                    hi[k],
                    d_hi,
                )


def _sweep(specs: Sequence[ExperimentSpec], threads, progress) -> SweepResult:
    rows: List[MethodSummary] = []
    for spec in specs:
        result = run_experiment(spec, threads=threads, progress=progress)
        rows.extend(result.summary())
        if result.interrupted:
            return SweepResult(rows, interrupted=True)
    return SweepResult(rows)


def noise_sweep(
    spec: ExperimentSpec,
    levels: Iterable[float],
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> SweepResult:
    specs = [
        derive(
            spec,
            noise_epsilon=float(eps),
            solver_epsilon=None,
            experiment_id=f"{spec.experiment_id}-eps{float(eps):g}",
        )
        for eps in levels
    ]
    return _sweep(specs, threads, progress)


def epsilon_tuning_sweep(
    spec: ExperimentSpec,
    configured: Iterable[float],
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> SweepResult:
    """Fixed true noise spec.noise_epsilon; the solvers see each configured epsilon in turn."""
    specs = [
        derive(
            spec,
            solver_epsilon=float(eps),
            experiment_id=f"{spec.experiment_id}-cfg{float(eps):g}",
        )
        for eps in configured
    ]
    return _sweep(specs, threads, progress)


def parameter_sweep(
    spec: ExperimentSpec,
    field: str,
    values: Iterable[int],
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> SweepResult:
    if field not in SWEEPABLE_FIELDS:
        raise ValueError(f"cannot sweep '{field}'; expected one of {', '.join(SWEEPABLE_FIELDS)}")
    specs = [
        derive(spec, **{field: int(v), "experiment_id": f"{spec.experiment_id}-{field}{int(v)}"})
        for v in values
    ]
    return _sweep(specs, threads, progress)


def error_noise_correlation(rows: Iterable[MethodSummary], method: str) -> float:
    """Pearson correlation between noise level and mean relative error for one method."""
    points = [
        (r.noise_epsilon, r.mean_rel_error)
        for r in rows
        if r.method == method and not math.isnan(r.mean_rel_error)
    ]
    if len(points) < 2:
        return math.nan
    eps, err = np.asarray(points, dtype=float).T
    if np.ptp(eps) == 0 or np.ptp(err) == 0:
        return math.nan
    return float(np.corrcoef(eps, err)[0, 1])
