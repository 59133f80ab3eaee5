"""
Monte Carlo experiment execution.

Every configured method runs on every trial instance. A failing solve is recorded on its
TrialRecord and counted as a failure; it never stops the sweep. Records are sorted by trial
index before aggregation, so summaries do not depend on the worker count.
"""

import logging
import math
from concurrent.futures import as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from bench.instances import ExperimentSpec, generate_instance
from common.dispatch import MethodOptions, run_method
from services import services

logger = logging.getLogger(__name__)

# Estimates with |x_j| below this count as zero for support recovery.
SUPPORT_ZERO = 1e-6

ProgressCallback = Callable[[int, int], None]


@dataclass
class TrialRecord:
    trial_index: int
    method: str
    success: bool
    support_success: bool
    relative_error: float
    wall_time_seconds: float
    solver_iterations: int
    verified: bool = False
    timed_out: bool = False
    error: Optional[str] = None


@dataclass
class MethodSummary:
    experiment_id: str
    method: str
    n: int
    d: int
    N: int
    k: int
    trials: int
    noise_epsilon: float
    success_rate: float
    support_rate: float
    mean_rel_error: float
    mean_time_s: float
    timed_out: bool = False


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    records: List[TrialRecord] = field(default_factory=list)
    completed_trials: int = 0
    interrupted: bool = False

    def summary(self) -> List[MethodSummary]:
        return summarize(self.spec, self.records, self.completed_trials)


def method_options(spec: ExperimentSpec) -> MethodOptions:
    return MethodOptions(
        noise_epsilon=spec.configured_epsilon,
        max_support=spec.max_support,
    )


def relative_error(x_hat: np.ndarray, x0: np.ndarray, sign_invariant: bool = False) -> float:
    """||x_hat - x0|| / ||x0||, minimized over +-x0 when the sign is not identifiable.

    Falls back to the absolute error when x0 = 0.
    """
    err = float(np.linalg.norm(x_hat - x0))
    if sign_invariant:
        err = min(err, float(np.linalg.norm(x_hat + x0)))
    scale = float(np.linalg.norm(x0))
    return err / scale if scale > 0 else err


def support_matches(x_hat: np.ndarray, x0: np.ndarray) -> bool:
    return bool(np.array_equal(np.abs(x_hat) >= SUPPORT_ZERO, x0 != 0))


def score(spec: ExperimentSpec, x_hat: np.ndarray, x0: np.ndarray):
    """(success, support_success, relative_error) for one estimate."""
    rel = relative_error(x_hat, x0, spec.sign_invariant)
    support_ok = support_matches(x_hat, x0)
    if spec.noise_epsilon > 0:
        return support_ok, support_ok, rel
    abs_err = float(np.linalg.norm(x_hat - x0))
    if spec.sign_invariant:
        abs_err = min(abs_err, float(np.linalg.norm(x_hat + x0)))
    return abs_err <= spec.success_tol, support_ok, rel


def run_trial(spec: ExperimentSpec, trial_index: int) -> List[TrialRecord]:
    system, x0, _ = generate_instance(spec, trial_index)
    options = method_options(spec)
    records: List[TrialRecord] = []
    for method in spec.methods:
        try:
            outcome = run_method(method, system, options)
        except Exception as e:
            logger.warning("⚠️ Trial %d, %s failed: %s", trial_index, method, e)
            records.append(
                TrialRecord(
                    trial_index=trial_index,
                    method=method,
                    success=False,
                    support_success=False,
                    relative_error=math.nan,
                    wall_time_seconds=0.0,
                    solver_iterations=0,
                    error=f"{type(e).__name__}: {e}",
                )
            )
            continue
        success, support_ok, rel = score(spec, outcome.x_hat, x0)
        over_budget = spec.time_budget_s is not None and outcome.wall_time_s > spec.time_budget_s
        records.append(
            TrialRecord(
                trial_index=trial_index,
                method=method,
                success=success,
                support_success=support_ok,
                relative_error=rel,
                wall_time_seconds=outcome.wall_time_s,
                solver_iterations=outcome.iterations,
                verified=outcome.verified,
                timed_out=over_budget,
            )
        )
    return records


def summarize(
    spec: ExperimentSpec, records: List[TrialRecord], trials: Optional[int] = None
) -> List[MethodSummary]:
    trials = spec.trials if trials is None else trials
    rows: List[MethodSummary] = []
    for method in spec.methods:
        mine = sorted((r for r in records if r.method == method), key=lambda r: r.trial_index)
        count = len(mine)
        errors = [r.relative_error for r in mine if not math.isnan(r.relative_error)]
        times = [r.wall_time_seconds for r in mine]
        rows.append(
            MethodSummary(
                experiment_id=spec.experiment_id,
                method=method,
                n=spec.n,
                d=spec.d,
                N=spec.N,
                k=spec.k,
                trials=trials,
                noise_epsilon=spec.noise_epsilon,
                success_rate=sum(r.success for r in mine) / count if count else math.nan,
                support_rate=sum(r.support_success for r in mine) / count if count else math.nan,
                mean_rel_error=float(np.mean(errors)) if errors else math.nan,
                mean_time_s=float(np.mean(times)) if (times and spec.record_timing) else 0.0,
                timed_out=any(r.timed_out for r in mine),
            )
        )
    return rows


def run_experiment(
    spec: ExperimentSpec,
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
) -> ExperimentResult:
    """Run every method on spec.trials seeded instances.

    Ctrl-C stops the sweep and returns the trials completed so far with interrupted=True.
    """
    executor = services.get_executor(threads)
    done: Dict[int, List[TrialRecord]] = {}
    interrupted = False
    logger.info(
        "🚀 Experiment %s: n=%d d=%d N=%d k=%d trials=%d methods=%s",
        spec.experiment_id,
        spec.n,
        spec.d,
        spec.N,
        spec.k,
        spec.trials,
        ",".join(spec.methods),
    )

    futures = {}
    try:
        if executor is None:
            for t in range(spec.trials):
                done[t] = run_trial(spec, t)
                if progress:
                    progress(len(done), spec.trials)
        else:
            futures = {executor.submit(run_trial, spec, t): t for t in range(spec.trials)}
            for future in as_completed(futures):
                done[futures[future]] = future.result()
                if progress:
                    progress(len(done), spec.trials)
    except KeyboardInterrupt:
        interrupted = True
        for future in futures:
            future.cancel()
        logger.warning(
            "⚠️ Experiment %s interrupted after %d of %d trials",
            spec.experiment_id,
            len(done),
            spec.trials,
        )

    records = [r for t in sorted(done) for r in done[t]]
    result = ExperimentResult(
        spec=spec, records=records, completed_trials=len(done), interrupted=interrupted
    )
    for row in result.summary():
        logger.info(
            "✅ %s/%s: success=%.3f support=%.3f rel_err=%.3g",
            spec.experiment_id,
            row.method,
            row.success_rate,
            row.support_rate,
            row.mean_rel_error,
        )
    return result
