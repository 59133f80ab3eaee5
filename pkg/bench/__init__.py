"""
Monte Carlo benchmarks.

This module contains:
- Seeded random instance generation (noise, pure-nonlinear and phase retrieval variants)
- Experiment execution over a worker pool with per-method summaries
- Phase diagrams, noise sweeps, epsilon tuning sweeps and timing sweeps
- CSV writers with fixed column orders
"""

from bench.instances import ExperimentSpec, gaussian, generate_instance, trial_generator
from bench.reporting import (
    PHASE_COLUMNS,
    SUMMARY_COLUMNS,
    summary_row,
    write_phase_csv,
    write_summary_csv,
)
from bench.runner import (
    ExperimentResult,
    MethodSummary,
    TrialRecord,
    relative_error,
    run_experiment,
    run_trial,
    score,
    summarize,
    support_matches,
)
from bench.sweeps import (
    PhaseCell,
    PhaseDiagram,
    SweepResult,
    derive,
    epsilon_tuning_sweep,
    error_noise_correlation,
    noise_sweep,
    parameter_sweep,
    phase_diagram,
    phase_diagram_rows,
)

__all__ = [
    "PHASE_COLUMNS",
    "SUMMARY_COLUMNS",
    "ExperimentResult",
    "ExperimentSpec",
    "MethodSummary",
    "PhaseCell",
    "PhaseDiagram",
    "SweepResult",
    "TrialRecord",
    "derive",
    "epsilon_tuning_sweep",
    "error_noise_correlation",
    "gaussian",
    "generate_instance",
    "noise_sweep",
    "parameter_sweep",
    "phase_diagram",
    "phase_diagram_rows",
    "relative_error",
    "run_experiment",
    "run_trial",
    "score",
    "summarize",
    "summary_row",
    "support_matches",
    "trial_generator",
    "write_phase_csv",
    "write_summary_csv",
]
