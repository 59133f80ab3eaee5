from conic.solver import (
    ConicProblem,
    Constraint,
    ConstraintFactor,
    Group,
    SolverOptions,
    SolverStatus,
    factor_constraint,
    factor_for,
    project_constraint,
    prox_group,
    solve,
    write_trace,
)

__all__ = [
    "ConicProblem",
    "Constraint",
    "ConstraintFactor",
    "Group",
    "SolverOptions",
    "SolverStatus",
    "factor_constraint",
    "factor_for",
    "project_constraint",
    "prox_group",
    "solve",
    "write_trace",
]
