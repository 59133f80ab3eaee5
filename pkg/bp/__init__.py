from bp.drivers import (
    BpConfig,
    BpMethod,
    SolveResult,
    run_bp,
    solve_group,
    solve_ir_group,
    solve_l1,
    solve_reweighted_l1,
    solve_selective,
)

__all__ = [
    "BpConfig",
    "BpMethod",
    "SolveResult",
    "run_bp",
    "solve_group",
    "solve_ir_group",
    "solve_l1",
    "solve_reweighted_l1",
    "solve_selective",
]
