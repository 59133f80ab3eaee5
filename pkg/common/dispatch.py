"""
Method registry shared by the CLI, the HTTP router and the bench.

Every registered method maps a PolynomialSystem and a MethodOptions to a MethodOutcome, so
callers never branch on whether the estimate came from a convex relaxation or a greedy search.

Epsilon conventions:
- noise_epsilon bounds the residual norm ||A phi + b - y||_2 (basis pursuit ball radius)
- greedy_epsilon thresholds the SQUARED residual; when unset it defaults to noise_epsilon**2
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from bp.drivers import BpConfig, BpMethod, SolveResult, run_bp
from common.errors import UnknownMethodError
from config import settings
from conic.solver import SolverOptions, SolverStatus
from extract.extraction import ExtractionReport
from greedy.search import GreedyConfig, GreedyResult, aga, ega
from poly.system import PolynomialSystem

logger = logging.getLogger(__name__)

METHODS = ("l1", "rl1", "l1l2", "irl1l2", "sl1l2", "aga", "ega")
GREEDY_METHODS = ("aga", "ega")


class MethodOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    nonneg: bool = True
    noise_epsilon: float = Field(default=0.0, ge=0.0)
    greedy_epsilon: Optional[float] = Field(default=None, ge=0.0)
    max_support: Optional[int] = Field(default=None, ge=0)
    enumerate_all: bool = False
    reweight_iterations: int = Field(default_factory=lambda: settings.REWEIGHT_ITERATIONS, ge=1)
    reweight_eps: float = Field(default_factory=lambda: settings.REWEIGHT_EPS, gt=0.0)
    verify_tol: float = Field(default_factory=lambda: settings.VERIFY_TOL, gt=0.0)
    solver: SolverOptions = Field(default_factory=SolverOptions)

    @property
    def squared_threshold(self) -> float:
        if self.greedy_epsilon is not None:
            return self.greedy_epsilon
        return self.noise_epsilon**2


@dataclass
class MethodOutcome:
    method: str
    x_hat: np.ndarray
    phi_hat: np.ndarray
    support: np.ndarray
    verified: bool
    residual_norm: float
    iterations: int
    wall_time_s: float
    converged: bool = True
    infeasible: bool = False
    nonterminating: bool = False
    extraction: Optional[ExtractionReport] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    all_solutions: Optional[List[List[int]]] = None
    solver_status: Optional[SolverStatus] = None

    def to_dict(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "method": self.method,
            "x_hat": self.x_hat.tolist(),
            "support": [int(j) for j in self.support],
            "verified": self.verified,
            "residual_norm": self.residual_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "infeasible": self.infeasible,
            "nonterminating": self.nonterminating,
            "wall_time_s": self.wall_time_s,
            "diagnostics": self.diagnostics,
        }
        if self.extraction is not None:
            payload["extraction"] = {
                "method_used": self.extraction.method_used.value,
                "sign_consistent": self.extraction.sign_consistent,
                "disconnected_sign_graph": self.extraction.disconnected_sign_graph,
                "sign_conflicts": self.extraction.sign_conflicts,
            }
        if self.all_solutions is not None:
            payload["all_solutions"] = self.all_solutions
        return payload


def _bp_outcome(method: str, result: SolveResult, elapsed: float) -> MethodOutcome:
    status = result.solver_status
    return MethodOutcome(
        method=method,
        x_hat=result.x_hat,
        phi_hat=result.phi_hat,
        support=result.group_support,
        verified=result.verified,
        residual_norm=result.residual_norm,
        iterations=status.iterations,
        wall_time_s=elapsed,
        converged=status.converged,
        nonterminating=result.nonterminating,
        extraction=result.extraction,
        diagnostics={
            "solver_reason": status.reason,
            "primal_residual": status.primal_residual,
            "dual_residual": status.dual_residual,
            "objective": status.objective,
            "penalty": status.penalty,
            "polished": status.polished,
            "outer_iterations": result.outer_iterations,
            "support_history": list(result.support_history),
        },
        solver_status=status,
    )


def _greedy_outcome(method: str, result: GreedyResult, elapsed: float) -> MethodOutcome:
    solutions = None
    if result.all_solutions is not None:
        solutions = [[int(j) for j in s] for s in result.all_solutions]
    return MethodOutcome(
        method=method,
        x_hat=result.x_hat,
        phi_hat=result.phi_hat,
        support=result.support,
        verified=result.verified,
        residual_norm=result.residual_norm,
        iterations=result.iterations,
        wall_time_s=elapsed,
        infeasible=result.infeasible,
        nonterminating=result.nonterminating,
        extraction=result.extraction,
        diagnostics={
            "residual_sq": result.residual_sq,
            "ls_solves": result.ls_solves,
            "residual_history": list(result.residual_history),
        },
        all_solutions=solutions,
    )


def _run_bp(method: str) -> Callable[[PolynomialSystem, MethodOptions], SolveResult]:
    def runner(system: PolynomialSystem, options: MethodOptions) -> SolveResult:
        config = BpConfig(
            method=BpMethod(method),
            nonneg=options.nonneg,
            noise_epsilon=options.noise_epsilon,
            reweight_iterations=options.reweight_iterations,
            reweight_eps=options.reweight_eps,
            verify_tol=options.verify_tol,
            solver=options.solver,
        )
        return run_bp(system, config)

    return runner


def _run_greedy(search: Callable) -> Callable[[PolynomialSystem, MethodOptions], GreedyResult]:
    def runner(system: PolynomialSystem, options: MethodOptions) -> GreedyResult:
        config = GreedyConfig(
            epsilon=options.squared_threshold,
            max_support=options.max_support,
            enumerate_all=options.enumerate_all,
            verify_tol=options.verify_tol,
        )
        return search(system, config)

    return runner


_REGISTRY: Dict[str, Callable] = {
    "l1": _run_bp("l1"),
    "rl1": _run_bp("rl1"),
    "l1l2": _run_bp("l1l2"),
    "irl1l2": _run_bp("irl1l2"),
    "sl1l2": _run_bp("sl1l2"),
    "aga": _run_greedy(aga),
    "ega": _run_greedy(ega),
}


def resolve_method(method: str) -> str:
    key = str(method).strip().lower()
    if key not in _REGISTRY:
        raise UnknownMethodError(
            f"unknown method '{method}'; expected one of {', '.join(METHODS)}"
        )
    return key


def run_method(
    method: str, system: PolynomialSystem, options: Optional[MethodOptions] = None
) -> MethodOutcome:
    """Run a registered method and wrap its result with wall time."""
    key = resolve_method(method)
    options = options or MethodOptions()
    start = time.perf_counter()
    result = _REGISTRY[key](system, options)
    elapsed = time.perf_counter() - start
    if key in GREEDY_METHODS:
        outcome = _greedy_outcome(key, result, elapsed)
    else:
        outcome = _bp_outcome(key, result, elapsed)
    logger.debug(
        "%s finished in %.3fs: verified=%s residual=%.3e",
        key,
        elapsed,
        outcome.verified,
        outcome.residual_norm,
    )
    return outcome
