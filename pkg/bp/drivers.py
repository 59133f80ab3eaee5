"""
Basis-pursuit drivers over the lifted system.

Current Implementation:
- Weighted l1 (singleton groups, no sign constraints) and its iteratively reweighted variant
- Group l1/l2 with optional nonnegativity on all-even monomials
- Iteratively reweighted group l1/l2 (mu_j = 1 / (||W_j phi|| + eps))
- Selective group l1/l2: zero one multiplier per round until the weighted objective vanishes

Architecture:
- Zero columns are removed before solving; groups are re-indexed onto the active columns
- The constraint factorization is computed once per system and shared by every round
- Each round warm-starts from the previous estimate
- x_hat comes from unlift when all linear columns are present, otherwise from extract
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from common.errors import DimensionMismatchError
from config import settings
from conic.solver import (
    ConicProblem,
    Constraint,
    ConstraintFactor,
    Group,
    SolverOptions,
    SolverStatus,
    factor_for,
    solve,
)
from extract.extraction import ExtractionReport, extract, verify
from grouping.groups import GroupStructure, build_groups, group_norms
from poly.basis import unlift
from poly.system import PolynomialSystem

logger = logging.getLogger(__name__)


class BpMethod(str, Enum):
    L1 = "l1"
    GROUP = "l1l2"
    IR_GROUP = "irl1l2"
    SELECTIVE = "sl1l2"
    REWEIGHTED_L1 = "rl1"


class BpConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: BpMethod = BpMethod.IR_GROUP
    nonneg: bool = True
    noise_epsilon: float = Field(default=0.0, ge=0.0)
    reweight_iterations: int = Field(default_factory=lambda: settings.REWEIGHT_ITERATIONS, ge=1)
    reweight_eps: float = Field(default_factory=lambda: settings.REWEIGHT_EPS, gt=0.0)
    verify_tol: float = Field(default_factory=lambda: settings.VERIFY_TOL, gt=0.0)
    solver: SolverOptions = Field(default_factory=SolverOptions)


@dataclass
class SolveResult:
    phi_hat: np.ndarray
    x_hat: np.ndarray
    group_support: np.ndarray
    solver_status: SolverStatus
    verified: bool
    residual_norm: float
    assumption1: bool = True
    extraction: Optional[ExtractionReport] = None
    outer_iterations: int = 1
    nonterminating: bool = False
    multipliers: Optional[np.ndarray] = None
    support_history: List[int] = field(default_factory=list)


@dataclass
class _Prepared:
    system: PolynomialSystem
    structure: GroupStructure
    problem: ConicProblem
    factor: ConstraintFactor
    singleton: bool


def _prepare(system: PolynomialSystem, config: BpConfig, singleton: bool) -> _Prepared:
    structure = build_groups(system.basis, system.A)
    active = structure.active_columns
    local = np.full(system.M, -1, dtype=np.int64)
    local[active] = np.arange(active.size)
    w = structure.weights

    if singleton:
        groups = tuple(Group([i], [w[k]]) for i, k in enumerate(active))
    else:
        groups = tuple(Group(local[s], w[s]) for s in structure.truncated_index_sets)

    # sign constraints belong to the group programs only
    nonneg = np.zeros(0, dtype=np.int64)
    if config.nonneg and not singleton:
        nonneg = local[np.intersect1d(structure.even_set, active)]

    if config.noise_epsilon > 0:
        constraint = Constraint.ball(config.noise_epsilon)
    else:
        constraint = Constraint.equality()

    if not structure.assumption1_holds:
        logger.info(
            "⚠️ Linear monomial columns are zero; x_hat comes from pure-nonlinear extraction"
        )

    problem = ConicProblem(system.A[:, active], system.rhs, groups, constraint, nonneg)
    return _Prepared(system, structure, problem, factor_for(problem), singleton)


def _embed(prep: _Prepared, phi_active: np.ndarray) -> np.ndarray:
    phi = np.zeros(prep.system.M)
    phi[prep.structure.active_columns] = phi_active
    return phi


def _support_tol(phi: np.ndarray) -> float:
    return settings.ZERO_TOL * (1.0 + float(np.linalg.norm(phi)))


def _finish(
    prep: _Prepared,
    phi_active: np.ndarray,
    status: SolverStatus,
    config: BpConfig,
    **extra,
) -> SolveResult:
    system, structure = prep.system, prep.structure
    phi = _embed(prep, phi_active)
    support = np.flatnonzero(group_norms(structure, phi) > _support_tol(phi))

    report = None
    if structure.assumption1_holds:
        x_hat = unlift(system.basis, phi)
    else:
        report = extract(system.basis, structure, phi, system)
        x_hat = report.x_hat

    tol = config.verify_tol + config.noise_epsilon / (1.0 + float(np.linalg.norm(system.y)))
    verified, residual = verify(system, x_hat, tol)
    return SolveResult(
        phi_hat=phi,
        x_hat=x_hat,
        group_support=support,
        solver_status=status,
        verified=verified,
        residual_norm=residual,
        assumption1=structure.assumption1_holds,
        extraction=report,
        **extra,
    )


def _solve_round(
    prep: _Prepared, config: BpConfig, multipliers: np.ndarray, warm: Optional[np.ndarray]
) -> Tuple[np.ndarray, SolverStatus]:
    problem = prep.problem.with_multipliers(multipliers)
    return solve(problem, config.solver, factor=prep.factor, warm_start=warm)


def _penalized_norms(prep: _Prepared, phi_active: np.ndarray) -> np.ndarray:
    """Per-group weighted norms in the solver's group order."""
    if prep.singleton:
        return prep.structure.weights[prep.structure.active_columns] * np.abs(phi_active)
    return group_norms(prep.structure, _embed(prep, phi_active))


def solve_l1(system: PolynomialSystem, config: Optional[BpConfig] = None) -> SolveResult:
    """Minimize ||W phi||_1 under the data constraint."""
    config = config or BpConfig(method=BpMethod.L1)
    prep = _prepare(system, config, singleton=True)
    ones = np.ones(len(prep.problem.groups))
    phi_active, status = _solve_round(prep, config, ones, None)
    return _finish(prep, phi_active, status, config, multipliers=ones)


def solve_group(
    system: PolynomialSystem,
    config: Optional[BpConfig] = None,
    multipliers: Optional[Sequence[float]] = None,
) -> SolveResult:
    """Minimize sum_j mu_j ||W_j phi||_2 under the data constraint."""
    config = config or BpConfig(method=BpMethod.GROUP)
    prep = _prepare(system, config, singleton=False)
    mu = np.ones(system.n) if multipliers is None else np.asarray(multipliers, dtype=float)
    if mu.shape != (system.n,):
        raise DimensionMismatchError(f"expected {system.n} multipliers, got {mu.size}")
    if np.any(mu < 0):
        raise ValueError("multipliers must be nonnegative")
    phi_active, status = _solve_round(prep, config, mu, None)
    return _finish(prep, phi_active, status, config, multipliers=mu)


def _reweighted(system: PolynomialSystem, config: BpConfig, singleton: bool) -> SolveResult:
    prep = _prepare(system, config, singleton=singleton)
    mu = np.ones(len(prep.problem.groups))
    phi_active: Optional[np.ndarray] = None
    history: List[int] = []
    status = None

    for t in range(config.reweight_iterations):
        phi_active, status = _solve_round(prep, config, mu, phi_active)
        norms = _penalized_norms(prep, phi_active)
        count = int(np.count_nonzero(norms > _support_tol(phi_active)))
        if history and count > history[-1]:
            logger.debug(
                "Reweighting round %d grew the support from %d to %d", t + 1, history[-1], count
            )
        history.append(count)
        mu = 1.0 / (norms + config.reweight_eps)

    logger.debug("Reweighting support sizes: %s", history)
    return _finish(
        prep,
        phi_active,
        status,
        config,
        outer_iterations=config.reweight_iterations,
        multipliers=mu,
        support_history=history,
    )


def solve_ir_group(system: PolynomialSystem, config: Optional[BpConfig] = None) -> SolveResult:
    config = config or BpConfig(method=BpMethod.IR_GROUP)
    return _reweighted(system, config, singleton=False)


def solve_reweighted_l1(system: PolynomialSystem, config: Optional[BpConfig] = None) -> SolveResult:
    config = config or BpConfig(method=BpMethod.REWEIGHTED_L1)
    return _reweighted(system, config, singleton=True)


def solve_selective(system: PolynomialSystem, config: Optional[BpConfig] = None) -> SolveResult:
    """Zero the multiplier of the largest group after each solve until nothing is penalized."""
    config = config or BpConfig(method=BpMethod.SELECTIVE)
    prep = _prepare(system, config, singleton=False)
    n = system.n
    mu = np.ones(n)
    stop_tol = settings.SELECTIVE_STOP_TOL * (1.0 + float(np.linalg.norm(system.y)))

    phi_active: Optional[np.ndarray] = None
    status = None
    history: List[int] = []
    finished = False
    t = 0
    for t in range(1, n + 1):
        phi_active, status = _solve_round(prep, config, mu, phi_active)
        norms = _penalized_norms(prep, phi_active)
        history.append(int(np.count_nonzero(norms > _support_tol(phi_active))))
        if float(mu @ norms) <= stop_tol:
            finished = True
            break
        candidates = np.flatnonzero(mu > 0)
        k = int(candidates[np.argmax(norms[candidates])])
        mu[k] = 0.0
        logger.debug("Selective round %d: released group x%d (norm %.3e)", t, k + 1, norms[k])
        if float(mu @ norms) <= stop_tol:
            finished = True
            break

    if not finished:
        logger.warning(
            "⚠️ Selective reweighting did not meet its stop test within %d rounds", n
        )
    return _finish(
        prep,
        phi_active,
        status,
        config,
        outer_iterations=t,
        nonterminating=not finished,
        multipliers=mu,
        support_history=history,
    )


_DRIVERS = {
    BpMethod.L1: lambda system, config: solve_l1(system, config),
    BpMethod.GROUP: lambda system, config: solve_group(system, config),
    BpMethod.IR_GROUP: solve_ir_group,
    BpMethod.SELECTIVE: solve_selective,
    BpMethod.REWEIGHTED_L1: solve_reweighted_l1,
}


def run_bp(system: PolynomialSystem, config: BpConfig) -> SolveResult:
    """Dispatch on config.method."""
    return _DRIVERS[config.method](system, config)
