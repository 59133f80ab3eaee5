"""
Consensus ADMM for weighted group-norm minimization under a linear data constraint.

Problem:
    minimize   sum_j mu_j * || W_j phi ||_2
    subject to A phi = r                 (equality)
           or  || A phi - r ||_2 <= eps  (ball)
               phi_k >= 0 for k in nonneg_set

Architecture:
- The solver works in column-scaled coordinates psi = W phi, with B = A W^-1, so every group
  norm becomes a plain Euclidean norm over a subvector of psi.
- Groups overlap, so each group owns a copy of its coordinates (z), the constraint set owns one
  more copy (v), and the consensus variable x averages them. All three sub-steps are closed
  form: averaging plus a nonnegativity clamp, block soft-thresholding, and a Euclidean
  projection onto the constraint set.
- The projection uses an eigendecomposition of B B^T computed once per matrix and reusable
  across reweighting rounds, since only the multipliers change between them.
- Penalty adapts by residual balancing (factor 2 when one residual dominates by 10x).
- After convergence an optional polish replaces the iterate by the least-squares solution on
  the support read from the prox copies, when that solution is feasible and no worse.
"""

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from common.errors import (
    DimensionMismatchError,
    InfeasibleEqualityError,
    NumericalBreakdownError,
)
from config import settings

logger = logging.getLogger(__name__)

_BALANCE_RATIO = 10.0
_BALANCE_FACTOR = 2.0


@dataclass(frozen=True)
class Constraint:
    kind: str = "equality"
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in ("equality", "ball"):
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if not self.epsilon >= 0:
            raise ValueError(f"ball radius must be >= 0 (got {self.epsilon})")

    @classmethod
    def equality(cls) -> "Constraint":
        return cls("equality", 0.0)

    @classmethod
    def ball(cls, epsilon: float) -> "Constraint":
        return cls("ball", float(epsilon))

    @property
    def is_ball(self) -> bool:
        return self.kind == "ball"


@dataclass(frozen=True, eq=False)
class Group:
    indices: np.ndarray
    weights: np.ndarray
    multiplier: float = 1.0

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if idx.shape != w.shape:
            raise DimensionMismatchError("group indices and weights differ in length")
        if np.any(w <= 0):
            raise ValueError("group weights must be positive; drop zero columns first")
        if not self.multiplier >= 0:
            raise ValueError(f"group multiplier must be >= 0 (got {self.multiplier})")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "multiplier", float(self.multiplier))


@dataclass(frozen=True, eq=False)
class ConicProblem:
    A: np.ndarray
    r: np.ndarray
    groups: Tuple[Group, ...]
    constraint: Constraint = field(default_factory=Constraint.equality)
    nonneg_set: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if A.ndim != 2 or r.shape != (A.shape[0],):
            raise DimensionMismatchError(f"A {A.shape} and r {r.shape} are inconsistent")
        M = A.shape[1]
        nonneg = np.unique(np.asarray(self.nonneg_set, dtype=np.int64).reshape(-1))
        groups = tuple(self.groups)
        for g in groups:
            if g.indices.size and (g.indices.min() < 0 or g.indices.max() >= M):
                raise DimensionMismatchError("group index out of range")
        if nonneg.size and (nonneg.min() < 0 or nonneg.max() >= M):
            raise DimensionMismatchError("nonneg index out of range")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "nonneg_set", nonneg)

    @property
    def M(self) -> int:
        return int(self.A.shape[1])

    def column_scale(self) -> np.ndarray:
        """Per-column weight shared by every group containing the column (1 if none)."""
        scale = np.full(self.M, np.nan)
        for g in self.groups:
            prev = scale[g.indices]
            clash = ~np.isnan(prev) & ~np.isclose(prev, g.weights, rtol=1e-12, atol=0.0)
            if clash.any():
                raise ValueError("a column carries different weights in different groups")
            scale[g.indices] = g.weights
        scale[np.isnan(scale)] = 1.0
        return scale

    def with_multipliers(self, multipliers: Sequence[float]) -> "ConicProblem":
        mult = list(multipliers)
        if len(mult) != len(self.groups):
            raise DimensionMismatchError("one multiplier per group is required")
        groups = tuple(Group(g.indices, g.weights, float(mu)) for g, mu in zip(self.groups, mult))
        return replace(self, groups=groups)


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_iterations: int = Field(default_factory=lambda: settings.SOLVER_MAX_ITERATIONS, ge=1)
    primal_tol: float = Field(default_factory=lambda: settings.SOLVER_PRIMAL_TOL, gt=0)
    dual_tol: float = Field(default_factory=lambda: settings.SOLVER_DUAL_TOL, gt=0)
    penalty: float = Field(default_factory=lambda: settings.SOLVER_PENALTY, gt=0)
    adaptive_penalty: bool = Field(default_factory=lambda: settings.SOLVER_ADAPTIVE_PENALTY)
    polish: bool = Field(default_factory=lambda: settings.SOLVER_POLISH)
    trace: bool = False


@dataclass
class SolverStatus:
    converged: bool
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    reason: str = "converged"
    penalty: float = 1.0
    polished: bool = False
    merit_increases: int = 0
    trace: List[Tuple[int, float, float, float]] = field(default_factory=list, repr=False)


@dataclass(frozen=True, eq=False)
class ConstraintFactor:
    """Eigendecomposition of B B^T for the scaled matrix B = A diag(scale)^-1."""

    B: np.ndarray
    scale: np.ndarray
    eigvals: np.ndarray
    U: np.ndarray
    BtU: np.ndarray
    inv_eigvals: np.ndarray
    in_range: np.ndarray


def factor_constraint(A, scale: Optional[np.ndarray] = None) -> ConstraintFactor:
    A = np.asarray(A, dtype=float)
    scale = np.ones(A.shape[1]) if scale is None else np.asarray(scale, dtype=float)
    B = A / scale[None, :]
    eigvals, U = scipy.linalg.eigh(B @ B.T)
    top = float(eigvals.max()) if eigvals.size else 0.0
    cutoff = top * max(B.shape) * np.finfo(float).eps
    in_range = eigvals > cutoff
    eigvals = np.where(in_range, eigvals, 0.0)
    inv = np.zeros_like(eigvals)
    inv[in_range] = 1.0 / eigvals[in_range]
    return ConstraintFactor(
        B=B, scale=scale, eigvals=eigvals, U=U, BtU=B.T @ U, inv_eigvals=inv, in_range=in_range
    )


def factor_for(problem: ConicProblem) -> ConstraintFactor:
    return factor_constraint(problem.A, problem.column_scale())


def _project(
    p: np.ndarray, factor: ConstraintFactor, r: np.ndarray, constraint: Constraint
) -> np.ndarray:
    eps = constraint.epsilon
    if constraint.is_ball and math.isinf(eps):
        return p.copy()

    q = factor.B @ p - r
    if constraint.is_ball and np.linalg.norm(q) <= eps:
        return p.copy()

    qt = factor.U.T @ q
    if not constraint.is_ball or eps == 0.0:
        return p - factor.BtU @ (factor.inv_eigvals * qt)

    s2 = factor.eigvals
    floor = np.linalg.norm(qt[~factor.in_range])
    if floor >= eps:
        # ball unreachable along the range; the closest approach is the least-norm correction
        return p - factor.BtU @ (factor.inv_eigvals * qt)

    def excess(lam: float) -> float:
        return float(np.linalg.norm(qt / (1.0 + lam * s2)) - eps)

    hi = 1.0
    for _ in range(300):
        if excess(hi) <= 0.0:
            break
        hi *= 10.0
    lam = brentq(excess, 0.0, hi, xtol=1e-300, rtol=8 * np.finfo(float).eps, maxiter=500)
    return p - lam * (factor.BtU @ (qt / (1.0 + lam * s2)))


def project_constraint(
    v, A, r, constraint: Constraint, factor: Optional[ConstraintFactor] = None
) -> np.ndarray:
    """Euclidean projection of v onto {phi : A phi = r} or {phi : ||A phi - r|| <= eps}.

    Rank-deficient A is handled with the pseudo-inverse action. ``factor`` must come from
    ``factor_constraint(A)`` when given.
    """
    v = np.asarray(v, dtype=float)
    r = np.asarray(r, dtype=float)
    factor = factor if factor is not None else factor_constraint(A)
    return _project(v, factor, r, constraint)


@dataclass(frozen=True, eq=False)
class _Layout:
    cols: np.ndarray
    gid: np.ndarray
    mult: np.ndarray
    counts: np.ndarray
    n_groups: int


def _layout(problem: ConicProblem) -> _Layout:
    groups = problem.groups
    if groups:
        cols = np.concatenate([g.indices for g in groups])
        gid = np.concatenate(
            [np.full(g.indices.size, j, dtype=np.int64) for j, g in enumerate(groups)]
        )
    else:
        cols = np.zeros(0, dtype=np.int64)
        gid = np.zeros(0, dtype=np.int64)
    mult = np.array([g.multiplier for g in groups], dtype=float)
    counts = np.bincount(cols, minlength=problem.M).astype(float) + 1.0
    return _Layout(cols=cols, gid=gid, mult=mult, counts=counts, n_groups=len(groups))


def _block_shrink(a: np.ndarray, gid: np.ndarray, thresh: np.ndarray, n_groups: int) -> np.ndarray:
    norms = np.sqrt(np.bincount(gid, weights=a * a, minlength=n_groups))
    with np.errstate(divide="ignore", invalid="ignore"):
        keep = np.where(norms > thresh, 1.0 - thresh / norms, 0.0)
    keep = np.where(thresh <= 0.0, 1.0, keep)
    return a * keep[gid]


def prox_group(v, groups: Sequence[Group], step: float) -> np.ndarray:
    """Block soft-thresholding of group copies.

    ``v`` holds one copy per (group, member) pair, concatenated group after group in the
    order of ``groups``. Each copy is shrunk on its weighted norm by ``step * mu_j``; the
    result is returned in the original (unweighted) coordinates.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    v = np.asarray(v, dtype=float)
    if not groups:
        return v.copy()
    w = np.concatenate([g.weights for g in groups])
    gid = np.concatenate([np.full(g.indices.size, j, dtype=np.int64) for j, g in enumerate(groups)])
    if v.shape != w.shape:
        raise DimensionMismatchError(f"expected {w.size} group copies, got {v.size}")
    thresh = step * np.array([g.multiplier for g in groups], dtype=float)
    return _block_shrink(v * w, gid, thresh, len(groups)) / w


def _objective(psi: np.ndarray, layout: _Layout) -> float:
    if layout.n_groups == 0:
        return 0.0
    sq = np.bincount(layout.gid, weights=psi[layout.cols] ** 2, minlength=layout.n_groups)
    return float(np.dot(layout.mult, np.sqrt(sq)))


def _check_reachable(
    factor: ConstraintFactor, r: np.ndarray, constraint: Constraint, tol: float
) -> None:
    qt = factor.U.T @ r
    outside = float(np.linalg.norm(qt[~factor.in_range]))
    limit = tol + (constraint.epsilon if constraint.is_ball else 0.0)
    if outside > limit:
        kind = "ball" if constraint.is_ball else "equality"
        raise InfeasibleEqualityError(
            f"{kind} constraint unreachable: "
            f"distance of r to range(A) is {outside:.3e} > {limit:.3e}"
        )


def _supported_columns(z: np.ndarray, layout: _Layout, M: int, tol: float) -> np.ndarray:
    if layout.n_groups == 0:
        return np.ones(M, dtype=bool)
    norms = np.sqrt(np.bincount(layout.gid, weights=z * z, minlength=layout.n_groups))
    dead = (norms <= tol).astype(float)
    dead_count = np.bincount(layout.cols, weights=dead[layout.gid], minlength=M)
    return dead_count == 0


def _polish(
    B: np.ndarray,
    r: np.ndarray,
    psi: np.ndarray,
    support: np.ndarray,
    layout: _Layout,
    nonneg: np.ndarray,
    options: SolverOptions,
) -> Optional[np.ndarray]:
    idx = np.flatnonzero(support)
    if idx.size == 0 or idx.size > B.shape[0]:
        return None
    sol, _, rank, _ = scipy.linalg.lstsq(B[:, idx], r, lapack_driver="gelsy")
    if rank < idx.size:
        return None
    cand = np.zeros_like(psi)
    cand[idx] = sol
    if np.linalg.norm(B @ cand - r) > options.primal_tol * (1.0 + np.linalg.norm(r)):
        return None
    if nonneg.size and cand[nonneg].min() < -options.primal_tol * (1.0 + np.linalg.norm(cand)):
        return None
    if _objective(cand, layout) > _objective(psi, layout) * (1.0 + 1e-6) + 1e-12:
        return None
    return cand


def _idle_status(reason: str, penalty: float) -> SolverStatus:
    return SolverStatus(True, 0, 0.0, 0.0, 0.0, reason=reason, penalty=penalty)


def solve(
    problem: ConicProblem,
    options: Optional[SolverOptions] = None,
    factor: Optional[ConstraintFactor] = None,
    warm_start: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, SolverStatus]:
    options = options or SolverOptions()
    layout = _layout(problem)
    factor = factor if factor is not None else factor_for(problem)
    B, scale, r = factor.B, factor.scale, problem.r
    constraint = problem.constraint
    M = problem.M
    r_norm = float(np.linalg.norm(r))

    if constraint.is_ball and r_norm <= constraint.epsilon:
        return np.zeros(M), _idle_status("trivial", options.penalty)
    if not constraint.is_ball and r_norm == 0.0:
        return np.zeros(M), _idle_status("trivial", options.penalty)

    _check_reachable(factor, r, constraint, options.primal_tol * (1.0 + r_norm))

    if layout.n_groups == 0 or not np.any(layout.mult > 0):
        psi = _project(np.zeros(M), factor, r, constraint)
        logger.debug("All multipliers are zero; returning the minimum-norm feasible point")
        return psi / scale, _idle_status("degenerate", options.penalty)

    cols, gid, n_groups = layout.cols, layout.gid, layout.n_groups
    nonneg = problem.nonneg_set
    rho = options.penalty

    if warm_start is not None:
        x = np.asarray(warm_start, dtype=float) * scale
        if x.shape != (M,):
            raise DimensionMismatchError(f"warm start has shape {x.shape}, expected ({M},)")
    else:
        x = np.zeros(M)
    z = x[cols].copy()
    v = _project(x, factor, r, constraint)
    uz = np.zeros(cols.size)
    uv = np.zeros(M)

    status = SolverStatus(
        False, 0, math.inf, math.inf, math.inf, reason="max_iterations", penalty=rho
    )
    prev_obj = math.inf

    for it in range(1, options.max_iterations + 1):
        acc = np.bincount(cols, weights=z + uz, minlength=M) + (v + uv)
        x = acc / layout.counts
        if nonneg.size:
            x[nonneg] = np.maximum(x[nonneg], 0.0)
        xg = x[cols]

        z_old, v_old = z, v
        z = _block_shrink(xg - uz, gid, layout.mult / rho, n_groups)
        v = _project(x - uv, factor, r, constraint)

        rz = z - xg
        rv = v - x
        uz += rz
        uv += rv

        primal = math.sqrt(float(rz @ rz + rv @ rv))
        dz = np.bincount(cols, weights=z - z_old, minlength=M) + (v - v_old)
        dual = rho * float(np.linalg.norm(dz))

        if not (np.isfinite(primal) and np.isfinite(dual) and np.all(np.isfinite(v))):
            raise NumericalBreakdownError(f"non-finite iterate at iteration {it}")

        primal_scale = max(math.sqrt(float(xg @ xg + x @ x)), math.sqrt(float(z @ z + v @ v)))
        dual_scale = rho * float(np.linalg.norm(np.bincount(cols, weights=uz, minlength=M) + uv))
        primal_rel = primal / primal_scale if primal_scale > 0 else primal
        dual_rel = dual / dual_scale if dual_scale > 0 else dual

        objective = _objective(v, layout)
        if objective > prev_obj + 1e-9 * (1.0 + abs(prev_obj)):
            status.merit_increases += 1
        prev_obj = objective
        if options.trace:
            status.trace.append((it, objective, primal_rel, dual_rel))

        status.iterations = it
        status.primal_residual = primal_rel
        status.dual_residual = dual_rel
        if primal_rel <= options.primal_tol and dual_rel <= options.dual_tol:
            status.converged = True
            status.reason = "converged"
            break

        if options.adaptive_penalty and primal > 0 and dual > 0:
            if primal > _BALANCE_RATIO * dual:
                rho *= _BALANCE_FACTOR
                uz /= _BALANCE_FACTOR
                uv /= _BALANCE_FACTOR
            elif dual > _BALANCE_RATIO * primal:
                rho /= _BALANCE_FACTOR
                uz *= _BALANCE_FACTOR
                uv *= _BALANCE_FACTOR

    status.penalty = rho
    if not status.converged:
        logger.warning(
            "⚠️ Conic solver stopped after %d iterations (primal %.2e, dual %.2e)",
            status.iterations,
            status.primal_residual,
            status.dual_residual,
        )
    if status.merit_increases:
        logger.debug(
            "Objective increased on %d of %d iterations",
            status.merit_increases,
            status.iterations,
        )

    psi = v
    if options.polish:
        support = _supported_columns(z, layout, M, options.primal_tol * (1.0 + np.linalg.norm(v)))
        if constraint.is_ball:
            cand = np.where(support, v, 0.0)
            slack = constraint.epsilon + options.primal_tol * (1.0 + r_norm)
            if np.linalg.norm(B @ cand - r) <= slack:
                psi = cand
                status.polished = True
        else:
            cand = _polish(B, r, v, support, layout, nonneg, options)
            if cand is not None:
                psi = cand
                status.polished = True

    if nonneg.size:
        psi = psi.copy()
        psi[nonneg] = np.maximum(psi[nonneg], 0.0)

    status.objective = _objective(psi, layout)
    logger.debug(
        "Conic solve: %s after %d iterations, objective %.6g, rho %.3g, polished=%s",
        status.reason,
        status.iterations,
        status.objective,
        rho,
        status.polished,
    )
    return psi / scale, status


def write_trace(status: SolverStatus, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["iteration", "objective", "primal_res", "dual_res"])
        for row in status.trace:
            writer.writerow([row[0], repr(row[1]), repr(row[2]), repr(row[3])])
