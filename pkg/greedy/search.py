"""
Greedy group-sparse search over variable supports.

Current Implementation:
- EGA: enumerate variable supports by increasing cardinality (lexicographic combinations) and
  return the first whose lifted least-squares residual meets the threshold
- AGA: forward selection, one variable per iteration, re-solving least squares from scratch
- Least squares use a rank-revealing complete orthogonal factorization (LAPACK gelsy), which
  returns the minimum-norm solution on rank-deficient column sets

The residual threshold compares the SQUARED residual ||A_S phi + b - y||^2 against epsilon,
plus a rounding floor so that epsilon = 0 accepts exactly solvable supports.
"""

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from common.errors import GreedyBudgetError
from config import settings
from extract.extraction import ExtractionReport, extract, verify
from grouping.groups import build_groups
from poly.basis import MonomialBasis, unlift
from poly.system import PolynomialSystem

logger = logging.getLogger(__name__)


class GreedyConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(default=0.0, ge=0.0)
    max_support: Optional[int] = Field(default=None, ge=0)
    enumerate_all: bool = False
    max_ls_solves: int = Field(default_factory=lambda: settings.GREEDY_MAX_LS_SOLVES, ge=1)
    residual_floor: float = Field(default_factory=lambda: settings.GREEDY_RESIDUAL_FLOOR, ge=0.0)
    verify_tol: float = Field(default_factory=lambda: settings.VERIFY_TOL, gt=0.0)


@dataclass
class GreedyResult:
    x_hat: np.ndarray
    phi_hat: np.ndarray
    support: np.ndarray
    residual_sq: float
    ls_solves: int
    infeasible: bool = False
    all_solutions: Optional[List[np.ndarray]] = None
    nonterminating: bool = False
    iterations: int = 0
    residual_history: List[float] = field(default_factory=list)
    verified: bool = False
    residual_norm: float = math.nan
    extraction: Optional[ExtractionReport] = None


def support_columns(basis: MonomialBasis, var_support: Sequence[int]) -> np.ndarray:
    """Columns whose monomial only involves variables from var_support."""
    inside = np.zeros(basis.n, dtype=bool)
    inside[np.asarray(list(var_support), dtype=np.int64)] = True
    return np.flatnonzero(np.all(basis.exponents[:, ~inside] == 0, axis=1))


def least_squares_min_norm(A_S, rhs) -> Tuple[np.ndarray, float]:
    A_S = np.asarray(A_S, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if A_S.ndim != 2 or A_S.shape[1] == 0:
        raise ValueError("least squares needs at least one column")
    phi, _, _, _ = scipy.linalg.lstsq(A_S, rhs, lapack_driver="gelsy")
    resid = A_S @ phi - rhs
    return phi, float(resid @ resid)


def _threshold(system: PolynomialSystem, config: GreedyConfig) -> float:
    floor = config.residual_floor * (1.0 + float(np.linalg.norm(system.rhs)))
    return config.epsilon + floor * floor


def _fit(system: PolynomialSystem, var_support: Sequence[int]) -> Tuple[np.ndarray, float]:
    phi = np.zeros(system.M)
    rhs = system.rhs
    cols = support_columns(system.basis, var_support)
    if cols.size == 0:
        return phi, float(rhs @ rhs)
    phi_s, res = least_squares_min_norm(system.A[:, cols], rhs)
    phi[cols] = phi_s
    return phi, res


def _max_support(system: PolynomialSystem, config: GreedyConfig) -> int:
    cap = system.n if config.max_support is None else config.max_support
    return min(cap, system.n)


def _finish(
    system: PolynomialSystem,
    config: GreedyConfig,
    support: Sequence[int],
    phi: np.ndarray,
    residual_sq: float,
    ls_solves: int,
    **extra,
) -> GreedyResult:
    report = None
    if not np.any(phi):
        x_hat = np.zeros(system.n)
    else:
        structure = build_groups(system.basis, system.A)
        if structure.assumption1_holds:
            x_hat = unlift(system.basis, phi)
        else:
            report = extract(system.basis, structure, phi, system)
            x_hat = report.x_hat

    y_scale = 1.0 + float(np.linalg.norm(system.y))
    tol = config.verify_tol + math.sqrt(config.epsilon) / y_scale
    verified, residual = verify(system, x_hat, tol)
    return GreedyResult(
        x_hat=x_hat,
        phi_hat=phi,
        support=np.asarray(sorted(support), dtype=np.int64),
        residual_sq=residual_sq,
        ls_solves=ls_solves,
        verified=verified,
        residual_norm=residual,
        extraction=report,
        **extra,
    )


def ega(system: PolynomialSystem, config: Optional[GreedyConfig] = None) -> GreedyResult:
    """Exact greedy search: smallest-cardinality support meeting the residual threshold."""
    config = config or GreedyConfig()
    threshold = _threshold(system, config)
    base = float(system.rhs @ system.rhs)
    if base <= threshold:
        empty = [np.zeros(0, dtype=np.int64)] if config.enumerate_all else None
        return _finish(system, config, [], np.zeros(system.M), base, 0, all_solutions=empty)

    solves = 0
    best: Tuple[float, Tuple[int, ...], Optional[np.ndarray]] = (base, (), np.zeros(system.M))
    for size in range(1, _max_support(system, config) + 1):
        hits: List[Tuple[Tuple[int, ...], np.ndarray, float]] = []
        for combo in combinations(range(system.n), size):
            if solves >= config.max_ls_solves:
                raise GreedyBudgetError(
                    f"exact greedy search exceeded {config.max_ls_solves} least-squares solves "
                    f"at cardinality {size}; lower max_support or use the approximate search"
                )
            phi, res = _fit(system, combo)
            solves += 1
            if res < best[0]:
                best = (res, combo, phi)
            if res <= threshold:
                if not config.enumerate_all:
                    logger.debug("EGA hit support %s at cardinality %d", combo, size)
                    return _finish(system, config, combo, phi, res, solves, iterations=size)
                hits.append((combo, phi, res))
        if hits:
            combo, phi, res = hits[0]
            logger.debug("EGA found %d supports at cardinality %d", len(hits), size)
            return _finish(
                system,
                config,
                combo,
                phi,
                res,
                solves,
                iterations=size,
                all_solutions=[np.asarray(c, dtype=np.int64) for c, _, _ in hits],
            )
        logger.debug("EGA cardinality %d exhausted after %d solves", size, solves)

    res, combo, phi = best
    logger.info("⚠️ EGA found no support within the threshold; returning infeasibility proof")
    return _finish(
        system,
        config,
        combo,
        phi,
        res,
        solves,
        infeasible=True,
        iterations=_max_support(system, config),
        all_solutions=[] if config.enumerate_all else None,
    )


def aga(system: PolynomialSystem, config: Optional[GreedyConfig] = None) -> GreedyResult:
    """Approximate greedy search: add the variable that most reduces the residual."""
    config = config or GreedyConfig()
    threshold = _threshold(system, config)
    base = float(system.rhs @ system.rhs)
    phi = np.zeros(system.M)
    if base <= threshold:
        return _finish(system, config, [], phi, base, 0)

    support: List[int] = []
    history: List[float] = []
    solves = 0
    residual = base
    met = False
    while len(support) < _max_support(system, config):
        best_j, best_res, best_phi = -1, math.inf, None
        for j in range(system.n):
            if j in support:
                continue
            cand_phi, res = _fit(system, sorted(support + [j]))
            solves += 1
            if res < best_res:
                best_j, best_res, best_phi = j, res, cand_phi
        support = sorted(support + [best_j])
        phi, residual = best_phi, best_res
        history.append(residual)
        logger.debug(
            "AGA iteration %d: added x%d, residual %.3e", len(support), best_j + 1, residual
        )
        if residual <= threshold:
            met = True
            break

    if not met:
        logger.info("⚠️ AGA reached max_support=%d without meeting the threshold", len(support))
    return _finish(
        system,
        config,
        support,
        phi,
        residual,
        solves,
        nonterminating=not met,
        iterations=len(support),
        residual_history=history,
    )
