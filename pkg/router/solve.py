import logging
from typing import Any, Dict, List, Optional

import numpy as np
from fastapi import APIRouter, HTTPException
from pydantic import BaseModel, Field

from analysis.certificates import certify, certify_posteriori
from common.dispatch import MethodOptions, run_method
from common.errors import (
    NegativeEvenPowerError,
    NumericalBreakdownError,
    PolysparseError,
)
from data.system_io import system_from_dict
from poly.basis import enumerate_basis, lift

logger = logging.getLogger(__name__)
router = APIRouter()

# Failures of the numerical pipeline itself; every other library error is bad input.
_SOLVER_FAILURES = (NumericalBreakdownError, NegativeEvenPowerError)


class SolveRequest(BaseModel):
    system: Dict[str, Any]
    method: str = "irl1l2"
    nonneg: bool = True
    noise_epsilon: float = Field(default=0.0, ge=0.0)
    epsilon: Optional[float] = Field(default=None, ge=0.0)
    max_support: Optional[int] = Field(default=None, ge=0)
    enumerate_all: bool = False
    tol: Optional[float] = Field(default=None, gt=0.0)


class CertifyRequest(BaseModel):
    system: Dict[str, Any]
    k: int = Field(ge=0)
    epsilon: float = Field(default=0.0, ge=0.0)
    allow_truncation: bool = False


class LiftRequest(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    x: List[float]


def _raise_http(exc: Exception, what: str):
    if isinstance(exc, _SOLVER_FAILURES) or not isinstance(exc, PolysparseError):
        logger.error(f"❌ {what} failed: {exc}", exc_info=True)
        raise HTTPException(status_code=500, detail=f"{what} failed: {exc}")
    logger.warning(f"⚠️ {what} rejected: {exc}")
    raise HTTPException(status_code=422, detail=str(exc))


def _posteriori_unique(system, outcome) -> Optional[bool]:
    """Uniqueness from the group-support test, or None when coherence is undefined."""
    try:
        check = certify_posteriori(
            system, outcome.phi_hat, verified=outcome.verified, allow_truncation=True
        )
    except (PolysparseError, ValueError) as e:
        logger.debug("A posteriori check skipped: %s", e)
        return None
    return check.x_unique


@router.post("/solve")
def solve_system(request: SolveRequest):
    """Sparse solution of a polynomial system with one registered method."""
    try:
        system = system_from_dict(request.system, source="request.system")
        overrides = {} if request.tol is None else {"verify_tol": request.tol}
        options = MethodOptions(
            nonneg=request.nonneg,
            noise_epsilon=request.noise_epsilon,
            greedy_epsilon=request.epsilon,
            max_support=request.max_support,
            enumerate_all=request.enumerate_all,
            **overrides,
        )
        outcome = run_method(request.method, system, options)
        payload = outcome.to_dict()
        payload["unique"] = _posteriori_unique(system, outcome)
        return payload
    except Exception as e:
        _raise_http(e, "Solve")


@router.post("/certify")
def certify_system(request: CertifyRequest):
    """A priori recovery and stability conditions for sparsity level k."""
    try:
        system = system_from_dict(request.system, source="request.system")
        cert = certify(system, request.k, request.epsilon, request.allow_truncation)
        return cert.to_dict()
    except Exception as e:
        _raise_http(e, "Certification")


@router.post("/lift")
def lift_point(request: LiftRequest):
    try:
        basis = enumerate_basis(request.n, request.d)
        phi = lift(basis, np.asarray(request.x, dtype=float))
        return {
            "M": basis.M,
            "labels": [basis.label(k) for k in range(basis.M)],
            "phi": phi.tolist(),
        }
    except Exception as e:
        _raise_http(e, "Lift")
