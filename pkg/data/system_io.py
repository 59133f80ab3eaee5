"""
Polynomial system files.

A system file is JSON in one of two layouts:

Sparse (written by save_system):
    {"n": 2, "d": 2,
     "equations": [{"b": 0.0, "y": 2.0,
                    "terms": [{"alpha": [1, 0], "coeff": 1.0}, ...]}, ...]}

Dense:
    {"n": 2, "d": 2, "A": [[...], ...], "b": [...], "y": [...]}
with the columns of A in the canonical monomial order.

Each equation reads y = b + sum(coeff * x^alpha) with 1 <= |alpha| <= d. Monomials missing
from an equation have coefficient 0; repeated multi-indexes in one equation are summed.
"""

import json
import logging
import os
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from common.errors import PolysparseError, SystemFormatError
from poly.basis import enumerate_basis
from poly.system import PolynomialSystem

logger = logging.getLogger(__name__)


class TermModel(BaseModel):
    alpha: List[int]
    coeff: float


class EquationModel(BaseModel):
    terms: List[TermModel] = Field(default_factory=list)
    b: float = 0.0
    y: float


class SystemFileModel(BaseModel):
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    equations: Optional[List[EquationModel]] = None
    A: Optional[List[List[float]]] = None
    b: Optional[List[float]] = None
    y: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_layout(self) -> "SystemFileModel":
        dense = self.A is not None or self.y is not None
        if dense == (self.equations is not None):
            raise ValueError("give either 'equations' or the dense 'A'/'y' (with optional 'b')")
        if dense and (self.A is None or self.y is None):
            raise ValueError("dense layout needs both 'A' and 'y'")
        if self.equations is not None and not self.equations:
            raise ValueError("'equations' must not be empty")
        return self


def _location(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def system_from_dict(payload: Dict[str, Any], source: str = "<dict>") -> PolynomialSystem:
    try:
        model = SystemFileModel.model_validate(payload)
    except ValidationError as e:
        first = e.errors()[0]
        raise SystemFormatError(
            f"{source}: field '{_location(first['loc'])}': {first['msg']}"
        ) from e

    basis = enumerate_basis(model.n, model.d)
    if model.A is not None:
        A = np.asarray(model.A, dtype=float)
        b = np.zeros(A.shape[0]) if model.b is None else np.asarray(model.b, dtype=float)
        y = np.asarray(model.y, dtype=float)
        try:
            return PolynomialSystem(basis, A, b, y)
        except PolysparseError as e:
            raise SystemFormatError(f"{source}: {e}") from e

    N = len(model.equations)
    A = np.zeros((N, basis.M))
    b = np.zeros(N)
    y = np.zeros(N)
    for i, eq in enumerate(model.equations):
        b[i] = eq.b
        y[i] = eq.y
        for t, term in enumerate(eq.terms):
            where = f"equations.{i}.terms.{t}.alpha"
            if len(term.alpha) != model.n or min(term.alpha) < 0:
                raise SystemFormatError(
                    f"{source}: field '{where}': expected {model.n} nonnegative exponents"
                )
            degree = sum(term.alpha)
            if not 1 <= degree <= model.d:
                raise SystemFormatError(
                    f"{source}: field '{where}': degree {degree} outside [1, {model.d}]; "
                    "put constants in 'b'"
                )
            A[i, basis.column(term.alpha)] += term.coeff
    try:
        return PolynomialSystem(basis, A, b, y)
    except PolysparseError as e:
        raise SystemFormatError(f"{source}: {e}") from e


def load_system(path: str) -> PolynomialSystem:
    """Read a system file; malformed input raises SystemFormatError with line/field context."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"system file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as e:
        raise SystemFormatError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(payload, dict):
        raise SystemFormatError(f"{path}: top level must be a JSON object")
    system = system_from_dict(payload, source=path)
    logger.info("📦 Loaded system from %s: n=%d d=%d N=%d", path, system.n, system.d, system.N)
    return system


def system_to_dict(system: PolynomialSystem) -> Dict[str, Any]:
    """Sparse layout: one term per nonzero coefficient."""
    equations = []
    for i in range(system.N):
        terms = [
            {"alpha": [int(e) for e in system.basis.exponents[k]], "coeff": float(system.A[i, k])}
            for k in np.flatnonzero(system.A[i])
        ]
        equations.append({"b": float(system.b[i]), "y": float(system.y[i]), "terms": terms})
    return {"n": system.n, "d": system.d, "equations": equations}


def save_system(system: PolynomialSystem, path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(system_to_dict(system), f, indent=2)
        f.write("\n")
    logger.info("✅ Saved system to %s", path)
