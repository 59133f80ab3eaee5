from dataclasses import dataclass

import numpy as np

from common.errors import DimensionMismatchError
from poly.basis import MonomialBasis, lift


@dataclass(frozen=True, eq=False)
class PolynomialSystem:
    """N polynomial equations y_i = b_i + a_i^T lift(x), stored densely."""

    basis: MonomialBasis
    A: np.ndarray
    b: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        A = np.array(self.A, dtype=float, copy=True)
        b = np.array(self.b, dtype=float, copy=True).reshape(-1)
        y = np.array(self.y, dtype=float, copy=True).reshape(-1)

        if A.ndim != 2 or A.shape[1] != self.basis.M:
            raise DimensionMismatchError(
                f"A has shape {A.shape}, expected (N, {self.basis.M}) "
                f"for n={self.basis.n}, d={self.basis.d}"
            )
        if b.shape != (A.shape[0],) or y.shape != (A.shape[0],):
            raise DimensionMismatchError(
                f"b and y must have length N={A.shape[0]} (got {b.shape[0]} and {y.shape[0]})"
            )
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(y).all()):
            raise DimensionMismatchError("system coefficients and measurements must be finite")

        for arr in (A, b, y):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.basis.n

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def M(self) -> int:
        return self.basis.M

    @property
    def N(self) -> int:
        return int(self.A.shape[0])

    @property
    def rhs(self) -> np.ndarray:
        """The lifted linear system's right-hand side y - b."""
        return self.y - self.b


def evaluate(system: PolynomialSystem, x) -> np.ndarray:
    """Residual y - b - A lift(x)."""
    return system.y - system.b - system.A @ lift(system.basis, x)
