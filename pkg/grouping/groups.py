"""
Variable-membership groups over the lifted coordinates.

Group j collects every monomial column whose multi-index involves x_j. Columns of A that are
numerically zero carry no information; they are dropped from the active set and from the
truncated index sets that downstream solvers and certificates consume, while the full index
sets stay available for bookkeeping.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from common.errors import AllZeroMatrixError, DimensionMismatchError
from config import settings
from poly.basis import MonomialBasis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GroupStructure:
    n: int
    index_sets: Tuple[np.ndarray, ...]
    truncated_index_sets: Tuple[np.ndarray, ...]
    weights: np.ndarray
    active_columns: np.ndarray
    even_set: np.ndarray

    @property
    def M(self) -> int:
        return int(self.weights.shape[0])

    @property
    def zero_columns(self) -> np.ndarray:
        return np.setdiff1d(np.arange(self.M), self.active_columns)

    @property
    def truncated(self) -> bool:
        return self.active_columns.shape[0] < self.M

    @property
    def assumption1_holds(self) -> bool:
        """Every linear monomial column is nonzero."""
        return bool(np.all(self.weights[: self.n] > 0))

    @property
    def assumption2_holds(self) -> bool:
        """Every column is nonzero."""
        return not self.truncated

    def linear_active(self, j: int) -> bool:
        return bool(self.weights[j] > 0)

    @property
    def truncated_sizes(self) -> np.ndarray:
        return np.array([len(s) for s in self.truncated_index_sets], dtype=np.int64)


def even_degree_indices(basis: MonomialBasis) -> np.ndarray:
    """Columns whose exponents are all even."""
    return np.flatnonzero(np.all(basis.exponents % 2 == 0, axis=1))


def build_groups(basis: MonomialBasis, A) -> GroupStructure:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] != basis.M:
        raise DimensionMismatchError(f"A has {A.shape[-1]} columns, basis has M={basis.M}")

    norms = np.linalg.norm(A, axis=0)
    largest = float(norms.max()) if norms.size else 0.0
    if largest == 0.0:
        raise AllZeroMatrixError(
            "coefficient matrix A is identically zero; no structure to recover"
        )

    zero = norms <= settings.ZERO_COLUMN_RTOL * largest
    weights = np.where(zero, 0.0, norms)
    active = np.flatnonzero(~zero)

    index_sets = tuple(np.flatnonzero(basis.exponents[:, j] > 0) for j in range(basis.n))
    truncated = tuple(s[~zero[s]] for s in index_sets)

    if zero.any():
        logger.info(
            "⚠️ %d zero columns truncated from the group structure (first: %s)",
            int(zero.sum()),
            [basis.label(k) for k in np.flatnonzero(zero)[:5]],
        )

    for arr in (weights, active):
        arr.setflags(write=False)
    return GroupStructure(
        n=basis.n,
        index_sets=index_sets,
        truncated_index_sets=truncated,
        weights=weights,
        active_columns=active,
        even_set=even_degree_indices(basis),
    )


def group_norms(structure: GroupStructure, phi) -> np.ndarray:
    """Weighted group norms sqrt(sum_{k in I_j} w_k^2 phi_k^2) over active columns."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (structure.M,):
        raise DimensionMismatchError(f"phi has shape {phi.shape}, expected ({structure.M},)")
    weighted_sq = (structure.weights * phi) ** 2
    return np.array([np.sqrt(weighted_sq[s].sum()) for s in structure.truncated_index_sets])
