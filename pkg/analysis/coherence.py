from typing import Tuple

import numpy as np

from common.errors import AllZeroMatrixError, ZeroColumnError
from config import settings


def mutual_coherence(A) -> float:
    """Largest normalized absolute inner product between two distinct columns of A."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] < 2:
        raise ValueError("mutual coherence needs a matrix with at least two columns")
    norms = np.linalg.norm(A, axis=0)
    largest = float(norms.max())
    if largest == 0.0:
        raise AllZeroMatrixError("coefficient matrix A is identically zero")
    zero = norms <= settings.ZERO_COLUMN_RTOL * largest
    if zero.any():
        raise ZeroColumnError(np.flatnonzero(zero))
    normalized = A / norms[None, :]
    gram = np.abs(normalized.T @ normalized)
    np.fill_diagonal(gram, 0.0)
    return float(min(1.0, gram.max()))


def kernel_coherence_bound(A, delta, cauchy_schwarz: bool = True) -> Tuple[np.ndarray, float]:
    """Per-coordinate w_i^2 delta_i^2 and a coherence bound on them for delta in Ker(A).

    With ``cauchy_schwarz`` (the default) the bound is c/(1+c) ||W delta||^2 with
    c = mu^2 (M-1), which holds for every kernel vector. Without it the constant drops the
    (M-1) factor; that tighter form fails for some kernel vectors, e.g. A = [1, 1, 1] with
    delta = (2, -1, -1).
    """
    A = np.asarray(A, dtype=float)
    delta = np.asarray(delta, dtype=float)
    w = np.linalg.norm(A, axis=0)
    mu = mutual_coherence(A)
    c = mu**2 * (A.shape[1] - 1) if cauchy_schwarz else mu**2
    weighted = w * delta
    lhs = weighted**2
    rhs = c / (1.0 + c) * float(weighted @ weighted)
    return lhs, rhs
