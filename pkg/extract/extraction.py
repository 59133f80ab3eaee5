"""
Reading x back out of a lifted estimate.

Current Implementation:
- Linear read-out when every linear monomial column is present
- Signed odd roots from the smallest nonzero odd power of a variable
- Even-power magnitudes with relative signs propagated over bilinear estimates (BFS)
- A posteriori verification against the original polynomial equations

Sign propagation never overrides an edge by majority: conflicting bilinear signs only clear
the sign_consistent flag, and components with no sign anchor are flagged as ambiguous
whenever their sign cannot be tied to the rest of the solution.
"""

import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from common.errors import DimensionMismatchError, NegativeEvenPowerError
from config import settings
from grouping.groups import GroupStructure, group_norms
from poly.basis import MonomialBasis, unlift
from poly.system import PolynomialSystem, evaluate

logger = logging.getLogger(__name__)


class ExtractionMethod(str, Enum):
    LINEAR = "LinearReadout"
    ODD_ROOT = "OddRoot"
    QUADRATIC_SIGN = "QuadraticSign"


@dataclass
class ExtractionReport:
    x_hat: np.ndarray
    support: np.ndarray
    method_used: ExtractionMethod
    sign_consistent: bool
    verify_residual: float
    disconnected_sign_graph: bool = False
    sign_conflicts: int = 0


def _signed_root(value: float, p: int) -> float:
    if p == 1:
        return float(value)
    if p == 3:
        return float(np.cbrt(value))
    return float(np.sign(value) * abs(value) ** (1.0 / p))


def _odd_root(
    basis: MonomialBasis, groups: GroupStructure, phi: np.ndarray, j: int, tol: float
) -> Optional[float]:
    for p in range(1, basis.d + 1, 2):
        col = basis.power_column(j, p)
        if groups.weights[col] > 0 and abs(phi[col]) > tol:
            return _signed_root(phi[col], p)
    return None


def _even_magnitude(
    basis: MonomialBasis, groups: GroupStructure, phi: np.ndarray, j: int, tol: float
) -> float:
    for p in range(2, basis.d + 1, 2):
        col = basis.power_column(j, p)
        if groups.weights[col] <= 0:
            continue
        value = phi[col]
        if value < -tol:
            raise NegativeEvenPowerError(
                f"estimate of x{j + 1}^{p} is {value:.3e} < 0; "
                "the relaxation did not return a lifted point"
            )
        if value > tol:
            return float(value ** (1.0 / p))
    return 0.0


def _bilinear_edges(
    basis: MonomialBasis, groups: GroupStructure, phi: np.ndarray, nodes: List[int], tol: float
) -> Dict[int, List[Tuple[int, float]]]:
    adjacency: Dict[int, List[Tuple[int, float]]] = {j: [] for j in nodes}
    if basis.d < 2:
        return adjacency
    for a, i in enumerate(nodes):
        for j in nodes[a + 1 :]:
            alpha = [0] * basis.n
            alpha[i] += 1
            alpha[j] += 1
            col = basis.column(alpha)
            if groups.weights[col] > 0 and abs(phi[col]) > tol:
                s = float(np.sign(phi[col]))
                adjacency[i].append((j, s))
                adjacency[j].append((i, s))
    return adjacency


def _resolve_signs(
    x: np.ndarray,
    unsigned: List[int],
    anchors: List[int],
    adjacency: Dict[int, List[Tuple[int, float]]],
) -> Tuple[int, bool]:
    sign: Dict[int, float] = {a: float(np.sign(x[a])) for a in anchors}
    visited: Set[int] = set()
    unanchored = 0

    for start in sorted(adjacency):
        if start in visited:
            continue
        # collect the component first so anchored components seed from every anchor
        component, queue = [], deque([start])
        visited.add(start)
        while queue:
            u = queue.popleft()
            component.append(u)
            for nb, _ in adjacency[u]:
                if nb not in visited:
                    visited.add(nb)
                    queue.append(nb)

        seeds = [u for u in sorted(component) if u in sign]
        if not seeds:
            root = min(component)
            sign[root] = 1.0
            seeds = [root]
            if any(u in unsigned for u in component):
                unanchored += 1

        queue = deque(seeds)
        while queue:
            u = queue.popleft()
            for nb, s in adjacency[u]:
                if nb not in sign:
                    sign[nb] = sign[u] * s
                    queue.append(nb)

    conflicts = 0
    for u, edges in adjacency.items():
        for nb, s in edges:
            if u < nb and sign[u] * sign[nb] != s:
                conflicts += 1

    for j in unsigned:
        x[j] = sign[j] * abs(x[j])

    ambiguous = unanchored >= 2 or (unanchored >= 1 and bool(anchors))
    return conflicts, ambiguous


def extract(
    basis: MonomialBasis,
    groups: GroupStructure,
    phi_hat,
    system: PolynomialSystem,
) -> ExtractionReport:
    phi = np.asarray(phi_hat, dtype=float)
    if phi.shape != (basis.M,):
        raise DimensionMismatchError(f"phi_hat has shape {phi.shape}, expected ({basis.M},)")

    tol = settings.ZERO_TOL * (1.0 + float(np.linalg.norm(phi)))
    support = np.flatnonzero(group_norms(groups, phi) > tol)

    if groups.assumption1_holds:
        x = unlift(basis, phi)
        residual = float(np.linalg.norm(evaluate(system, x)))
        return ExtractionReport(x, support, ExtractionMethod.LINEAR, True, residual)

    x = np.zeros(basis.n)
    used: Set[ExtractionMethod] = set()
    unsigned: List[int] = []
    anchors: List[int] = []

    for j in support:
        j = int(j)
        if groups.linear_active(j):
            x[j] = phi[j]
            used.add(ExtractionMethod.LINEAR)
        else:
            root = _odd_root(basis, groups, phi, j, tol)
            if root is not None:
                x[j] = root
                used.add(ExtractionMethod.ODD_ROOT)
            else:
                x[j] = _even_magnitude(basis, groups, phi, j, tol)
                unsigned.append(j)
                used.add(ExtractionMethod.QUADRATIC_SIGN)
                continue
        if x[j] != 0.0:
            anchors.append(j)

    conflicts, ambiguous = 0, False
    if unsigned:
        nodes = sorted(set(unsigned) | set(anchors))
        adjacency = _bilinear_edges(basis, groups, phi, nodes, tol)
        conflicts, ambiguous = _resolve_signs(x, unsigned, anchors, adjacency)
        if conflicts:
            logger.info("⚠️ %d bilinear sign conflicts during extraction", conflicts)
        if ambiguous:
            logger.info("⚠️ Sign graph is disconnected; components anchored independently")

    if ExtractionMethod.QUADRATIC_SIGN in used:
        method = ExtractionMethod.QUADRATIC_SIGN
    elif ExtractionMethod.ODD_ROOT in used:
        method = ExtractionMethod.ODD_ROOT
    else:
        method = ExtractionMethod.LINEAR

    residual = float(np.linalg.norm(evaluate(system, x)))
    return ExtractionReport(
        x_hat=x,
        support=support,
        method_used=method,
        sign_consistent=conflicts == 0,
        verify_residual=residual,
        disconnected_sign_graph=ambiguous,
        sign_conflicts=conflicts,
    )


def verify(system: PolynomialSystem, x_hat, tol: float) -> Tuple[bool, float]:
    residual = float(np.linalg.norm(evaluate(system, x_hat)))
    return residual <= tol * (1.0 + float(np.linalg.norm(system.y))), residual
