"""
Recovery, uniqueness and stability certificates.

Every condition is an inequality on the sparsity level k built from the mutual coherence mu
and the basis sizes (n, d, M, m). Left-hand sides that are integer counts are computed with
exact binomials; right-hand sides are floats, with mu = 0 mapped to +inf. Strict inequalities
are tested without slack.

A certificate can only confirm the inequality. Statements such as "the relaxation returns
lift(x0)" remain conditional on x0 being the unique sparsest solution.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from analysis.coherence import mutual_coherence
from common.errors import ZeroColumnError
from config import settings
from extract.extraction import extract, verify
from grouping.groups import GroupStructure, build_groups, group_norms
from poly.basis import group_size, monomial_count, unlift
from poly.system import PolynomialSystem

logger = logging.getLogger(__name__)

CHECK_ORDER = [
    "Thm1",
    "Thm3",
    "Cor1",
    "Thm4",
    "Thm7",
    "Thm8",
    "Prop2Applicable",
    "Thm5Noise",
    "Thm6Noise",
]


@dataclass
class Check:
    holds: bool
    lhs: float
    rhs: float


@dataclass
class StabilityBounds:
    l1_bound: Optional[float] = None
    group_bound: Optional[float] = None


@dataclass
class RecoveryCertificate:
    mu: float
    n: int
    d: int
    M: int
    m: int
    k: int
    epsilon: float
    checks: Dict[str, Check]
    stability_bounds: Optional[StabilityBounds] = None
    truncated: bool = False
    assumption1: bool = True
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu": self.mu,
            "n": self.n,
            "d": self.d,
            "M": self.M,
            "m": self.m,
            "k": self.k,
            "epsilon": self.epsilon,
            "truncated": self.truncated,
            "assumption1": self.assumption1,
            "checks": {
                name: {"holds": c.holds, "lhs": _json_number(c.lhs), "rhs": _json_number(c.rhs)}
                for name, c in self.checks.items()
            },
            "stability_bounds": (
                {k: _json_number(v) for k, v in asdict(self.stability_bounds).items()}
                if self.stability_bounds
                else None
            ),
            "notes": list(self.notes),
        }


@dataclass
class PosterioriCheck:
    check: Check
    support_count: int
    mu: float
    m: int
    verified: bool
    phi_unique: bool
    x_unique: bool


@dataclass
class SparsityBounds:
    n: int
    d: int
    k: int
    M: int
    prop1_rhs: float
    exact_lifted: int
    exact_ratio: float
    prop1_holds: bool
    prop2_applicable: bool
    prop2_rhs: Optional[float] = None
    prop2_holds: Optional[bool] = None


def _json_number(value):
    if value is None:
        return None
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def lifted_support_size(k: int, d: int) -> int:
    """Nonzero entries of lift(x) when ||x||_0 = k: sum_q C(k+q-1, q)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    return sum(math.comb(k + q - 1, q) for q in range(1, d + 1))


def _inverse(mu: float) -> float:
    return math.inf if mu == 0.0 else 1.0 / mu


def evaluate_conditions(
    mu: float, n: int, d: int, M: int, m: int, k: int, epsilon: float = 0.0
) -> RecoveryCertificate:
    """Evaluate every certificate inequality from (mu, n, d, M, m, k, epsilon)."""
    if k < 0 or epsilon < 0:
        raise ValueError("k and epsilon must be nonnegative")
    inv = _inverse(mu)
    inv_sq = math.inf if mu == 0.0 else 1.0 / (mu * mu)

    checks: Dict[str, Check] = {}
    rhs1 = n / (2.0 * M) * (1.0 + inv)
    checks["Thm1"] = Check(k < rhs1, k, rhs1)

    rhs3 = 1.0 / (2.0 * math.sqrt(m)) * math.sqrt(1.0 + inv_sq)
    checks["Thm3"] = Check(k < rhs3, k, rhs3)
    checks["Cor1"] = Check(k < rhs3, k, rhs3)
    # a priori form of the a posteriori test: k stands for the group support count
    checks["Thm4"] = Check(k < rhs3, k, rhs3)

    lhs7 = lifted_support_size(k, d)
    rhs7 = 0.5 * (1.0 + inv)
    checks["Thm7"] = Check(lhs7 <= rhs7, lhs7, rhs7)

    lhs8 = math.comb(k + d - 1, d)
    rhs8 = (1.0 + inv) / (2.0 * d)
    checks["Thm8"] = Check(lhs8 <= rhs8, lhs8, rhs8)

    needed = d * (k + d)
    checks["Prop2Applicable"] = Check(d >= 3 and n >= needed, n, needed)

    rhs5 = n / (4.0 * M) * (1.0 + inv)
    checks["Thm5Noise"] = Check(k < rhs5, k, rhs5)

    rhs6 = (1.0 + inv) / (4.0 * n * M)
    checks["Thm6Noise"] = Check(k < rhs6, k, rhs6)

    bounds = None
    if checks["Thm5Noise"].holds or checks["Thm6Noise"].holds:
        bounds = StabilityBounds()
        eps_sq = epsilon * epsilon
        if checks["Thm5Noise"].holds:
            bounds.l1_bound = 4.0 * eps_sq / (1.0 - mu * (4.0 * M * k / n - 1.0))
        if checks["Thm6Noise"].holds:
            bounds.group_bound = 4.0 * n * eps_sq / (1.0 - mu * (4.0 * n * M * k - 1.0))

    return RecoveryCertificate(
        mu=mu, n=n, d=d, M=M, m=m, k=k, epsilon=epsilon, checks=checks, stability_bounds=bounds
    )


def _effective(system: PolynomialSystem, allow_truncation: bool):
    structure = build_groups(system.basis, system.A)
    notes: List[str] = []
    if structure.truncated:
        zero = structure.zero_columns
        linear = bool(np.any(zero < system.n))
        if not allow_truncation:
            raise ZeroColumnError(zero.tolist(), linear=linear)
        notes.append(
            f"{zero.size} zero columns removed; conditions use M~={structure.active_columns.size} "
            f"and m~=max_j |I_j ∩ active|={int(structure.truncated_sizes.max())}"
        )
        if linear:
            notes.append(
                "linear columns are zero: x must be recovered by pure-nonlinear extraction"
            )
        M_eff = int(structure.active_columns.size)
        m_eff = int(structure.truncated_sizes.max())
    else:
        M_eff = system.M
        m_eff = group_size(system.n, system.d)
    mu = mutual_coherence(system.A[:, structure.active_columns])
    return structure, mu, M_eff, m_eff, notes


def certify(
    system: PolynomialSystem, k: int, epsilon: float = 0.0, allow_truncation: bool = False
) -> RecoveryCertificate:
    structure, mu, M_eff, m_eff, notes = _effective(system, allow_truncation)
    cert = evaluate_conditions(mu, system.n, system.d, M_eff, m_eff, int(k), float(epsilon))
    cert.truncated = structure.truncated
    cert.assumption1 = structure.assumption1_holds
    cert.notes.extend(notes)
    cert.notes.append(
        "conditions certify recovery of lift(x0) only when x0 is the unique sparsest solution"
    )
    logger.debug("Certificate: mu=%.6g M=%d m=%d k=%d", mu, M_eff, m_eff, k)
    return cert


def _x_from_phi(
    system: PolynomialSystem, structure: GroupStructure, phi: np.ndarray
) -> np.ndarray:
    if structure.assumption1_holds:
        return unlift(system.basis, phi)
    return extract(system.basis, structure, phi, system).x_hat


def certify_posteriori(
    system: PolynomialSystem,
    phi_hat,
    verified: Optional[bool] = None,
    allow_truncation: bool = False,
) -> PosterioriCheck:
    """Group-support test on an estimate, chained with polynomial verification."""
    phi = np.asarray(phi_hat, dtype=float)
    structure, mu, _, m_eff, _ = _effective(system, allow_truncation)
    tol = settings.ZERO_TOL * (1.0 + float(np.linalg.norm(phi)))
    count = int(np.count_nonzero(group_norms(structure, phi) > tol))
    inv_sq = math.inf if mu == 0.0 else 1.0 / (mu * mu)
    rhs = 1.0 / (2.0 * math.sqrt(m_eff)) * math.sqrt(1.0 + inv_sq)
    check = Check(count < rhs, count, rhs)

    if verified is None:
        verified, _ = verify(system, _x_from_phi(system, structure, phi), settings.VERIFY_TOL)
    return PosterioriCheck(
        check=check,
        support_count=count,
        mu=mu,
        m=m_eff,
        verified=bool(verified),
        phi_unique=check.holds,
        x_unique=check.holds and bool(verified),
    )


def sparsity_ratio_bounds(n: int, d: int, k: int) -> SparsityBounds:
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, n] (got k={k}, n={n})")
    M = monomial_count(n, d)
    exact = lifted_support_size(k, d)
    ratio = exact / M
    prop1 = k / n
    applicable = d >= 3 and n >= d * (k + d)
    bounds = SparsityBounds(
        n=n,
        d=d,
        k=k,
        M=M,
        prop1_rhs=prop1,
        exact_lifted=exact,
        exact_ratio=ratio,
        prop1_holds=ratio <= prop1,
        prop2_applicable=applicable,
    )
    if applicable:
        bounds.prop2_rhs = 2.0 * k / (d * n)
        bounds.prop2_holds = ratio <= bounds.prop2_rhs
    return bounds


def ega_uniqueness(result) -> bool:
    """True when an enumerate-all exact greedy run found exactly one verified support.

    Such an x_hat is the sparsest solution of the polynomial system.
    """
    solutions = getattr(result, "all_solutions", None)
    if solutions is None or result.infeasible:
        return False
    return len(solutions) == 1 and bool(result.verified)


def format_certificate(cert: RecoveryCertificate) -> str:
    header = (
        f"Recovery certificate (n={cert.n}, d={cert.d}, M={cert.M}, m={cert.m}, "
        f"k={cert.k}, eps={cert.epsilon:g})"
    )
    mu_line = f"  mutual coherence mu = {cert.mu:.6g}"
    if cert.mu == 0:
        mu_line += "  [mu = 0: every coherence bound is +inf]"
    lines = [header, mu_line]
    if cert.truncated:
        lines.append("  truncated matrix: zero columns removed")
    for name in CHECK_ORDER:
        c = cert.checks[name]
        mark = "✅" if c.holds else "❌"
        lines.append(f"  {mark} {name:<16} lhs={_fmt(c.lhs):>12}  rhs={_fmt(c.rhs):>12}")
    if cert.stability_bounds:
        sb = cert.stability_bounds
        if sb.l1_bound is not None:
            lines.append(f"  l1 stability bound:    ||phi_hat - phi0||^2 <= {_fmt(sb.l1_bound)}")
        if sb.group_bound is not None:
            lines.append(
                f"  group stability bound: ||phi_hat - phi0||^2 <= {_fmt(sb.group_bound)}"
            )
    for note in cert.notes:
        lines.append(f"  note: {note}")
    return "\n".join(lines)


def _fmt(value: float) -> str:
    return "inf" if math.isinf(value) else f"{value:.6g}"
