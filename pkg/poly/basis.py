"""
Monomial basis enumeration and the lifting map.

The basis holds every multi-index alpha with 1 <= |alpha| <= d over n variables, ordered by
total degree and, inside one degree, lexicographically on the exponent vectors from the
largest power of x1 downwards. For (n=2, d=2) this is [x1, x2, x1^2, x1*x2, x2^2]; the first
n entries are always the unit multi-indexes, so unlift is a plain slice.

Counting uses Python integers checked against the signed 64-bit index range.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple

import numpy as np

from common.errors import BasisOverflowError, DimensionMismatchError
from config import settings

logger = logging.getLogger(__name__)

INDEX_MAX = 2**63 - 1

MultiIndex = Tuple[int, ...]


def _checked(value: int, what: str) -> int:
    if value > INDEX_MAX:
        raise BasisOverflowError(f"{what} = {value} overflows the 64-bit index type")
    return value


def _binom(a: int, b: int) -> int:
    # C(a, 0) = 1 for every a, including the a = -1 case produced by n = 1
    if b == 0:
        return 1
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def _require_positive(n: int, d: int) -> None:
    if int(n) < 1 or int(d) < 1:
        raise ValueError(f"n and d must be positive integers (got n={n}, d={d})")


def monomial_count(n: int, d: int) -> int:
    """Number of monomials of degree 1..d in n variables: sum_q C(n+q-1, q)."""
    _require_positive(n, d)
    total = 0
    for q in range(1, d + 1):
        total = _checked(total + _checked(_binom(n + q - 1, q), "C(n+q-1, q)"), "M")
    return total


def group_size(n: int, d: int) -> int:
    """Number of monomials that involve one given variable."""
    _require_positive(n, d)
    total = 0
    for q in range(d):
        total = _checked(total + (d - q) * _binom(n + q - 2, q), "m")
    return total


def group_size_alt(n: int, d: int) -> int:
    """Second closed form for the group size, sum_q q/(n-1) C(n+q-2, q); needs n >= 2."""
    _require_positive(n, d)
    if n < 2:
        raise ValueError("the alternate group-size formula is undefined for n = 1")
    total = Fraction(0)
    for q in range(1, d + 1):
        total += Fraction(q, n - 1) * _binom(n + q - 2, q)
    if total.denominator != 1:
        raise ArithmeticError(f"alternate group-size formula is not integral: {total}")
    return _checked(int(total), "m")


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    n: int
    d: int
    exponents: np.ndarray
    _lookup: Dict[MultiIndex, int] = field(repr=False, compare=False, default_factory=dict)

    @property
    def M(self) -> int:
        return int(self.exponents.shape[0])

    @property
    def indexes(self) -> List[MultiIndex]:
        return [tuple(int(v) for v in row) for row in self.exponents]

    @property
    def degrees(self) -> np.ndarray:
        return self.exponents.sum(axis=1)

    def __len__(self) -> int:
        return self.M

    def column(self, alpha: Sequence[int]) -> int:
        """Column index of a multi-index in the canonical order."""
        key = tuple(int(a) for a in alpha)
        if len(key) != self.n:
            raise DimensionMismatchError(
                f"multi-index {list(key)} has length {len(key)}, expected {self.n}"
            )
        try:
            return self._lookup[key]
        except KeyError:
            raise KeyError(f"multi-index {list(key)} is not in the degree-{self.d} basis") from None

    def power_column(self, j: int, p: int) -> int:
        """Column of x_j^p, or -1 when p exceeds d."""
        if p < 1 or p > self.d:
            return -1
        alpha = [0] * self.n
        alpha[j] = p
        return self._lookup[tuple(alpha)]

    def label(self, k: int) -> str:
        parts = []
        for j, e in enumerate(self.exponents[k]):
            if e == 1:
                parts.append(f"x{j + 1}")
            elif e > 1:
                parts.append(f"x{j + 1}^{int(e)}")
        return "*".join(parts)


def enumerate_basis(n: int, d: int) -> MonomialBasis:
    M = monomial_count(n, d)
    if M > settings.MAX_BASIS_SIZE:
        raise BasisOverflowError(
            f"basis for n={n}, d={d} has {M} columns, "
            f"above MAX_BASIS_SIZE={settings.MAX_BASIS_SIZE}"
        )

    exponents = np.zeros((M, n), dtype=np.int64)
    row = 0
    for q in range(1, d + 1):
        for combo in combinations_with_replacement(range(n), q):
            for var in combo:
                exponents[row, var] += 1
            row += 1
    exponents.setflags(write=False)

    lookup = {tuple(int(v) for v in r): k for k, r in enumerate(exponents)}
    logger.debug("Enumerated monomial basis n=%d d=%d M=%d", n, d, M)
    return MonomialBasis(n=int(n), d=int(d), exponents=exponents, _lookup=lookup)


def lift(basis: MonomialBasis, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (basis.n,):
        raise DimensionMismatchError(f"x has shape {x.shape}, expected ({basis.n},)")
    return np.prod(np.power(x[None, :], basis.exponents), axis=1)


def unlift(basis: MonomialBasis, phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (basis.M,):
        raise DimensionMismatchError(f"phi has shape {phi.shape}, expected ({basis.M},)")
    return phi[: basis.n].copy()
