"""
Polynomial systems over a monomial basis.

This module contains:
- Graded multi-index basis enumeration with checked counting
- The lifting map x -> phi(x) and its linear inverse
- The dense PolynomialSystem container and residual evaluation
"""

from poly.basis import (
    MonomialBasis,
    enumerate_basis,
    group_size,
    group_size_alt,
    lift,
    monomial_count,
    unlift,
)
from poly.system import PolynomialSystem, evaluate

__all__ = [
    "MonomialBasis",
    "PolynomialSystem",
    "enumerate_basis",
    "evaluate",
    "group_size",
    "group_size_alt",
    "lift",
    "monomial_count",
    "unlift",
]
