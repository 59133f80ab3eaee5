import math

import numpy as np
import pytest

from common.errors import BasisOverflowError, DimensionMismatchError
from poly.basis import (
    enumerate_basis,
    group_size,
    group_size_alt,
    lift,
    monomial_count,
    unlift,
)
from poly.system import PolynomialSystem, evaluate


def test_basis_order_quadratic_two_variables():
    basis = enumerate_basis(2, 2)
    assert basis.indexes == [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert [basis.label(k) for k in range(basis.M)] == ["x1", "x2", "x1^2", "x1*x2", "x2^2"]


def test_basis_single_variable_chain():
    basis = enumerate_basis(1, 3)
    assert basis.indexes == [(1,), (2,), (3,)]


@pytest.mark.parametrize("n,d,M", [(2, 2, 5), (3, 2, 9), (5, 4, 125), (7, 1, 7), (20, 2, 230)])
def test_monomial_count(n, d, M):
    assert monomial_count(n, d) == M
    assert enumerate_basis(n, d).M == M


def test_first_n_columns_are_linear():
    basis = enumerate_basis(4, 3)
    assert np.array_equal(basis.exponents[:4], np.eye(4, dtype=np.int64))
    assert np.all(np.diff(basis.degrees) >= 0)


@pytest.mark.parametrize("n,d", [(0, 2), (2, 0), (-1, 3)])
def test_rejects_nonpositive_dimensions(n, d):
    with pytest.raises(ValueError):
        monomial_count(n, d)


def test_count_overflow_is_reported():
    with pytest.raises(BasisOverflowError):
        monomial_count(10**6, 40)


def test_basis_size_guard():
    with pytest.raises(BasisOverflowError):
        enumerate_basis(200, 6)


@pytest.mark.parametrize("n,d,m", [(2, 2, 3), (3, 2, 4), (1, 5, 5), (6, 1, 1)])
def test_group_size(n, d, m):
    assert group_size(n, d) == m
    basis = enumerate_basis(n, d)
    assert int(np.count_nonzero(basis.exponents[:, 0])) == m


def test_group_size_formulas_agree():
    for n in range(2, 31):
        for d in range(1, 9):
            assert group_size(n, d) == group_size_alt(n, d)


def test_group_size_alt_undefined_for_one_variable():
    with pytest.raises(ValueError):
        group_size_alt(1, 3)


def test_lift_examples():
    basis = enumerate_basis(2, 2)
    assert lift(basis, [2.0, 3.0]).tolist() == [2.0, 3.0, 4.0, 6.0, 9.0]
    assert lift(basis, [1.0, 0.0]).tolist() == [1.0, 0.0, 1.0, 0.0, 0.0]
    assert not np.any(lift(enumerate_basis(3, 4), np.zeros(3)))


def test_unlift_is_a_projection(rng):
    basis = enumerate_basis(2, 2)
    assert unlift(basis, [1, 2, 9, 9, 9]).tolist() == [1.0, 2.0]
    basis = enumerate_basis(4, 3)
    x = rng.standard_normal(4)
    assert np.allclose(unlift(basis, lift(basis, x)), x)


def test_lift_dimension_mismatch():
    basis = enumerate_basis(2, 2)
    with pytest.raises(DimensionMismatchError):
        lift(basis, [1.0, 2.0, 3.0])
    with pytest.raises(DimensionMismatchError):
        unlift(basis, [1.0, 2.0])


def test_zero_pattern_follows_variable_support(rng):
    basis = enumerate_basis(5, 3)
    for _ in range(20):
        x = rng.standard_normal(5)
        x[rng.random(5) < 0.5] = 0.0
        phi = lift(basis, x)
        for j in np.flatnonzero(x == 0):
            assert not np.any(phi[basis.exponents[:, j] > 0])


def test_lifted_vector_is_at_least_as_sparse(rng):
    for n, d in [(4, 2), (6, 3), (8, 2), (5, 4)]:
        basis = enumerate_basis(n, d)
        for _ in range(25):
            k = int(rng.integers(0, n + 1))
            x = np.zeros(n)
            x[rng.choice(n, size=k, replace=False)] = rng.standard_normal(k) + 3.0
            ratio = np.count_nonzero(lift(basis, x)) / basis.M
            assert ratio <= k / n + 1e-12


def test_lifted_vector_sparser_for_higher_degree(rng):
    n, d = 12, 3
    basis = enumerate_basis(n, d)
    for k in range(0, 2):
        assert n >= d * (k + d)
        x = np.zeros(n)
        x[:k] = 2.0
        ratio = np.count_nonzero(lift(basis, x)) / basis.M
        assert ratio <= 2.0 * k / (d * n) + 1e-12


def test_binomial_ratio_inequalities():
    for a in range(1, 25):
        for b in range(1, a + 1):
            for c in range(1, 7):
                assert math.comb(a + c - 1, c) / a >= math.comb(b + c - 1, c) / b
    for d in range(1, 5):
        for b in range(1, 6):
            for a in range(d * (b + d), d * (b + d) + 15):
                lhs = sum(math.comb(a + q - 1, q) for q in range(2, d + 1)) / a
                rhs = d / b * sum(math.comb(b + q - 1, q) for q in range(2, d + 1))
                assert lhs >= rhs


def test_system_validates_shapes():
    basis = enumerate_basis(2, 2)
    with pytest.raises(DimensionMismatchError):
        PolynomialSystem(basis, np.zeros((3, 4)), np.zeros(3), np.zeros(3))
    with pytest.raises(DimensionMismatchError):
        PolynomialSystem(basis, np.zeros((3, 5)), np.zeros(2), np.zeros(3))
    with pytest.raises(DimensionMismatchError):
        PolynomialSystem(basis, np.full((1, 5), np.nan), np.zeros(1), np.zeros(1))


def test_system_is_read_only():
    basis = enumerate_basis(2, 2)
    A = np.ones((2, 5))
    system = PolynomialSystem(basis, A, np.zeros(2), np.ones(2))
    A[0, 0] = 7.0
    assert system.A[0, 0] == 1.0
    with pytest.raises(ValueError):
        system.A[0, 0] = 3.0


def test_evaluate_residuals(make_system, rng):
    x0 = np.array([1.0, 0.0, -2.0])
    system = make_system(3, 2, 6, x0)
    assert np.allclose(evaluate(system, x0), 0.0, atol=1e-12)

    basis = enumerate_basis(3, 2)
    y = rng.standard_normal(4)
    blank = PolynomialSystem(basis, np.zeros((4, basis.M)), np.zeros(4), y)
    assert np.array_equal(evaluate(blank, rng.standard_normal(3)), y)


def test_demo_system_solution(demo_system):
    assert np.allclose(evaluate(demo_system, [1.0, 0.0]), 0.0)
    assert demo_system.N == 3 and demo_system.M == 5
