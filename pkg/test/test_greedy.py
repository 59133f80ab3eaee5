from itertools import combinations

import numpy as np
import pytest

from analysis.certificates import ega_uniqueness
from common.errors import GreedyBudgetError
from greedy.search import GreedyConfig, aga, ega, least_squares_min_norm, support_columns
from poly.basis import enumerate_basis, lift
from poly.system import PolynomialSystem


def _brute_force_support(system, threshold):
    rhs = system.rhs
    for size in range(1, system.n + 1):
        for combo in combinations(range(system.n), size):
            cols = support_columns(system.basis, combo)
            _, res = least_squares_min_norm(system.A[:, cols], rhs)
            if res <= threshold:
                return list(combo)
    return None


def test_least_squares_small_example():
    phi, res = least_squares_min_norm([[1.0], [1.0]], [1.0, 3.0])
    assert phi.tolist() == pytest.approx([2.0])
    assert res == pytest.approx(2.0)


def test_least_squares_minimum_norm_on_rank_deficiency():
    phi, res = least_squares_min_norm([[1.0, 1.0]], [2.0])
    assert phi.tolist() == pytest.approx([1.0, 1.0])
    assert res == pytest.approx(0.0, abs=1e-20)
    with pytest.raises(ValueError):
        least_squares_min_norm(np.zeros((2, 0)), [1.0, 1.0])


def test_support_columns():
    basis = enumerate_basis(2, 2)
    assert support_columns(basis, [0]).tolist() == [0, 2]
    assert support_columns(basis, [1]).tolist() == [1, 4]
    assert support_columns(basis, [0, 1]).tolist() == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("search", [ega, aga])
def test_demo_system(demo_system, search):
    result = search(demo_system, GreedyConfig(epsilon=0.0))
    assert result.support.tolist() == [0]
    assert np.allclose(result.x_hat, [1.0, 0.0])
    assert result.verified
    assert not result.infeasible and not result.nonterminating


def test_ega_stops_at_first_hit(demo_system):
    result = ega(demo_system)
    assert result.ls_solves == 1
    assert result.iterations == 1


def test_zero_right_hand_side_gives_empty_support():
    basis = enumerate_basis(3, 2)
    A = np.ones((4, basis.M))
    b = np.arange(4.0)
    system = PolynomialSystem(basis, A, b, b)
    for search in (ega, aga):
        result = search(system)
        assert result.support.size == 0
        assert not np.any(result.x_hat)
        assert result.verified


def test_ega_matches_brute_force(make_system, rng):
    for _ in range(10):
        x0 = np.zeros(4)
        x0[rng.choice(4, size=2, replace=False)] = 1.0
        system = make_system(4, 2, 12, x0)
        config = GreedyConfig()
        result = ega(system, config)
        floor = config.residual_floor * (1.0 + np.linalg.norm(system.rhs))
        expected = _brute_force_support(system, floor**2)
        assert result.support.tolist() == expected
        assert np.allclose(result.x_hat, x0, atol=1e-8)


def test_ega_infeasible_below_true_support(make_system):
    system = make_system(4, 2, 12, np.array([1.0, 1.0, 0.0, 0.0]))
    result = ega(system, GreedyConfig(max_support=1))
    assert result.infeasible
    assert result.residual_sq > 0
    assert result.ls_solves == 4


def test_ega_enumerates_all_minimal_supports():
    basis = enumerate_basis(2, 1)
    system = PolynomialSystem(basis, [[1.0, 1.0]], [0.0], [1.0])
    result = ega(system, GreedyConfig(enumerate_all=True))
    assert [s.tolist() for s in result.all_solutions] == [[0], [1]]
    assert not ega_uniqueness(result)


def test_ega_unique_sparsest(demo_system):
    result = ega(demo_system, GreedyConfig(enumerate_all=True))
    assert [s.tolist() for s in result.all_solutions] == [[0]]
    assert ega_uniqueness(result)


def test_ega_budget(make_system):
    system = make_system(4, 2, 12, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(GreedyBudgetError):
        ega(system, GreedyConfig(max_ls_solves=2))


def test_aga_history_and_cap(make_system):
    system = make_system(5, 2, 18, np.array([1.0, 0.0, 1.0, 0.0, 0.0]))
    capped = aga(system, GreedyConfig(max_support=1))
    assert capped.nonterminating
    assert len(capped.residual_history) == 1
    assert capped.support.size == 1

    full = aga(system)
    assert not full.nonterminating
    assert all(a >= b for a, b in zip(full.residual_history, full.residual_history[1:]))


def test_large_threshold_accepts_empty_support(demo_system):
    result = ega(demo_system, GreedyConfig(epsilon=10.0))
    assert result.support.size == 0
    assert result.ls_solves == 0


def _exhaustive_supports(system, config):
    """Every variable support within the cap whose least-squares residual meets the threshold."""
    floor = config.residual_floor * (1.0 + np.linalg.norm(system.rhs))
    threshold = config.epsilon + floor * floor
    cap = system.n if config.max_support is None else min(config.max_support, system.n)
    rhs = system.rhs
    if rhs @ rhs <= threshold:
        return [()], float(rhs @ rhs)
    best = float(rhs @ rhs)
    for size in range(1, cap + 1):
        hits = []
        for combo in combinations(range(system.n), size):
            cols = support_columns(system.basis, combo)
            _, res = least_squares_min_norm(system.A[:, cols], rhs)
            best = min(best, res)
            if res <= threshold:
                hits.append(combo)
        if hits:
            return hits, best
    return [], best


def _oracle_instance(rng, case):
    n = int(rng.integers(2, 9))
    basis = enumerate_basis(n, 2)
    k = int(rng.integers(1, min(n, 3) + 1))
    x0 = np.zeros(n)
    x0[rng.choice(n, size=k, replace=False)] = rng.uniform(0.5, 2.0, size=k) * rng.choice(
        [-1.0, 1.0], size=k
    )
    lifted_k = len(support_columns(basis, np.flatnonzero(x0)))
    if case == "infeasible":
        N = basis.M + 2
    else:
        N = int(rng.integers(lifted_k + 1, basis.M + 3))
    A = rng.standard_normal((N, basis.M))
    b = rng.standard_normal(N)
    y = A @ lift(basis, x0) + b
    config = GreedyConfig(enumerate_all=True)
    if case == "noisy":
        e = rng.standard_normal(N)
        e *= 0.5 / np.linalg.norm(e)
        y = y + e
        config = GreedyConfig(epsilon=(2 * 0.5) ** 2, enumerate_all=True)
    elif case == "infeasible":
        y = rng.standard_normal(N)
    elif case == "capped":
        config = GreedyConfig(max_support=k - 1, enumerate_all=True)
    return PolynomialSystem(basis, A, b, y), config


@pytest.mark.slow
def test_ega_matches_exhaustive_enumeration(rng):
    cases = ("noiseless", "noisy", "infeasible", "capped")
    for trial in range(200):
        system, config = _oracle_instance(rng, cases[trial % len(cases)])
        expected, best = _exhaustive_supports(system, config)
        result = ega(system, config)
        assert [tuple(s.tolist()) for s in result.all_solutions] == expected, trial
        assert result.infeasible == (not expected), trial
        if expected:
            assert result.support.size == len(expected[0])
            assert tuple(result.support.tolist()) == expected[0]
        else:
            assert result.residual_sq == pytest.approx(best, rel=1e-12)


@pytest.mark.parametrize("cap, solves", [(3, 5 + 4 + 3), (None, 5 + 4 + 3 + 2 + 1)])
def test_aga_least_squares_count(rng, cap, solves):
    # N > M and a random right-hand side: no support ever meets the threshold
    basis = enumerate_basis(5, 2)
    N = basis.M + 3
    system = PolynomialSystem(
        basis, rng.standard_normal((N, basis.M)), np.zeros(N), rng.standard_normal(N)
    )
    result = aga(system, GreedyConfig(max_support=cap))
    assert result.nonterminating
    assert result.iterations == (cap or 5)
    assert result.ls_solves == solves
    assert len(result.residual_history) == result.iterations
