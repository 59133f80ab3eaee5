import numpy as np
import pytest

from common.errors import DimensionMismatchError, NegativeEvenPowerError
from extract.extraction import ExtractionMethod, extract, verify
from grouping.groups import build_groups
from poly.basis import enumerate_basis, lift
from poly.system import PolynomialSystem


def _pure_nonlinear(rng, n, d, N=6):
    basis = enumerate_basis(n, d)
    A = rng.standard_normal((N, basis.M))
    A[:, :n] = 0.0
    system = PolynomialSystem(basis, A, np.zeros(N), np.zeros(N))
    return basis, build_groups(basis, A), system


def test_linear_readout(demo_system):
    basis = demo_system.basis
    groups = build_groups(basis, demo_system.A)
    report = extract(basis, groups, lift(basis, [1.0, 0.0]), demo_system)
    assert report.method_used == ExtractionMethod.LINEAR
    assert report.x_hat.tolist() == [1.0, 0.0]
    assert report.support.tolist() == [0]
    assert report.sign_consistent
    assert report.verify_residual == pytest.approx(0.0, abs=1e-12)


def test_odd_root_from_cube(rng):
    basis, groups, system = _pure_nonlinear(rng, 1, 4)
    phi = np.zeros(basis.M)
    phi[basis.power_column(0, 3)] = 8.0
    phi[basis.power_column(0, 2)] = 4.0
    phi[basis.power_column(0, 4)] = 16.0
    report = extract(basis, groups, phi, system)
    assert report.method_used == ExtractionMethod.ODD_ROOT
    assert report.x_hat[0] == pytest.approx(2.0)


def test_odd_root_keeps_sign(rng):
    basis, groups, system = _pure_nonlinear(rng, 3, 3)
    x = np.array([-1.5, 0.0, 0.7])
    report = extract(basis, groups, lift(basis, x), system)
    assert np.allclose(report.x_hat, x)
    assert report.support.tolist() == [0, 2]


def test_quadratic_sign_propagation(rng):
    basis, groups, system = _pure_nonlinear(rng, 2, 2)
    phi = np.zeros(basis.M)
    phi[basis.column([2, 0])] = 1.0
    phi[basis.column([0, 2])] = 1.0
    phi[basis.column([1, 1])] = -1.0
    report = extract(basis, groups, phi, system)
    assert report.method_used == ExtractionMethod.QUADRATIC_SIGN
    assert report.x_hat.tolist() == [1.0, -1.0]
    assert report.sign_consistent
    assert not report.disconnected_sign_graph


def test_pure_quadratic_round_trip_up_to_sign(rng):
    basis, groups, system = _pure_nonlinear(rng, 5, 2)
    for _ in range(20):
        x = rng.choice([-1.0, 1.0], size=5) * (0.5 + rng.random(5))
        x[rng.random(5) < 0.4] = 0.0
        x_hat = extract(basis, groups, lift(basis, x), system).x_hat
        assert min(np.linalg.norm(x_hat - x), np.linalg.norm(x_hat + x)) <= 1e-9


def test_disconnected_components_are_flagged(rng):
    basis, groups, system = _pure_nonlinear(rng, 2, 2)
    phi = np.zeros(basis.M)
    phi[basis.column([2, 0])] = 4.0
    phi[basis.column([0, 2])] = 9.0
    report = extract(basis, groups, phi, system)
    assert report.x_hat.tolist() == [2.0, 3.0]
    assert report.disconnected_sign_graph


def test_conflicting_bilinear_signs_clear_consistency(rng):
    basis, groups, system = _pure_nonlinear(rng, 3, 2)
    x = np.array([1.0, 1.0, 1.0])
    phi = lift(basis, x)
    phi[basis.column([0, 1, 1])] = -1.0  # x2*x3 disagrees with x1*x2 and x1*x3
    report = extract(basis, groups, phi, system)
    assert not report.sign_consistent
    assert report.sign_conflicts == 1


def test_negative_even_power_raises(rng):
    basis, groups, system = _pure_nonlinear(rng, 2, 2)
    phi = np.zeros(basis.M)
    phi[basis.column([2, 0])] = -1.0
    with pytest.raises(NegativeEvenPowerError):
        extract(basis, groups, phi, system)


def test_shape_checked(demo_system):
    groups = build_groups(demo_system.basis, demo_system.A)
    with pytest.raises(DimensionMismatchError):
        extract(demo_system.basis, groups, np.zeros(3), demo_system)


def test_verify(demo_system):
    ok, residual = verify(demo_system, [1.0, 0.0], 1e-9)
    assert ok and residual == pytest.approx(0.0, abs=1e-12)
    ok, residual = verify(demo_system, [0.0, 0.0], 1e-6)
    assert not ok and residual == pytest.approx(np.sqrt(5.0))
    # relaxed tolerance admits a noisy estimate
    ok, _ = verify(demo_system, [1.0, 0.0001], 1e-3)
    assert ok
