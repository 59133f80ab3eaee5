import os

import numpy as np
import pytest
from scipy.linalg import null_space
from scipy.stats import ortho_group

from data.system_io import load_system
from poly.basis import enumerate_basis, lift
from poly.system import PolynomialSystem

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(__file__)), "data")
DEMO_SYSTEM = os.path.join(DATA_DIR, "demo_system.json")


def pytest_collection_modifyitems(config, items):
    if os.getenv("RUN_SLOW") == "1":
        return
    skip_slow = pytest.mark.skip(reason="set RUN_SLOW=1 to run the Monte Carlo acceptance checks")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def demo_path():
    return DEMO_SYSTEM


@pytest.fixture
def demo_system():
    """x1 + x1^2 = 2, x2 + x1*x2 = 0, x1 + x2 + x2^2 = 1; solved by x = (1, 0)."""
    return load_system(DEMO_SYSTEM)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_system(rng, n, d, N, x0, pure_nonlinear=False, b_zero=False):
    basis = enumerate_basis(n, d)
    A = rng.standard_normal((N, basis.M))
    if pure_nonlinear:
        A[:, :n] = 0.0
    b = np.zeros(N) if b_zero else rng.standard_normal(N)
    y = A @ lift(basis, np.asarray(x0, dtype=float)) + b
    return PolynomialSystem(basis, A, b, y)


@pytest.fixture
def make_system(rng):
    def factory(n, d, N, x0, **kwargs):
        return random_system(rng, n, d, N, x0, **kwargs)

    return factory


def frame_system(rng, n, d, x0):
    """M-1 equations whose columns form a scaled simplex frame.

    mu(A) = 1/(M-1) and Ker(A) is spanned by a single vector with no zero entry, so
    recovery of lift(x0) can be checked against the coherence conditions exactly.
    """
    basis = enumerate_basis(n, d)
    M = basis.M
    simplex = null_space(np.ones((1, M))).T
    rotation = ortho_group.rvs(M - 1, random_state=rng) if M > 2 else np.eye(M - 1)
    A = rotation @ simplex * rng.uniform(0.5, 2.0, size=M)
    b = rng.standard_normal(M - 1)
    y = A @ lift(basis, np.asarray(x0, dtype=float)) + b
    return PolynomialSystem(basis, A, b, y)


@pytest.fixture
def make_frame(rng):
    def factory(n, d, x0):
        return frame_system(rng, n, d, x0)

    return factory
