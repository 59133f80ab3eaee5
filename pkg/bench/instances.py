"""
Random polynomial systems for Monte Carlo experiments.

Current Implementation:
- x0 has its first k entries set to 1 and the rest at 0
- A and b have independent standard Gaussian entries
- Optional Gaussian noise rescaled to an exact Euclidean norm
- Pure-nonlinear variant (linear monomial columns zeroed) and phase retrieval variant
  (y_i = (c_i^T x)^2, b = 0)

Architecture:
- Counter-based RNG: every (seed, trial, stream) triple owns an independent Philox generator,
  so trials can run in any order or thread and still draw the same numbers
- Gaussians come from the Box-Muller transform over the generator's uniforms
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from common.dispatch import resolve_method
from common.errors import UnknownMethodError
from poly.basis import enumerate_basis, lift
from poly.system import PolynomialSystem

STREAM_A = 0
STREAM_B = 1
STREAM_NOISE = 2
STREAM_C = 3

UINT64_MAX = 2**64 - 1


class ExperimentSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    experiment_id: str = "custom"
    n: int = Field(ge=1)
    d: int = Field(ge=1)
    N: int = Field(ge=1)
    k: int = Field(ge=0)
    trials: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0, le=UINT64_MAX)
    noise_epsilon: float = Field(default=0.0, ge=0.0)
    solver_epsilon: Optional[float] = Field(default=None, ge=0.0)
    pure_nonlinear: bool = False
    phase_retrieval: bool = False
    methods: List[str] = Field(default_factory=lambda: ["irl1l2"], min_length=1)
    success_tol: float = Field(default=1e-6, gt=0.0)
    max_support: Optional[int] = Field(default=None, ge=0)
    time_budget_s: Optional[float] = Field(default=None, gt=0.0)
    record_timing: bool = False

    @field_validator("methods")
    @classmethod
    def _known_methods(cls, methods: List[str]) -> List[str]:
        try:
            return [resolve_method(m) for m in methods]
        except UnknownMethodError as exc:
            raise ValueError(str(exc)) from exc

    @model_validator(mode="after")
    def _consistent(self) -> "ExperimentSpec":
        if self.k > self.n:
            raise ValueError(f"k={self.k} exceeds n={self.n}")
        if self.phase_retrieval and self.d != 2:
            raise ValueError("phase retrieval instances are quadratic: set d=2")
        return self

    @property
    def configured_epsilon(self) -> float:
        """Epsilon handed to the solvers; defaults to the true noise level."""
        return self.noise_epsilon if self.solver_epsilon is None else self.solver_epsilon

    @property
    def sign_invariant(self) -> bool:
        return self.pure_nonlinear or self.phase_retrieval


def trial_generator(seed: int, trial_index: int, stream: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(trial_index, stream))
    return np.random.Generator(np.random.Philox(sequence))


def gaussian(generator: np.random.Generator, shape) -> np.ndarray:
    """Standard normal samples by Box-Muller, both branches used, row-major fill."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    count = int(np.prod(shape, dtype=np.int64))
    half = (count + 1) // 2
    u1 = 1.0 - generator.random(half)  # (0, 1]
    u2 = generator.random(half)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    samples = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return samples[:count].reshape(shape)


def phase_retrieval_matrix(basis, C: np.ndarray) -> np.ndarray:
    """Rows expand (c_i^T x)^2 over the quadratic monomials; other columns stay zero."""
    A = np.zeros((C.shape[0], basis.M))
    quad = np.flatnonzero(basis.degrees == 2)
    exps = basis.exponents[quad]
    monomials = np.prod(np.power(C[:, None, :], exps[None, :, :]), axis=2)
    coef = np.where(exps.max(axis=1) == 2, 1.0, 2.0)
    A[:, quad] = monomials * coef
    return A


def generate_instance(
    spec: ExperimentSpec, trial_index: int
) -> Tuple[PolynomialSystem, np.ndarray, np.ndarray]:
    """Build trial `trial_index` of `spec`: returns (system, x0, e)."""
    basis = enumerate_basis(spec.n, spec.d)
    x0 = np.zeros(spec.n)
    x0[: spec.k] = 1.0

    if spec.phase_retrieval:
        C = gaussian(trial_generator(spec.seed, trial_index, STREAM_C), (spec.N, spec.n))
        A = phase_retrieval_matrix(basis, C)
        b = np.zeros(spec.N)
    else:
        A = gaussian(trial_generator(spec.seed, trial_index, STREAM_A), (spec.N, basis.M))
        b = gaussian(trial_generator(spec.seed, trial_index, STREAM_B), spec.N)
        if spec.pure_nonlinear:
            A[:, : spec.n] = 0.0

    e = np.zeros(spec.N)
    if spec.noise_epsilon > 0:
        g = gaussian(trial_generator(spec.seed, trial_index, STREAM_NOISE), spec.N)
        e = g * (spec.noise_epsilon / np.linalg.norm(g))

    y = A @ lift(basis, x0) + b + e
    return PolynomialSystem(basis, A, b, y), x0, e
