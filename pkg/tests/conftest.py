import numpy as np
import pytest
import scipy.linalg

from dmd_sysid.benchmark import random_stable_system
from dmd_sysid.linalg import Matrix, Vector
from dmd_sysid.trajectory import TrajectoryData


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_orthogonal(rng: np.random.Generator, n: int) -> Matrix:
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return q


def random_with_rank(rng: np.random.Generator, rows: int, cols: int, rank: int) -> Matrix:
    """rows x cols matrix with exactly ``rank`` singular values, all in [1, 10]."""
    u = random_orthogonal(rng, rows)[:, :rank]
    v = random_orthogonal(rng, cols)[:, :rank]
    s = 10.0 ** rng.uniform(0.0, 1.0, rank)
    return (u * s) @ v.T


def random_well_conditioned(rng: np.random.Generator, n: int) -> Matrix:
    """Orthogonal times a diagonal with entries in [0.5, 1.5] (in modulus)."""
    d = rng.uniform(0.5, 1.5, n) * rng.choice([-1.0, 1.0], n)
    return random_orthogonal(rng, n) @ np.diag(d) @ random_orthogonal(rng, n).T


def random_discrete_system(rng: np.random.Generator, n: int) -> tuple[Matrix, Vector]:
    """A = S exp(F / 2) S^-1 for a random stable F with well separated
    frequencies and a well-conditioned S, and a random initial value."""
    f, _ = random_stable_system(n, int(rng.integers(2**31)))
    s = random_well_conditioned(rng, n)
    a = s @ scipy.linalg.expm(0.5 * f) @ np.linalg.inv(s)
    return a, rng.standard_normal(n)


def discrete_trajectory(a: Matrix, x0: Vector, m: int, h: float = 1.0) -> TrajectoryData:
    states = [x0]
    for _ in range(m):
        states.append(a @ states[-1])
    return TrajectoryData(np.column_stack(states), h, "discrete")
