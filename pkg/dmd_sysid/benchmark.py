# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Test systems with known flows.

The block benchmark x' = F x with

    F = [[0, 2 D], [0, -D/2]],  D = diag(0, 1, ..., N-1)

has the closed-form flow

    exp(tF) = [[I, 4 (I - exp(-tD/2))], [0, exp(-tD/2)]]

and reaches at most an N-dimensional subspace of R^{2N} from any initial value.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import InputError
from .linalg import Matrix, Vector, krylov_matrix, numerical_rank

DAMPING = 0.05
FREQUENCY_SPACING = 0.4
REAL_DECAY = 0.5


@dataclass(frozen=True)
class BenchmarkSystem:
    n_blocks: int
    f: Matrix

    @property
    def n(self) -> int:
        return 2 * self.n_blocks

    @property
    def default_x0(self) -> Vector:
        return np.arange(1, self.n + 1, dtype=np.float64)

    def _decay(self, t: float) -> Matrix:
        return np.diag(np.exp(-0.5 * t * np.arange(self.n_blocks, dtype=np.float64)))

    def flow(self, t: float) -> Matrix:
        identity = np.eye(self.n_blocks)
        decay = self._decay(t)
        return np.block(
            [
                [identity, 4.0 * (identity - decay)],
                [np.zeros((self.n_blocks, self.n_blocks)), decay],
            ]
        )

    def flow_trajectory(self, x0: Vector, h: float, steps: int) -> Matrix:
        """Columns flow(i h) x0 for i = 0..steps, each from the closed form."""
        return np.column_stack([self.flow(i * h) @ x0 for i in range(steps + 1)])

    def krylov_rank(self, x0: Vector, rank_tol: float | None = None) -> int:
        """Dimension of the reachable space span{x0, F x0, ..., F^{2N-1} x0}."""
        return numerical_rank(krylov_matrix(self.f, x0, self.n), rank_tol)


def build_benchmark_system(n_blocks: int) -> BenchmarkSystem:
    if n_blocks < 1:
        raise InputError(f"block size must be at least 1, got {n_blocks}")
    delta = np.diag(np.arange(n_blocks, dtype=np.float64))
    zeros = np.zeros((n_blocks, n_blocks))
    f = np.block([[zeros, 2.0 * delta], [zeros, -0.5 * delta]])
    return BenchmarkSystem(n_blocks=n_blocks, f=f)


def random_stable_system(n: int, seed: int) -> tuple[Matrix, Vector]:
    """Seeded dense stable system F = Q B Q^T and initial value x0.

    B is block-diagonal with damped rotations at distinct, evenly spaced
    frequencies (plus one real decay for odd n), Q is a random orthogonal matrix.
    (F, x0) is controllable with probability one and long trajectories give
    well-conditioned snapshot matrices.
    """
    if n < 1:
        raise InputError(f"dimension must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))

    blocks = [
        np.array([[-DAMPING, omega], [-omega, -DAMPING]])
        for omega in FREQUENCY_SPACING * np.arange(1, n // 2 + 1)
    ]
    if n % 2:
        blocks.append(np.array([[-REAL_DECAY]]))

    f = q @ scipy.linalg.block_diag(*blocks) @ q.T
    x0 = rng.standard_normal(n)
    return f, x0
