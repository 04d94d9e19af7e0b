# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Exact dynamic mode decomposition.

Given snapshots x_0, ..., x_m the DMD matrix is the minimum-norm solution
of min ||Z - M X||_F, i.e. A_dmd = Z X^+ = Z V Sigma^{-1} U^T, assembled
from the trimmed SVD X = U Sigma V^T.
"""

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .errors import DimensionMismatchError, InputError, InsufficientDataError
from .linalg import Matrix, TrimmedSVD, Vector, numerical_rank, trimmed_svd
from .trajectory import TrajectoryData

logger = logging.getLogger(__name__)

EIGENVECTOR_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class DMDModel:
    a_dmd: Matrix
    svd: TrimmedSVD
    h: float
    data_dims: tuple[int, int]
    rank_profile: tuple[int, ...]
    stagnation_index: int | None
    span_invariant: bool
    """rank(X) == rank([X, x_m]), i.e. span{U} is invariant under the dynamics
    that generated the data."""

    @property
    def rank(self) -> int:
        return self.svd.rank

    @property
    def n(self) -> int:
        return self.data_dims[0]

    @property
    def full_rank(self) -> bool:
        return self.rank == self.n


@dataclass(frozen=True)
class DMDModes:
    eigenvalues: npt.NDArray[np.complex128]
    modes: npt.NDArray[np.complex128]
    diagonalizable: bool


def build_data_matrices(data: TrajectoryData) -> tuple[Matrix, Matrix]:
    if data.m < 1:
        raise InsufficientDataError(f"at least 2 snapshots are required, got {data.m + 1}")
    return data.states[:, :-1].copy(), data.states[:, 1:].copy()


def rank_profile(
    states: Matrix,
    rank_tol: float | None = None,
) -> tuple[tuple[int, ...], int | None]:
    """Ranks of [x_0 .. x_i] for growing i, up to the first stagnation.

    Returns the ranks and the first i with rank([x_0..x_i]) == rank([x_0..x_{i+1}]),
    or None if the rank grows with every snapshot.
    """
    ranks = list[int]()
    for i in range(states.shape[1]):
        ranks.append(numerical_rank(states[:, : i + 1], rank_tol))
        if i > 0 and ranks[-1] == ranks[-2]:
            return tuple(ranks), i - 1
    return tuple(ranks), None


def dmd_matrix(data: TrajectoryData, rank_tol: float | None = None) -> DMDModel:
    x, z = build_data_matrices(data)
    svd = trimmed_svd(x, rank_tol)
    a_dmd = (z @ (svd.v / svd.singular_values)) @ svd.u.T

    ranks, stagnation_index = rank_profile(data.states, rank_tol)
    span_invariant = svd.rank == numerical_rank(data.states, rank_tol)
    logger.debug(
        "DMD of %d snapshots in R^%d: rank %d, stagnation at %s, span invariant: %s",
        data.m + 1,
        data.n,
        svd.rank,
        stagnation_index,
        span_invariant,
    )

    return DMDModel(
        a_dmd=a_dmd,
        svd=svd,
        h=data.h,
        data_dims=(data.n, data.m),
        rank_profile=ranks,
        stagnation_index=stagnation_index,
        span_invariant=span_invariant,
    )


def dmd_modes(model: DMDModel) -> DMDModes:
    eigenvalues, modes = scipy.linalg.eig(model.a_dmd)
    condition = float(np.linalg.cond(modes))
    return DMDModes(
        eigenvalues=eigenvalues.astype(np.complex128),
        modes=modes.astype(np.complex128),
        diagonalizable=bool(np.isfinite(condition) and condition <= EIGENVECTOR_CONDITION_LIMIT),
    )


def _check_state(model: DMDModel, x: Vector, name: str) -> None:
    if x.shape != (model.n,):
        raise DimensionMismatchError(f"{name} has shape {x.shape}, expected ({model.n},)")


def predict(model: DMDModel, x0: Vector, steps: int) -> TrajectoryData:
    """x0, A x0, ..., A^steps x0 by repeated matrix-vector products."""
    _check_state(model, x0, "x0")
    if steps < 0:
        raise InputError(f"step count must be non-negative, got {steps}")

    states = np.empty((model.n, steps + 1), dtype=np.float64)
    states[:, 0] = x0
    for i in range(steps):
        states[:, i + 1] = model.a_dmd @ states[:, i]
    return TrajectoryData(states, model.h, "dmd")


def reachable_basis(model: DMDModel) -> Matrix:
    return model.svd.u


def project_onto_data_span(model: DMDModel, x: Vector) -> tuple[Vector, Vector]:
    _check_state(model, x, "x")
    u = model.svd.u
    x_u = u @ (u.T @ x)
    return x_u, x - x_u


def dmd_residual(model: DMDModel, data: TrajectoryData) -> float:
    x, z = build_data_matrices(data)
    return float(np.linalg.norm(z - model.a_dmd @ x, "fro"))
