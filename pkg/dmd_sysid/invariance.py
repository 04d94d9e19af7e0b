# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Behaviour of DMD under invertible state transformations x -> T x.

DMD of transformed data, transformed back, agrees with plain DMD on the
image of X. It agrees everywhere if T is orthogonal or X has full row rank,
but in general not on the orthogonal complement of the data.
"""

from dataclasses import dataclass

import numpy as np

from .dmd import build_data_matrices, dmd_matrix, predict
from .errors import DimensionMismatchError, NumericalError
from .linalg import Matrix, Vector, pseudoinverse, require_square, solve_linear
from .trajectory import TrajectoryData

INVERSE_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-10


@dataclass(frozen=True)
class Transformation:
    t: Matrix
    t_inv: Matrix
    unitary: bool

    @classmethod
    def from_matrix(cls, t: Matrix) -> "Transformation":
        n = require_square(t, "T")
        identity = np.eye(n)
        t_inv = solve_linear(t, identity)

        inverse_residual = float(np.linalg.norm(t @ t_inv - identity, "fro"))
        if inverse_residual > n * INVERSE_TOLERANCE:
            raise NumericalError(
                f"transformation is too ill-conditioned: ||T T^-1 - I||_F = {inverse_residual:.3e}"
            )

        unitary = float(np.linalg.norm(t.T @ t - identity, "fro")) <= UNITARY_TOLERANCE
        return cls(t=t, t_inv=t_inv, unitary=unitary)

    @classmethod
    def identity(cls, n: int) -> "Transformation":
        return cls.from_matrix(np.eye(n))

    @classmethod
    def upper_bidiagonal(cls, n: int) -> "Transformation":
        """Ones on the diagonal and on the first superdiagonal."""
        return cls.from_matrix(np.eye(n) + np.eye(n, k=1))

    @property
    def n(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class InvarianceReport:
    residual_on_image: float
    """||A_dmd X - T^-1 A~_dmd T X||_F, zero up to round-off for any T."""

    full_equality_residual: float
    """||A_dmd - T^-1 A~_dmd T||_F"""

    full_equality_expected: bool
    """True iff T is orthogonal or rank(X) = n."""


def _check_dims(t: Transformation, n: int) -> None:
    if t.n != n:
        raise DimensionMismatchError(f"transformation is {t.n}x{t.n}, data has dimension {n}")


def transform_trajectory(t: Transformation, data: TrajectoryData) -> TrajectoryData:
    _check_dims(t, data.n)
    return data.mapped(lambda states: t.t @ states, origin=f"{data.origin}:transformed")


def verify_pseudoinverse_identity(
    x: Matrix,
    t: Transformation,
    rank_tol: float | None = None,
) -> float:
    """||(TX)^+ (TX) - X^+ X||_F"""
    _check_dims(t, x.shape[0])
    tx = t.t @ x
    lhs = pseudoinverse(tx, rank_tol) @ tx
    rhs = pseudoinverse(x, rank_tol) @ x
    return float(np.linalg.norm(lhs - rhs, "fro"))


def conjugated_dmd(
    t: Transformation,
    data: TrajectoryData,
    rank_tol: float | None = None,
) -> Matrix:
    """T^-1 A~_dmd T, where A~_dmd is the DMD matrix of the transformed data."""
    transformed = dmd_matrix(transform_trajectory(t, data), rank_tol)
    return t.t_inv @ transformed.a_dmd @ t.t


def conjugated_prediction(
    t: Transformation,
    data: TrajectoryData,
    x0: Vector,
    steps: int,
    rank_tol: float | None = None,
) -> TrajectoryData:
    """Transform x0, predict with the DMD of the transformed data,
    then transform every predicted state back."""
    _check_dims(t, x0.shape[0])
    transformed = dmd_matrix(transform_trajectory(t, data), rank_tol)
    prediction = predict(transformed, t.t @ x0, steps)
    return prediction.mapped(lambda states: t.t_inv @ states, origin="transformed-dmd")


def verify_image_invariance(
    data: TrajectoryData,
    t: Transformation,
    rank_tol: float | None = None,
) -> InvarianceReport:
    model = dmd_matrix(data, rank_tol)
    conjugated = conjugated_dmd(t, data, rank_tol)
    x, _ = build_data_matrices(data)

    return InvarianceReport(
        residual_on_image=float(np.linalg.norm(model.a_dmd @ x - conjugated @ x, "fro")),
        full_equality_residual=float(np.linalg.norm(model.a_dmd - conjugated, "fro")),
        full_equality_expected=t.unitary or model.full_rank,
    )


def minimizer_gap(
    t: Transformation,
    data: TrajectoryData,
    rank_tol: float | None = None,
) -> float:
    """||Z~ - (T A_dmd T^-1) X~||_F - ||Z~ - A~_dmd X~||_F

    T A_dmd T^-1 also minimizes the transformed least-squares problem
    (though not necessarily with minimum norm), so the gap is zero up to round-off.
    """
    transformed = transform_trajectory(t, data)
    x_t, z_t = build_data_matrices(transformed)
    a_dmd = dmd_matrix(data, rank_tol).a_dmd
    a_t = dmd_matrix(transformed, rank_tol).a_dmd

    pulled = t.t @ a_dmd @ t.t_inv
    return float(
        np.linalg.norm(z_t - pulled @ x_t, "fro") - np.linalg.norm(z_t - a_t @ x_t, "fro")
    )
