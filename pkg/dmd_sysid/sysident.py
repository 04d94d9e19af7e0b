# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Recovery of discrete and continuous system matrices from DMD models.

* Discrete data x_{i+1} = A x_i gives A_dmd = A U U^T, so A_dmd = A when rank(X) = n.
* Exactly sampled data x_i = exp(ihF) x_0 gives F = log(A_dmd) / h.
* Data of a one-stage Runge-Kutta method (alpha, beta) gives
  F = -(1/h) (I - A_dmd) (alpha A_dmd + (beta - alpha) I)^{-1}.
* Methods with two or more stages are not identifiable in general:
  Heun's method maps F = 0 and F = -2/h to the same A_h.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .dmd import DMDModel, dmd_matrix, predict, project_onto_data_span
from .errors import (
    OutsideDataSpanError,
    RankConditionError,
    SingularMatrixError,
    UnknownTableauError,
)
from .linalg import (
    Matrix,
    Vector,
    matrix_exponential,
    principal_matrix_logarithm,
    right_divide,
)
from .runge_kutta import (
    builtin_tableau,
    discretization_matrix,
    integrate_exact,
    one_stage_coefficients,
)
from .trajectory import TrajectoryData

logger = logging.getLogger(__name__)

SPAN_TOLERANCE = 1e-10

ONE_STAGE_METHODS = {
    name: one_stage_coefficients(builtin_tableau(name))
    for name in ("explicit-euler", "implicit-euler", "implicit-midpoint")
}


@dataclass(frozen=True)
class IdentificationReport:
    recovered: Matrix
    method: str
    """One of "discrete", "log-exact" or "reverse-rk1"."""

    h: float
    rank_condition_met: bool
    inverse_existed: bool = True
    residual: float | None = None
    """||truth - recovered||_F, when the truth is known."""

    discrete_residual: float | None = None
    round_trip_residual: float | None = None
    min_pivot: float | None = None
    """Smallest LU pivot of the bracket when it was found singular."""

    def relative_error(self, truth: Matrix) -> float:
        return float(np.linalg.norm(truth - self.recovered, "fro") / np.linalg.norm(truth, "fro"))


def _residual(truth: Matrix | None, recovered: Matrix) -> float | None:
    if truth is None:
        return None
    return float(np.linalg.norm(truth - recovered, "fro"))


def _require_full_rank(model: DMDModel) -> None:
    if not model.full_rank:
        raise RankConditionError(model.rank, model.n)


def identify_discrete(
    data: TrajectoryData,
    truth: Matrix | None = None,
    rank_tol: float | None = None,
) -> IdentificationReport:
    model = dmd_matrix(data, rank_tol)
    discrete_residual = None
    if truth is not None:
        u = model.svd.u
        discrete_residual = float(np.linalg.norm(model.a_dmd - truth @ u @ u.T, "fro"))

    if not model.full_rank:
        logger.debug("Only A U U^T is identifiable: rank %d < n = %d", model.rank, model.n)

    return IdentificationReport(
        recovered=model.a_dmd,
        method="discrete",
        h=data.h,
        rank_condition_met=model.full_rank,
        residual=_residual(truth, model.a_dmd) if model.full_rank else None,
        discrete_residual=discrete_residual,
    )


def recover_continuous_exact_sampling(
    model: DMDModel,
    h: float,
    truth: Matrix | None = None,
) -> IdentificationReport:
    _require_full_rank(model)
    recovered = principal_matrix_logarithm(model.a_dmd) / h
    round_trip = float(np.linalg.norm(matrix_exponential(h * recovered) - model.a_dmd, "fro"))
    logger.debug("log(A_dmd) round trip residual: %.3e", round_trip)

    return IdentificationReport(
        recovered=recovered,
        method="log-exact",
        h=h,
        rank_condition_met=True,
        residual=_residual(truth, recovered),
        round_trip_residual=round_trip,
    )


def recover_continuous_onestage(
    model: DMDModel,
    alpha: float,
    beta: float,
    h: float,
    truth: Matrix | None = None,
) -> IdentificationReport:
    _require_full_rank(model)
    n = model.n
    identity = np.eye(n)
    a = model.a_dmd

    # F (alpha A + (beta - alpha) I) = -(1/h) (I - A)
    bracket = alpha * a + (beta - alpha) * identity
    try:
        recovered = right_divide(-(identity - a) / h, bracket)
    except SingularMatrixError as e:
        logger.warning(
            "alpha A_dmd + (beta - alpha) I is singular (pivot %.3e), F can't be recovered",
            e.pivot,
        )
        return IdentificationReport(
            recovered=np.full((n, n), np.nan),
            method="reverse-rk1",
            h=h,
            rank_condition_met=True,
            inverse_existed=False,
            min_pivot=e.pivot,
        )

    return IdentificationReport(
        recovered=recovered,
        method="reverse-rk1",
        h=h,
        rank_condition_met=True,
        residual=_residual(truth, recovered),
    )


def one_stage_specialization(
    method_name: str,
    model: DMDModel,
    h: float,
    truth: Matrix | None = None,
) -> IdentificationReport:
    try:
        alpha, beta = ONE_STAGE_METHODS[method_name]
    except KeyError:
        raise UnknownTableauError(method_name, list(ONE_STAGE_METHODS)) from None
    return recover_continuous_onestage(model, alpha, beta, h, truth)


@dataclass(frozen=True)
class HeunAmbiguity:
    f1: Matrix
    f2: Matrix
    a_h1: Matrix
    a_h2: Matrix
    discrepancy: float


def demonstrate_heun_ambiguity(h: float) -> HeunAmbiguity:
    """Scalar systems F1 = 0 and F2 = -2/h share Heun's propagator A_h = 1."""
    heun = builtin_tableau("heun")
    f1 = np.zeros((1, 1))
    f2 = np.array([[-2.0 / h]])
    a_h1 = discretization_matrix(heun, f1, h).a_h
    a_h2 = discretization_matrix(heun, f2, h).a_h
    return HeunAmbiguity(f1, f2, a_h1, a_h2, float(np.max(np.abs(a_h1 - a_h2))))


def require_in_data_span(model: DMDModel, x: Vector) -> None:
    _, x_perp = project_onto_data_span(model, x)
    perp_norm = float(np.linalg.norm(x_perp))
    norm = float(np.linalg.norm(x))
    if perp_norm > SPAN_TOLERANCE * norm:
        raise OutsideDataSpanError(perp_norm, norm)


def dmd_error_vs_flow(
    model: DMDModel,
    f_true: Matrix,
    x0: Vector,
    steps: int,
    h: float | None = None,
) -> float:
    """max_{i <= steps} ||exp(ihF) x0 - A_dmd^i x0|| for x0 in the span of the training data."""
    require_in_data_span(model, x0)
    h = model.h if h is None else h
    exact = integrate_exact(f_true, h, x0, steps).states
    approx = predict(model, x0, steps).states
    return float(np.max(np.linalg.norm(exact - approx, axis=0)))


def exactness_on_span(model: DMDModel, a: Matrix, x: Vector, steps: int) -> float:
    """max_{i <= steps} ||A^i x - A_dmd^i x||"""
    approx = predict(model, x, steps).states
    error = 0.0
    exact = x
    for i in range(steps + 1):
        error = max(error, float(np.linalg.norm(exact - approx[:, i])))
        exact = a @ exact
    return error
