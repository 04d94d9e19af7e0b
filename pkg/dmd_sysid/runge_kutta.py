# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Runge-Kutta methods applied to the linear system x' = F x.

For a linear right-hand side every s-stage method (A, b) is a linear map
x_{i+1} = A_h x_i with

    A_h = I + h (b^T ⊗ I) (I - h A ⊗ F)^{-1} (e ⊗ F),

so nodes (the c vector of a full Butcher tableau) are never needed.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientDataError, UnknownTableauError
from .linalg import (
    EPS,
    Matrix,
    Vector,
    as_matrix,
    kronecker_product,
    lu_factor_checked,
    matrix_exponential,
    require_square,
)
from .trajectory import TrajectoryData

logger = logging.getLogger(__name__)

DEFAULT_STEP_LADDER = (0.2, 0.1, 0.05, 0.025, 0.0125)
ROUND_OFF_FACTOR = 1e3


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    a: Matrix
    b: Vector
    declared_order: int

    def __post_init__(self) -> None:
        s = self.b.shape[0]
        if self.a.shape != (s, s):
            raise InputError(f"tableau {self.name!r}: A is {self.a.shape}, expected {(s, s)}")

    @property
    def stages(self) -> int:
        return self.b.shape[0]


def _tableau(name: str, a: list[list[float]], b: list[float], order: int) -> ButcherTableau:
    return ButcherTableau(name, np.array(a, dtype=np.float64), np.array(b, dtype=np.float64), order)


BUILTIN_TABLEAUS = {
    "explicit-euler": _tableau("explicit-euler", [[0.0]], [1.0], 1),
    "implicit-euler": _tableau("implicit-euler", [[1.0]], [1.0], 1),
    "implicit-midpoint": _tableau("implicit-midpoint", [[0.5]], [1.0], 2),
    "heun": _tableau("heun", [[0.0, 0.0], [1.0, 0.0]], [0.5, 0.5], 2),
    "rk4": _tableau(
        "rk4",
        [
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        [1 / 6, 1 / 3, 1 / 3, 1 / 6],
        4,
    ),
}


def builtin_tableau(name: str) -> ButcherTableau:
    try:
        return BUILTIN_TABLEAUS[name]
    except KeyError:
        raise UnknownTableauError(name, list(BUILTIN_TABLEAUS)) from None


def one_stage_coefficients(tableau: ButcherTableau) -> tuple[float, float]:
    if tableau.stages != 1:
        raise InputError(f"tableau {tableau.name!r} has {tableau.stages} stages, expected 1")
    return float(tableau.a[0, 0]), float(tableau.b[0])


@dataclass(frozen=True)
class DiscreteSystem:
    a_h: Matrix
    h: float
    source_tableau: str


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    min_pivot: float
    threshold: float

    def __bool__(self) -> bool:
        return self.admissible


def stage_matrix(tableau: ButcherTableau, f: Matrix, h: float) -> Matrix:
    """I_{sn} - h (A ⊗ F)"""
    n = require_square(f, "F")
    return np.eye(tableau.stages * n) - h * kronecker_product(tableau.a, f)


def check_step_admissible(tableau: ButcherTableau, f: Matrix, h: float) -> Admissibility:
    factors = lu_factor_checked(stage_matrix(tableau, f, h))
    return Admissibility(factors.nonsingular, factors.min_pivot, factors.threshold)


def discretization_matrix(tableau: ButcherTableau, f: Matrix, h: float) -> DiscreteSystem:
    if h <= 0.0:
        raise InputError(f"step size must be positive, got {h}")
    n = require_square(f, "F")
    s = tableau.stages

    factors = lu_factor_checked(stage_matrix(tableau, f, h))
    logger.debug(
        "%s stage system (%dx%d): smallest pivot %.3e",
        tableau.name,
        s * n,
        s * n,
        factors.min_pivot,
    )

    # One factorization, n right-hand sides: the columns of e ⊗ F
    k = factors.solve(kronecker_product(np.ones((s, 1)), f))
    a_h = np.eye(n) + h * (kronecker_product(tableau.b[np.newaxis, :], np.eye(n)) @ k)
    return DiscreteSystem(a_h=a_h, h=h, source_tableau=tableau.name)


def _propagate(a_h: Matrix, x0: Vector, m: int) -> Matrix:
    states = np.empty((x0.shape[0], m + 1), dtype=np.float64)
    states[:, 0] = x0
    for i in range(m):
        states[:, i + 1] = a_h @ states[:, i]
    return states


def _check_trajectory_args(f: Matrix, x0: Vector, m: int) -> None:
    n = require_square(f, "F")
    if x0.shape != (n,):
        raise InputError(f"x0 has shape {x0.shape}, expected ({n},)")
    if m < 0:
        raise InputError(f"step count must be non-negative, got {m}")


def integrate(tableau: ButcherTableau, f: Matrix, h: float, x0: Vector, m: int) -> TrajectoryData:
    _check_trajectory_args(f, x0, m)
    system = discretization_matrix(tableau, f, h)
    return TrajectoryData(_propagate(system.a_h, x0, m), h, tableau.name)


def integrate_exact(f: Matrix, h: float, x0: Vector, m: int) -> TrajectoryData:
    """Exact samples x_i = exp(ihF) x0."""
    _check_trajectory_args(f, x0, m)
    return TrajectoryData(_propagate(matrix_exponential(h * f), x0, m), h, "exact")


def steps_for(t_end: float, h: float) -> int:
    steps = round(t_end / h)
    if steps < 1 or abs(steps * h - t_end) > 1e-9 * max(t_end, 1.0):
        raise InputError(f"t_end = {t_end} is not a positive multiple of h = {h}")
    return steps


def steps_within(t_end: float, h: float) -> int:
    """Number of whole steps of size h that fit into [0, t_end]."""
    steps = math.floor(t_end / h + 1e-9)
    if steps < 1:
        raise InputError(f"h = {h} is longer than t_end = {t_end}")
    return steps


def fit_loglog_slope(hs: Sequence[float], errors: Sequence[float], floor: float = 0.0) -> float:
    """Least-squares slope of log(error) against log(h),
    ignoring points whose error is at or below ``floor``."""
    points = [(h, e) for h, e in zip(hs, errors) if e > floor]
    if len(points) < len(hs):
        logger.warning(
            "Dropped %d ladder point(s) at the round-off floor %.3e",
            len(hs) - len(points),
            floor,
        )
    if len(points) < 3:
        raise InsufficientDataError(
            f"at least 3 ladder points above the round-off floor are required, got {len(points)}"
        )
    log_h = np.log([h for h, _ in points])
    log_e = np.log([e for _, e in points])
    slope, _ = np.polyfit(log_h, log_e, 1)
    return float(slope)


def round_off_floor(reference: Vector) -> float:
    return ROUND_OFF_FACTOR * EPS * float(np.linalg.norm(reference))


def empirical_order(
    tableau: ButcherTableau,
    f: Matrix,
    x0: Vector,
    t_end: float,
    step_ladder: Sequence[float] = DEFAULT_STEP_LADDER,
) -> float:
    """Estimate the global order of ``tableau`` from the error at ``t_end``."""
    if len(step_ladder) < 3:
        raise InsufficientDataError(
            f"at least 3 ladder points are required, got {len(step_ladder)}"
        )
    f = as_matrix(f, "F")
    exact = matrix_exponential(t_end * f) @ x0

    errors = list[float]()
    for h in step_ladder:
        approx = integrate(tableau, f, h, x0, steps_for(t_end, h)).states[:, -1]
        errors.append(float(np.linalg.norm(exact - approx)))

    slope = fit_loglog_slope(step_ladder, errors, round_off_floor(exact))
    logger.debug("%s: global errors %s, slope %.3f", tableau.name, errors, slope)
    return slope


def local_error_order(
    tableau: ButcherTableau,
    f: Matrix,
    x0: Vector,
    step_ladder: Sequence[float] = DEFAULT_STEP_LADDER,
) -> float:
    """Slope of the one-step error ||exp(hF) x0 - A_h x0|| against h (p + 1 for order p)."""
    if len(step_ladder) < 3:
        raise InsufficientDataError(
            f"at least 3 ladder points are required, got {len(step_ladder)}"
        )
    errors = [
        float(
            np.linalg.norm(
                matrix_exponential(h * f) @ x0 - discretization_matrix(tableau, f, h).a_h @ x0
            )
        )
        for h in step_ladder
    ]
    return fit_loglog_slope(step_ladder, errors, round_off_floor(x0))
