from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmd_sysid.dmd import (
    build_data_matrices,
    dmd_matrix,
    dmd_modes,
    dmd_residual,
    predict,
    project_onto_data_span,
    rank_profile,
    reachable_basis,
)
from dmd_sysid.errors import DimensionMismatchError, InputError, InsufficientDataError
from dmd_sysid.trajectory import TrajectoryData

from .conftest import discrete_trajectory, random_discrete_system, random_orthogonal


@pytest.fixture
def line_data() -> TrajectoryData:
    """x_i = [i + 1, 0] for i = 0, 1, 2"""
    return TrajectoryData.from_snapshots([[1.0, 0.0], [2.0, 0.0], [3.0, 0.0]], h=1.0)


def test_trajectory_validation() -> None:
    with pytest.raises(InsufficientDataError):
        TrajectoryData.from_snapshots([], h=0.1)
    with pytest.raises(InputError):
        TrajectoryData.from_snapshots([[1.0, 2.0], [1.0]], h=0.1)
    with pytest.raises(InputError):
        TrajectoryData(np.ones((2, 3)), h=0.0)
    with pytest.raises(InputError):
        TrajectoryData(np.array([[1.0, np.inf]]), h=0.1)


def test_trajectory_times() -> None:
    data = TrajectoryData(np.zeros((2, 4)), h=0.25)
    assert data.n == 2
    assert data.m == 3
    assert_allclose(data.times, [0.0, 0.25, 0.5, 0.75])


def test_build_data_matrices(line_data: TrajectoryData) -> None:
    x, z = build_data_matrices(line_data)
    assert_allclose(x, [[1.0, 2.0], [0.0, 0.0]])
    assert_allclose(z, [[2.0, 3.0], [0.0, 0.0]])


def test_build_data_matrices_needs_two_snapshots() -> None:
    with pytest.raises(InsufficientDataError):
        build_data_matrices(TrajectoryData.from_snapshots([[1.0, 2.0]], h=0.1))


def test_dmd_matrix_of_line_data(line_data: TrajectoryData) -> None:
    model = dmd_matrix(line_data)
    assert_allclose(model.a_dmd, np.array([[8.0, 0.0], [0.0, 0.0]]) / 5.0, atol=1e-12)
    assert model.rank == 1
    assert not model.full_rank
    assert_allclose(reachable_basis(model), [[1.0], [0.0]], atol=1e-14)


def test_dmd_matrix_from_stored_factors(rng: np.random.Generator) -> None:
    data = TrajectoryData(rng.standard_normal((5, 9)), h=0.1)
    model = dmd_matrix(data)
    _, z = build_data_matrices(data)
    svd = model.svd
    assembled = z @ svd.v @ np.diag(1.0 / svd.singular_values) @ svd.u.T
    assert_allclose(model.a_dmd, assembled, rtol=1e-12, atol=1e-12)


def test_dmd_matrix_recovers_full_rank_dynamics(rng: np.random.Generator) -> None:
    a, x0 = random_discrete_system(rng, 6)
    model = dmd_matrix(discrete_trajectory(a, x0, 60))
    assert model.full_rank
    assert np.linalg.norm(model.a_dmd - a) <= 1e-10 * np.linalg.norm(a)


def test_dmd_matrix_of_constant_trajectory() -> None:
    c = np.array([1.0, -2.0, 2.0])
    model = dmd_matrix(TrajectoryData(np.column_stack([c] * 4), h=0.5))
    assert_allclose(model.a_dmd, np.outer(c, c) / (c @ c), atol=1e-14)
    assert_allclose(model.a_dmd @ c, c, atol=1e-14)


def test_least_squares_optimality(rng: np.random.Generator) -> None:
    data = TrajectoryData(rng.standard_normal((4, 11)), h=0.1)
    model = dmd_matrix(data)
    x, z = build_data_matrices(data)
    best = np.linalg.norm(z - model.a_dmd @ x)
    assert dmd_residual(model, data) == pytest.approx(best)
    for _ in range(100):
        competitor = model.a_dmd + 0.1 * rng.standard_normal((4, 4))
        assert best <= np.linalg.norm(z - competitor @ x) + 1e-9

    # normal equations of the fit
    normal = (z - model.a_dmd @ x) @ x.T
    assert np.linalg.norm(normal) <= 1e-10 * np.linalg.norm(z) * np.linalg.norm(x)


def test_minimum_norm(rng: np.random.Generator) -> None:
    data = TrajectoryData(rng.standard_normal((8, 4)), h=0.1)
    model = dmd_matrix(data)
    u = model.svd.u
    projector = np.eye(8) - u @ u.T
    assert np.linalg.norm(model.a_dmd @ projector) <= 1e-10 * np.linalg.norm(model.a_dmd)


def test_rank_deficient_data_gives_projected_dynamics(rng: np.random.Generator) -> None:
    a, x0 = random_discrete_system(rng, 8)
    model = dmd_matrix(discrete_trajectory(a, x0, 3))
    u = model.svd.u
    assert model.rank == 3
    assert np.linalg.norm(model.a_dmd - a @ u @ u.T) <= 1e-9 * np.linalg.norm(a)


def test_rank_profile(line_data: TrajectoryData, rng: np.random.Generator) -> None:
    assert rank_profile(line_data.states) == ((1, 1), 0)
    model = dmd_matrix(line_data)
    assert model.stagnation_index == 0
    assert model.span_invariant

    growing = TrajectoryData(rng.standard_normal((3, 3)), h=0.1)
    assert rank_profile(growing.states) == ((1, 2, 3), None)
    assert not dmd_matrix(growing).span_invariant


def test_dmd_modes_of_diagonal_dynamics() -> None:
    data = TrajectoryData.from_snapshots([[1.0, 1.0], [2.0, 3.0], [4.0, 9.0]], h=1.0)
    model = dmd_matrix(data)
    modes = dmd_modes(model)
    order = np.argsort(modes.eigenvalues.real)
    assert_allclose(modes.eigenvalues[order], [2.0, 3.0], atol=1e-12)
    assert_allclose(np.abs(modes.modes[:, order]), np.eye(2), atol=1e-12)
    assert modes.diagonalizable


def test_dmd_modes_are_eigenpairs(line_data: TrajectoryData, rng: np.random.Generator) -> None:
    modes = dmd_modes(dmd_matrix(line_data))
    assert_allclose(np.sort(modes.eigenvalues.real), [0.0, 1.6], atol=1e-12)

    model = dmd_matrix(TrajectoryData(rng.standard_normal((5, 12)), h=0.1))
    modes = dmd_modes(model)
    for value, mode in zip(modes.eigenvalues, modes.modes.T):
        residual = np.linalg.norm(model.a_dmd @ mode - value * mode)
        assert residual <= 1e-9 * np.linalg.norm(model.a_dmd)


def test_dmd_modes_of_defective_matrix(line_data: TrajectoryData) -> None:
    jordan_block = np.array([[1.0, 1.0], [0.0, 1.0]])
    model = replace(dmd_matrix(line_data), a_dmd=jordan_block)
    assert not dmd_modes(model).diagonalizable


def test_predict(rng: np.random.Generator) -> None:
    a, x0 = random_discrete_system(rng, 5)
    data = discrete_trajectory(a, x0, 40)
    model = dmd_matrix(data)

    assert_allclose(predict(model, x0, 0).states, x0[:, np.newaxis])

    prediction = predict(model, x0, 40)
    assert prediction.origin == "dmd"
    assert prediction.h == data.h
    scale = np.max(np.linalg.norm(data.states, axis=0))
    assert np.max(np.linalg.norm(prediction.states - data.states, axis=0)) <= 1e-9 * scale


def test_predict_vanishes_on_complement(line_data: TrajectoryData) -> None:
    prediction = predict(dmd_matrix(line_data), np.array([0.0, 1.0]), 5)
    assert_allclose(prediction.states[:, 1:], np.zeros((2, 5)), atol=1e-14)


def test_predict_rejects_bad_input(line_data: TrajectoryData) -> None:
    model = dmd_matrix(line_data)
    with pytest.raises(DimensionMismatchError):
        predict(model, np.ones(3), 2)
    with pytest.raises(InputError):
        predict(model, np.ones(2), -1)


def test_project_onto_data_span(rng: np.random.Generator) -> None:
    q = random_orthogonal(rng, 6)
    data = TrajectoryData(q[:, :2] @ rng.standard_normal((2, 5)), h=0.1)
    model = dmd_matrix(data)
    assert model.rank == 2

    inside = q[:, :2] @ rng.standard_normal(2)
    outside = q[:, 2:] @ rng.standard_normal(4)

    x_u, x_perp = project_onto_data_span(model, inside + outside)
    assert_allclose(x_u, inside, atol=1e-12)
    assert_allclose(x_perp, outside, atol=1e-12)
    assert_allclose(x_u + x_perp, inside + outside, atol=1e-14)
    assert_allclose(model.svd.u.T @ x_perp, np.zeros(2), atol=1e-12)

    x_u, x_perp = project_onto_data_span(model, inside)
    assert_allclose(x_perp, np.zeros(6), atol=1e-12)
    x_u, x_perp = project_onto_data_span(model, outside)
    assert_allclose(x_u, np.zeros(6), atol=1e-12)
