# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

"""Dense real linear-algebra kernels.

Every matrix is a 2-D float64 numpy array. Ranks are numerical ranks:
a singular value counts iff it exceeds ``rank_tol * sigma_max``, with
``rank_tol`` defaulting to ``max(rows, cols) * eps``.
"""

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from .errors import (
    DimensionMismatchError,
    InputError,
    MatrixOverflowError,
    NoPrincipalLogarithmError,
    SingularMatrixError,
    SVDConvergenceError,
)

Matrix = npt.NDArray[np.float64]
Vector = npt.NDArray[np.float64]

EPS = float(np.finfo(np.float64).eps)

logger = logging.getLogger(__name__)


def as_matrix(values: npt.ArrayLike, name: str = "matrix") -> Matrix:
    m = np.array(values, dtype=np.float64)
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatchError(f"{name} must be a nonempty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{name} has non-finite entries")
    return m


def as_vector(values: npt.ArrayLike, name: str = "vector") -> Vector:
    v = np.array(values, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise DimensionMismatchError(f"{name} must be a nonempty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InputError(f"{name} has non-finite entries")
    return v


def require_square(m: Matrix, name: str = "matrix") -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {m.shape}")
    return m.shape[0]


def default_rank_tol(shape: tuple[int, ...]) -> float:
    return max(shape) * EPS


@dataclass(frozen=True)
class TrimmedSVD:
    """Rank-r factorization ``M = u @ sigma @ v.T`` keeping only the
    strictly positive singular values.

    Each column of ``u`` has its largest-magnitude entry positive
    (``v`` is flipped accordingly), so factors compare deterministically.
    """

    u: Matrix
    sigma: Matrix
    v: Matrix

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def singular_values(self) -> Vector:
        return np.diag(self.sigma).copy()

    def reconstruct(self) -> Matrix:
        return self.u @ self.sigma @ self.v.T


def _sign_normalizer(u: Matrix) -> Vector:
    if u.shape[1] == 0:
        return np.ones(0)
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0.0] = 1.0
    return signs


def _svd(m: Matrix, full_matrices: bool = False) -> tuple[Matrix, Vector, Matrix]:
    try:
        return scipy.linalg.svd(m, full_matrices=full_matrices, lapack_driver="gesdd")
    except np.linalg.LinAlgError:
        logger.debug("gesdd did not converge on a %dx%d matrix, retrying with gesvd", *m.shape)

    try:
        return scipy.linalg.svd(m, full_matrices=full_matrices, lapack_driver="gesvd")
    except np.linalg.LinAlgError as e:
        raise SVDConvergenceError(f"SVD did not converge: {e}") from e


def trimmed_svd(m: Matrix, rank_tol: float | None = None) -> TrimmedSVD:
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatchError(f"SVD input must be a nonempty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError("SVD input has non-finite entries")
    tol = default_rank_tol(m.shape) if rank_tol is None else rank_tol

    u, s, vt = _svd(m)
    r = 0 if s[0] == 0.0 else int(np.count_nonzero(s > tol * s[0]))

    u = u[:, :r]
    v = vt[:r].T
    signs = _sign_normalizer(u)
    return TrimmedSVD(u=u * signs, sigma=np.diag(s[:r]), v=v * signs)


def numerical_rank(m: Matrix, rank_tol: float | None = None) -> int:
    return trimmed_svd(m, rank_tol).rank


def pseudoinverse(m: Matrix, rank_tol: float | None = None) -> Matrix:
    """Moore-Penrose pseudoinverse ``V Sigma^-1 U^T`` from the trimmed SVD."""
    svd = trimmed_svd(m, rank_tol)
    return (svd.v / svd.singular_values) @ svd.u.T


def complement_basis(m: Matrix, rank: int) -> Matrix:
    """Orthonormal basis of the orthogonal complement of the column space of m,
    taken as the trailing ``m.shape[0] - rank`` left singular vectors of the full SVD."""
    if not 0 <= rank <= m.shape[0]:
        raise DimensionMismatchError(f"rank {rank} out of range for {m.shape[0]} rows")
    u, _, _ = _svd(m, full_matrices=True)
    basis = u[:, rank:]
    return basis * _sign_normalizer(basis)


def matrix_exponential(m: Matrix) -> Matrix:
    require_square(m)
    with np.errstate(over="ignore", invalid="ignore"):
        result = scipy.linalg.expm(m)
    if not np.all(np.isfinite(result)):
        raise MatrixOverflowError(
            f"matrix exponential overflowed (||M||_1 = {np.linalg.norm(m, 1):.3e})"
        )
    return np.asarray(result, dtype=np.float64)


def principal_matrix_logarithm(m: Matrix) -> Matrix:
    n = require_square(m)
    tol = n * EPS * max(float(np.linalg.norm(m, "fro")), 1.0)
    for eigenvalue in scipy.linalg.eigvals(m):
        if abs(eigenvalue) <= tol or (eigenvalue.real < 0.0 and abs(eigenvalue.imag) <= tol):
            raise NoPrincipalLogarithmError(complex(eigenvalue))

    log = scipy.linalg.logm(m)
    # A real matrix with no eigenvalue on (-inf, 0] has a real principal logarithm
    return np.ascontiguousarray(np.real(log), dtype=np.float64)


def kronecker_product(a: Matrix, b: Matrix) -> Matrix:
    return np.kron(a, b)


def pivot_threshold(a: Matrix) -> float:
    return a.shape[0] * EPS * float(np.linalg.norm(a, "fro"))


@dataclass(frozen=True)
class LUFactors:
    lu: Matrix
    piv: npt.NDArray[np.int32]
    min_pivot: float
    threshold: float

    @property
    def nonsingular(self) -> bool:
        return self.min_pivot > self.threshold

    def solve(self, b: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        if not self.nonsingular:
            raise SingularMatrixError(self.min_pivot, self.threshold)
        return scipy.linalg.lu_solve((self.lu, self.piv), b, check_finite=False)


def lu_factor_checked(a: Matrix) -> LUFactors:
    """LU factorization with partial pivoting, recording the smallest pivot.
    Never raises on singular input - check ``nonsingular`` instead."""
    require_square(a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    min_pivot = float(np.min(np.abs(np.diag(lu))))
    return LUFactors(lu=lu, piv=piv, min_pivot=min_pivot, threshold=pivot_threshold(a))


def solve_linear(a: Matrix, b: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    n = require_square(a)
    if b.shape[0] != n:
        raise DimensionMismatchError(f"right-hand side has {b.shape[0]} rows, expected {n}")
    return lu_factor_checked(a).solve(b)


def right_divide(b: Matrix, a: Matrix) -> Matrix:
    """Compute ``b @ inv(a)`` without forming the inverse."""
    return solve_linear(a.T, b.T).T


def krylov_matrix(f: Matrix, x0: Vector, k: int) -> Matrix:
    columns = [x0]
    for _ in range(k - 1):
        columns.append(f @ columns[-1])
    return np.column_stack(columns)
