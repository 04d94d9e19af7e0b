# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

from impuls.errors import DataError


class InputError(DataError):
    """Raised when user-provided data can't be used as requested."""


class DimensionMismatchError(InputError):
    pass


class InsufficientDataError(InputError):
    pass


class InputFormatError(InputError):
    pass


class UnknownTableauError(InputError):
    def __init__(self, name: str, options: list[str]) -> None:
        super().__init__(f"unknown tableau {name!r}, expected one of: {', '.join(options)}")
        self.name = name
        self.options = options


class OutsideDataSpanError(InputError):
    def __init__(self, perp_norm: float, norm: float) -> None:
        super().__init__(
            f"initial value is not in the span of the training data: "
            f"perpendicular component has norm {perp_norm:.3e} (of {norm:.3e})"
        )
        self.perp_norm = perp_norm
        self.norm = norm


class NumericalError(ArithmeticError):
    """Base class for failures of the numerical kernels."""


class SingularMatrixError(NumericalError):
    def __init__(self, pivot: float, threshold: float) -> None:
        super().__init__(
            f"matrix is numerically singular: smallest pivot {pivot:.3e} "
            f"below threshold {threshold:.3e}"
        )
        self.pivot = pivot
        self.threshold = threshold


class SVDConvergenceError(NumericalError):
    pass


class NoPrincipalLogarithmError(NumericalError):
    def __init__(self, eigenvalue: complex) -> None:
        super().__init__(
            f"no principal logarithm: eigenvalue {eigenvalue:.6g} "
            "lies on the closed negative real axis"
        )
        self.eigenvalue = eigenvalue


class RankConditionError(NumericalError):
    def __init__(self, rank: int, n: int) -> None:
        super().__init__(f"data matrix has rank {rank}, full rank {n} is required")
        self.rank = rank
        self.n = n


class MatrixOverflowError(NumericalError):
    pass
