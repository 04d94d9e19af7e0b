# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .errors import InputError, InsufficientDataError
from .linalg import Matrix, Vector, as_matrix


@dataclass(frozen=True)
class TrajectoryData:
    """Snapshots x_0, ..., x_m stored as the columns of ``states``,
    sampled with the uniform step ``h``.

    A single snapshot (m = 0) is a valid trajectory, but fitting a model
    requires at least two."""

    states: Matrix
    h: float
    origin: str = ""

    def __post_init__(self) -> None:
        if self.states.ndim != 2 or self.states.size == 0:
            raise InputError(f"snapshots must form an n x (m+1) matrix, got {self.states.shape}")
        if not np.all(np.isfinite(self.states)):
            raise InputError("snapshots have non-finite entries")
        if not (self.h > 0.0 and np.isfinite(self.h)):
            raise InputError(f"step size must be positive, got {self.h}")

    @classmethod
    def from_snapshots(
        cls,
        snapshots: Sequence[npt.ArrayLike],
        h: float,
        origin: str = "",
    ) -> "TrajectoryData":
        if not snapshots:
            raise InsufficientDataError("at least one snapshot is required")
        columns = [np.asarray(i, dtype=np.float64) for i in snapshots]
        if len({i.shape for i in columns}) != 1 or columns[0].ndim != 1:
            raise InputError("all snapshots must be vectors of the same length")
        return cls(as_matrix(np.column_stack(columns), "snapshots"), h, origin)

    @property
    def n(self) -> int:
        return self.states.shape[0]

    @property
    def m(self) -> int:
        return self.states.shape[1] - 1

    @property
    def times(self) -> Vector:
        return self.h * np.arange(self.m + 1, dtype=np.float64)

    def mapped(self, f: Callable[[Matrix], Matrix], origin: str | None = None) -> "TrajectoryData":
        return TrajectoryData(f(self.states), self.h, self.origin if origin is None else origin)
