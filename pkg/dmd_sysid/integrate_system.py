# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

from pathlib import Path

import impuls

from .errors import DimensionMismatchError
from .experiments import EXACT_SAMPLING
from .results import write_trajectory_csv
from .runge_kutta import builtin_tableau, integrate, integrate_exact
from .snapshot_csv import parse_vector, read_matrix_csv


class IntegrateSystem(impuls.Task):
    def __init__(
        self,
        tableau: str,
        x0: str,
        h: float,
        steps: int,
        target: Path,
        resource: str = "system.csv",
    ) -> None:
        super().__init__()
        self.tableau = tableau
        self.x0 = x0
        self.h = h
        self.steps = steps
        self.target = target
        self.resource = resource

    def execute(self, r: impuls.TaskRuntime) -> None:
        f = read_matrix_csv(r.resources[self.resource].stored_at)
        x0 = parse_vector(self.x0)
        if x0.shape[0] != f.shape[0]:
            raise DimensionMismatchError(
                f"x0 has length {x0.shape[0]}, the system has dimension {f.shape[0]}"
            )

        if self.tableau == EXACT_SAMPLING:
            trajectory = integrate_exact(f, self.h, x0, self.steps)
        else:
            trajectory = integrate(builtin_tableau(self.tableau), f, self.h, x0, self.steps)

        self.logger.info("Integrated %d steps of %s with h = %g", self.steps, self.tableau, self.h)
        write_trajectory_csv(self.target, trajectory)
