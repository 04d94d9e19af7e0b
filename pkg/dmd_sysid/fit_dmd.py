# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

from pathlib import Path
from typing import Any

import impuls

from .dmd import DMDModel, dmd_matrix, dmd_modes, dmd_residual
from .results import write_json
from .snapshot_csv import read_trajectory_csv
from .trajectory import TrajectoryData


class FitDMD(impuls.Task):
    def __init__(
        self,
        target: Path,
        resource: str = "snapshots.csv",
        rank_tol: float | None = None,
    ) -> None:
        super().__init__()
        self.target = target
        self.resource = resource
        self.rank_tol = rank_tol

    def execute(self, r: impuls.TaskRuntime) -> None:
        data = read_trajectory_csv(r.resources[self.resource].stored_at)
        self.logger.info("Loaded %d snapshots in R^%d, h = %g", data.m + 1, data.n, data.h)

        model = dmd_matrix(data, self.rank_tol)
        if not model.span_invariant:
            self.logger.warning(
                "Last snapshot leaves the span of the others, "
                "predictions are only reliable for one step"
            )
        write_json(self.target, describe_model(model, data))


def describe_model(model: DMDModel, data: TrajectoryData) -> dict[str, Any]:
    modes = dmd_modes(model)
    return {
        "n": model.n,
        "snapshots": data.m + 1,
        "h": model.h,
        "rank": model.rank,
        "singular_values": model.svd.singular_values.tolist(),
        "span_invariant": model.span_invariant,
        "stagnation_index": model.stagnation_index,
        "residual": dmd_residual(model, data),
        "a_dmd": model.a_dmd.tolist(),
        "eigenvalues": {
            "real": modes.eigenvalues.real.tolist(),
            "imag": modes.eigenvalues.imag.tolist(),
        },
        "diagonalizable": modes.diagonalizable,
    }
