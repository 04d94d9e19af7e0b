# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from impuls.tools.types import StrPath

from .trajectory import TrajectoryData

RESULT_HEADERS = {
    "convergence": (
        "tableau",
        "h",
        "training_steps",
        "error",
        "admissible",
        "fitted_slope",
    ),
    "recovery": (
        "method",
        "relative_error",
        "propagator_gap",
        "status",
    ),
}

BENCHMARK_TRAJECTORIES = (
    "exact_in_span",
    "exact_complement",
    "dmd_in_span",
    "dmd_complement",
    "transformed_dmd_in_span",
    "transformed_dmd_complement",
)


def format_value(x: object) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def trajectory_header(n: int) -> tuple[str, ...]:
    return ("time", *(f"x{i}" for i in range(1, n + 1)))


def write_trajectory_csv(path: StrPath, data: TrajectoryData) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(trajectory_header(data.n))
        for t, state in zip(data.times, data.states.T):
            w.writerow([format_value(float(t)), *(format_value(float(x)) for x in state)])


def write_table_csv(path: StrPath, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        w.writerows([format_value(x) for x in row] for row in rows)


def write_json(path: StrPath, content: Any) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(content, f, indent=2, allow_nan=True)
        f.write("\n")
