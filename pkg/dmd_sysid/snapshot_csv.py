# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

import csv
from collections.abc import Iterator

import numpy as np
from impuls.tools.types import StrPath

from .errors import InputFormatError
from .linalg import Matrix, Vector, as_matrix, as_vector
from .trajectory import TrajectoryData

CSVRow = list[str]

STEP_TOLERANCE = 1e-9


def csv_rows(filename: StrPath) -> Iterator[tuple[int, CSVRow]]:
    with open(filename, "r", encoding="utf-8-sig", newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if row and any(cell.strip() for cell in row):
                yield line_no, row


def parse_floats(row: CSVRow, where: str) -> list[float]:
    try:
        return [float(cell) for cell in row]
    except ValueError as e:
        raise InputFormatError(f"{where}: {e}") from None


def read_trajectory_csv(filename: StrPath) -> TrajectoryData:
    """Read snapshots written one row per time step: ``time, x1, ..., xn``,
    with a header row. Time steps must be uniform."""
    rows = csv_rows(filename)
    header = next(rows, None)
    if header is None:
        raise InputFormatError(f"{filename}: empty file")
    _, header_row = header
    if len(header_row) < 2:
        raise InputFormatError(f"{filename}: expected a time column and at least one state column")

    times = list[float]()
    states = list[list[float]]()
    for line_no, row in rows:
        if len(row) != len(header_row):
            raise InputFormatError(
                f"{filename}:{line_no}: expected {len(header_row)} columns, got {len(row)}"
            )
        t, *state = parse_floats(row, f"{filename}:{line_no}")
        times.append(t)
        states.append(state)

    if len(times) < 2:
        raise InputFormatError(f"{filename}: at least 2 snapshots are required, got {len(times)}")

    return TrajectoryData(
        as_matrix(np.array(states).T, "snapshots"),
        uniform_step(np.array(times), str(filename)),
        origin=str(filename),
    )


def uniform_step(times: Vector, where: str) -> float:
    steps = np.diff(times)
    h = float(steps[0])
    if h <= 0.0:
        raise InputFormatError(f"{where}: time must be increasing")
    if np.any(np.abs(steps - h) > STEP_TOLERANCE * max(abs(h), 1.0)):
        raise InputFormatError(f"{where}: time steps are not uniform")
    return h


def read_matrix_csv(filename: StrPath) -> Matrix:
    """Read a square matrix written one row per matrix row, without a header."""
    matrix = [parse_floats(row, f"{filename}:{line_no}") for line_no, row in csv_rows(filename)]
    if not matrix:
        raise InputFormatError(f"{filename}: empty file")
    if any(len(row) != len(matrix) for row in matrix):
        raise InputFormatError(f"{filename}: expected a square matrix")
    return as_matrix(matrix, str(filename))


def parse_vector(text: str) -> Vector:
    try:
        return as_vector([float(i) for i in text.split(",")], "vector")
    except ValueError as e:
        raise InputFormatError(f"invalid vector {text!r}: {e}") from None
