import json
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dmd_sysid.errors import InputError, InputFormatError
from dmd_sysid.results import (
    RESULT_HEADERS,
    format_value,
    trajectory_header,
    write_json,
    write_table_csv,
    write_trajectory_csv,
)
from dmd_sysid.snapshot_csv import parse_vector, read_matrix_csv, read_trajectory_csv
from dmd_sysid.trajectory import TrajectoryData


def write_file(path: Path, content: str) -> Path:
    path.write_text(content, encoding="utf-8")
    return path


def test_read_trajectory_csv(tmp_path: Path) -> None:
    path = write_file(
        tmp_path / "snapshots.csv",
        "time,x1,x2\n0.0,1.0,0.0\n0.5,2.0,-1.0\n1.0,3.0,-2.0\n",
    )
    data = read_trajectory_csv(path)
    assert data.h == pytest.approx(0.5)
    assert_allclose(data.states, [[1.0, 2.0, 3.0], [0.0, -1.0, -2.0]])


def test_read_trajectory_csv_skips_blank_lines(tmp_path: Path) -> None:
    path = write_file(tmp_path / "snapshots.csv", "\ufefftime,x1\n\n0,1\n0.1,2\n\n")
    data = read_trajectory_csv(path)
    assert data.m == 1
    assert_allclose(data.states, [[1.0, 2.0]])


@pytest.mark.parametrize(
    "content",
    [
        "",
        "time\n0\n1\n",
        "time,x1\n0,1\n",
        "time,x1\n0,1\n0.1,2,3\n",
        "time,x1\n0,1\n0.1,abc\n",
        "time,x1\n0,1\n0.1,2\n0.3,3\n",
        "time,x1\n0.2,1\n0.1,2\n",
    ],
    ids=["empty", "no-state", "one-row", "ragged", "not-a-number", "uneven", "decreasing"],
)
def test_read_trajectory_csv_rejects(tmp_path: Path, content: str) -> None:
    with pytest.raises(InputFormatError):
        read_trajectory_csv(write_file(tmp_path / "bad.csv", content))


def test_read_matrix_csv(tmp_path: Path) -> None:
    f = read_matrix_csv(write_file(tmp_path / "system.csv", "0,1\n-1,-0.5\n"))
    assert_allclose(f, [[0.0, 1.0], [-1.0, -0.5]])


@pytest.mark.parametrize("content", ["", "1,2\n3,4\n5,6\n", "1,x\n2,3\n"])
def test_read_matrix_csv_rejects(tmp_path: Path, content: str) -> None:
    with pytest.raises(InputFormatError):
        read_matrix_csv(write_file(tmp_path / "bad.csv", content))


def test_parse_vector() -> None:
    assert_allclose(parse_vector("1, 2.5,-3"), [1.0, 2.5, -3.0])
    with pytest.raises(InputFormatError):
        parse_vector("1,,2")
    with pytest.raises(InputError):
        parse_vector("1,inf")


def test_format_value() -> None:
    assert format_value(None) == ""
    assert format_value(0.1) == "0.1"
    assert format_value(True) == "True"
    assert format_value("rk4") == "rk4"


def test_trajectory_header() -> None:
    assert trajectory_header(3) == ("time", "x1", "x2", "x3")


def test_trajectory_csv_can_be_read_back(tmp_path: Path) -> None:
    states = np.array([[1.0, 1.0 / 3.0, -2.5e-17], [0.0, 4.0, 1e300]])
    path = tmp_path / "nested" / "trajectory.csv"
    write_trajectory_csv(path, TrajectoryData(states, h=0.1))

    assert path.read_text(encoding="utf-8").splitlines()[0] == "time,x1,x2"
    data = read_trajectory_csv(path)
    assert np.array_equal(data.states, states)
    assert data.h == pytest.approx(0.1)


def test_write_table_csv(tmp_path: Path) -> None:
    path = tmp_path / "recovery.csv"
    write_table_csv(
        path,
        RESULT_HEADERS["recovery"],
        [("heun", None, 0.0, "not identifiable"), ("log-exact", 1e-12, 2e-15, "recovered")],
    )
    assert path.read_text(encoding="utf-8").splitlines() == [
        "method,relative_error,propagator_gap,status",
        "heun,,0.0,not identifiable",
        "log-exact,1e-12,2e-15,recovered",
    ]


def test_write_json(tmp_path: Path) -> None:
    path = tmp_path / "out" / "summary.json"
    write_json(path, {"rank": 5, "gap": float("nan")})
    content = json.loads(path.read_text(encoding="utf-8"))
    assert content["rank"] == 5
    assert np.isnan(content["gap"])
