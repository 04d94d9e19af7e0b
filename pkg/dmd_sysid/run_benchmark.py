# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

import impuls

from .experiments import Check, ExperimentConfig, run_benchmark_experiment
from .results import BENCHMARK_TRAJECTORIES, write_json, write_trajectory_csv


class RunBenchmark(impuls.Task):
    def __init__(self, config: ExperimentConfig) -> None:
        super().__init__()
        self.config = config

    def execute(self, r: impuls.TaskRuntime) -> None:
        report = run_benchmark_experiment(self.config)

        out = self.config.output_dir
        for name in BENCHMARK_TRAJECTORIES:
            write_trajectory_csv(out / f"{name}.csv", report.trajectories[name])
        write_json(out / "summary.json", report.summary)
        self.logger.info("Wrote %d trajectories and a summary to %s", len(report.trajectories), out)

        self._ensure_checks_passed(report.failed_checks)

    def _ensure_checks_passed(self, failed: list[Check]) -> None:
        if failed:
            raise impuls.errors.MultipleDataErrors(
                "RunBenchmark",
                [impuls.errors.DataError(i.describe()) for i in failed],
            )
