# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

from collections.abc import Sequence

import impuls

from .experiments import StudyConfig, run_convergence_study
from .results import RESULT_HEADERS, write_table_csv
from .runge_kutta import DEFAULT_STEP_LADDER


class RunConvergenceStudy(impuls.Task):
    def __init__(
        self,
        config: StudyConfig,
        tableau: str,
        step_ladder: Sequence[float] = DEFAULT_STEP_LADDER,
    ) -> None:
        super().__init__()
        self.config = config
        self.tableau = tableau
        self.step_ladder = step_ladder

    def execute(self, r: impuls.TaskRuntime) -> None:
        report = run_convergence_study(self.config, self.tableau, self.step_ladder)
        if report.slope is not None:
            self.logger.info("Fitted convergence order of %s: %.3f", report.tableau, report.slope)
        if report.skipped:
            self.logger.warning("Inadmissible step sizes skipped: %s", report.skipped)

        target = self.config.output_dir / f"convergence-{report.tableau}.csv"
        write_table_csv(target, RESULT_HEADERS["convergence"], report.table())
