# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

import impuls

from .experiments import StudyConfig, run_recovery_study
from .results import RESULT_HEADERS, write_table_csv


class RunRecoveryStudy(impuls.Task):
    def __init__(self, config: StudyConfig) -> None:
        super().__init__()
        self.config = config

    def execute(self, r: impuls.TaskRuntime) -> None:
        rows = run_recovery_study(self.config)
        write_table_csv(
            self.config.output_dir / "recovery.csv",
            RESULT_HEADERS["recovery"],
            (i.as_tuple() for i in rows),
        )

        failed = [i for i in rows if i.status.startswith("failed")]
        if failed:
            raise impuls.errors.MultipleDataErrors(
                "RunRecoveryStudy",
                [impuls.errors.DataError(f"{i.method}: {i.status}") for i in failed],
            )
