# Copyright (c) 2025 DMDSysId contributors
# SPDX-License-Identifier: MIT

import logging
from argparse import ArgumentParser, Namespace
from collections.abc import Callable
from dataclasses import replace
from pathlib import Path

from impuls import App, Pipeline, PipelineOptions, Task
from impuls.errors import MultipleDataErrors
from impuls.resource import LocalResource, Resource

from .errors import InputError, InputFormatError, NumericalError
from .experiments import DEFAULT_OUTPUT_DIR, EXACT_SAMPLING, ExperimentConfig, StudyConfig
from .fit_dmd import FitDMD
from .integrate_system import IntegrateSystem
from .run_benchmark import RunBenchmark
from .run_convergence import RunConvergenceStudy
from .run_recovery import RunRecoveryStudy
from .runge_kutta import BUILTIN_TABLEAUS, DEFAULT_STEP_LADDER
from .snapshot_csv import parse_vector

logger = logging.getLogger("DMDSysId")

TaskBuilder = Callable[[Namespace], tuple[Task, dict[str, Resource]]]

EXIT_SUCCESS = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

TABLEAU_CHOICES = [EXACT_SAMPLING, *BUILTIN_TABLEAUS]


def parse_ladder(text: str) -> tuple[float, ...]:
    try:
        ladder = tuple(float(i) for i in text.split(","))
    except ValueError as e:
        raise InputFormatError(f"invalid step ladder {text!r}: {e}") from None
    if any(h <= 0.0 for h in ladder):
        raise InputFormatError(f"step sizes must be positive, got {text!r}")
    return ladder


def benchmark_task(args: Namespace) -> tuple[Task, dict[str, Resource]]:
    config = ExperimentConfig(
        n_blocks=args.n,
        x0=parse_vector(args.x0) if args.x0 else None,
        h=args.h,
        steps=args.steps,
        tableau=args.tableau,
        transformation=args.transformation,
        rank_tol=args.rank_tol,
        output_dir=args.out,
    )
    return RunBenchmark(config), {}


def convergence_task(args: Namespace) -> tuple[Task, dict[str, Resource]]:
    config = StudyConfig(
        n=args.n,
        seed=args.seed,
        t_end=args.t_end,
        rank_tol=args.rank_tol,
        output_dir=args.out,
    )
    ladder = parse_ladder(args.ladder) if args.ladder else DEFAULT_STEP_LADDER
    return RunConvergenceStudy(config, args.tableau, ladder), {}


def recovery_task(args: Namespace) -> tuple[Task, dict[str, Resource]]:
    config = StudyConfig(
        n=args.n,
        seed=args.seed,
        h=args.h,
        steps=args.steps,
        rank_tol=args.rank_tol,
        output_dir=args.out,
    )
    return RunRecoveryStudy(config), {}


def dmd_task(args: Namespace) -> tuple[Task, dict[str, Resource]]:
    return (
        FitDMD(args.out, rank_tol=args.rank_tol),
        {"snapshots.csv": LocalResource(args.input)},
    )


def integrate_task(args: Namespace) -> tuple[Task, dict[str, Resource]]:
    return (
        IntegrateSystem(args.tableau, args.x0, args.h, args.steps, args.out),
        {"system.csv": LocalResource(args.system)},
    )


class DMDSysIdApp(App):
    def add_arguments(self, parser: ArgumentParser) -> None:
        commands = parser.add_subparsers(dest="command", required=True)

        benchmark = commands.add_parser(
            "paper-example",
            aliases=["benchmark"],
            help="reproduce the block benchmark with plain and transformed-data DMD",
        )
        benchmark.add_argument("--n", type=int, default=5, help="block size N (state is 2N)")
        benchmark.add_argument("--x0", help="comma-separated initial value, default 1..2N")
        benchmark.add_argument("--h", type=float, default=0.1, help="step size")
        benchmark.add_argument("--steps", type=int, default=100, help="number of steps")
        benchmark.add_argument(
            "--tableau",
            choices=TABLEAU_CHOICES,
            default=EXACT_SAMPLING,
            help="generator of the training data",
        )
        benchmark.add_argument(
            "--transformation",
            choices=["bidiagonal", "identity"],
            default="bidiagonal",
            help="state transformation T applied before DMD",
        )
        benchmark.add_argument("--rank-tol", type=float, help="relative rank tolerance")
        benchmark.add_argument(
            "-o",
            "--out",
            type=Path,
            default=DEFAULT_OUTPUT_DIR,
            help="directory for the trajectories and summary.json",
        )
        benchmark.set_defaults(build=benchmark_task)

        convergence = commands.add_parser(
            "convergence",
            help="estimate the convergence order of DMD trained on Runge-Kutta data",
        )
        convergence.add_argument("--tableau", choices=list(BUILTIN_TABLEAUS), required=True)
        convergence.add_argument("--ladder", help="comma-separated step sizes")
        convergence.add_argument("--t-end", type=float, default=1.0, help="evaluation horizon")
        self._add_study_arguments(convergence)
        convergence.set_defaults(build=convergence_task)

        recovery = commands.add_parser(
            "recovery",
            help="recover continuous dynamics from DMD of one-stage and exact data",
        )
        recovery.add_argument("--h", type=float, default=0.05, help="step size")
        recovery.add_argument("--steps", type=int, default=400, help="number of steps")
        self._add_study_arguments(recovery)
        recovery.set_defaults(build=recovery_task)

        dmd = commands.add_parser("dmd", help="fit a DMD model to a snapshot CSV")
        dmd.add_argument("--input", type=Path, required=True, help="snapshot CSV (time, x1..xn)")
        dmd.add_argument("-o", "--out", type=Path, default=Path("dmd.json"), help="output JSON")
        dmd.add_argument("--rank-tol", type=float, help="relative rank tolerance")
        dmd.set_defaults(build=dmd_task)

        integrate = commands.add_parser("integrate", help="integrate x' = F x")
        integrate.add_argument("--tableau", choices=TABLEAU_CHOICES, required=True)
        integrate.add_argument("--system", type=Path, required=True, help="CSV of the matrix F")
        integrate.add_argument("--x0", required=True, help="comma-separated initial value")
        integrate.add_argument("--h", type=float, required=True, help="step size")
        integrate.add_argument("--steps", type=int, required=True, help="number of steps")
        integrate.add_argument(
            "-o",
            "--out",
            type=Path,
            default=Path("trajectory.csv"),
            help="output snapshot CSV",
        )
        integrate.set_defaults(build=integrate_task)

    @staticmethod
    def _add_study_arguments(parser: ArgumentParser) -> None:
        parser.add_argument("--n", type=int, default=8, help="dimension of the test system")
        parser.add_argument("--seed", type=int, default=42, help="seed of the test system")
        parser.add_argument("--rank-tol", type=float, help="relative rank tolerance")
        parser.add_argument("-o", "--out", type=Path, default=DEFAULT_OUTPUT_DIR)

    def prepare(self, args: Namespace, options: PipelineOptions) -> Pipeline:
        builder: TaskBuilder = args.build
        task, resources = builder(args)
        return Pipeline(
            tasks=[task],
            resources=resources,
            options=replace(options, force_run=True),
        )


def exit_code_for(error: BaseException) -> int:
    """Exit code of the most specific known error in the chain of causes."""
    current: BaseException | None = error
    while current is not None:
        if isinstance(current, MultipleDataErrors):
            return EXIT_CHECK_FAILED
        elif isinstance(current, (InputError, FileNotFoundError)):
            return EXIT_INPUT_ERROR
        elif isinstance(current, NumericalError):
            return EXIT_NUMERICAL_ERROR
        current = current.__cause__ or current.__context__
    raise error


def main() -> int:
    try:
        DMDSysIdApp().run()
    except Exception as e:
        code = exit_code_for(e)
        logger.error("%s", e)
        return code
    return EXIT_SUCCESS
