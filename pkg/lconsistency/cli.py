""" Command-line front end:  `divergence`, `project` and `run` subcommands

Exit codes:  0 success or acceptance pass, 2 input error, 3 degenerate
scenario, 4 acceptance failure.  Every error path prints a single line
`lconsistency: <reason>: <message>` on stderr.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import logging
import os
import sys
from functools import partial
from typing import List, NoReturn, Optional

import yaml
from schema import SchemaError
from tqdm import tqdm

from lconsistency.densities import density_from_spec
from lconsistency.divergence import (
    DivergenceValue,
    differential_entropy,
    i_divergence,
    l_divergence,
)
from lconsistency.experiments.metadata import build_metadata, write_metadata
from lconsistency.experiments.records import format_float, write_trace
from lconsistency.experiments.runners import prepare, run_scenario
from lconsistency.experiments.scenario import ScenarioFile, ScenarioRejected
from lconsistency.experiments.summary import (
    summarize,
    write_histogram,
    write_summary,
)
from lconsistency.experiments.yaml.factory import factory_scenario_from_yaml
from lconsistency.projection import NoProjectionError
from lconsistency.quadrature import (
    ACCEPTANCE_REL_TOL,
    MAX_REL_TOL,
    NonConvergenceError,
)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_DEGENERATE = 3
EXIT_ACCEPTANCE_FAILURE = 4

logger = logging.getLogger(__name__)


class CLIError(Exception):
    """An error reported to the user with an exit code and a reason prefix"""

    def __init__(self, code: int, reason: str, message: str):
        super().__init__(' '.join(message.split()))
        self.code = code
        self.reason = reason


def input_error(message: str) -> CLIError:
    return CLIError(EXIT_INPUT_ERROR, 'input-error', message)


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise input_error(message)


def _tolerance(text: str) -> float:
    try:
        value = float(text)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f'invalid tolerance `{text}`') from error
    if not 0.0 < value <= MAX_REL_TOL:
        raise argparse.ArgumentTypeError(
            f'tolerance ({value}) should be in (0, {MAX_REL_TOL}]'
        )
    return value


def load_scenario_file(path: str) -> ScenarioFile:
    """Loads and validates a scenario file, mapping failures to input errors"""
    try:
        return factory_scenario_from_yaml(path)
    except OSError as error:
        raise input_error(f'cannot read {path}: {error.strerror}') from error
    except (yaml.YAMLError, ValueError) as error:
        # yaml errors carry line/column marks;  json errors are ValueErrors
        raise input_error(f'{path}: {error}') from error
    except SchemaError as error:
        raise input_error(f'{path}: {error.code}') from error
    except (IndexError, TypeError) as error:
        raise input_error(f'{path}: {error}') from error


def format_divergence(value: DivergenceValue) -> str:
    return (
        f'{value.kind.value} {format_float(value.value)} '
        f'error {format_float(value.numerical_error)}'
    )


def cmd_divergence(args: argparse.Namespace) -> int:
    """Prints L(q||p), I(p||q), or the differential entropy h(p)"""
    try:
        p = density_from_spec(args.p)
        q = density_from_spec(args.q) if args.q is not None else None
    except ValueError as error:
        raise input_error(str(error)) from error

    if args.kind != 'entropy' and q is None:
        raise input_error(f'--kind {args.kind} needs --q')

    try:
        if args.kind == 'L':
            value = l_divergence(q, p, args.tol)
        elif args.kind == 'I':
            value = i_divergence(p, q, args.tol)
        else:
            value = differential_entropy(p, args.tol)
    except NonConvergenceError as error:
        raise CLIError(EXIT_DEGENERATE, 'non-convergence', str(error)) from error

    print(format_divergence(value))
    return EXIT_OK


def cmd_project(args: argparse.Namespace) -> int:
    """Prints the L-projections of the true source onto the model set"""
    scenario = load_scenario_file(args.scenario).scenario
    if args.tol is not None:
        scenario = scenario.with_rel_tol(args.tol)

    try:
        report = scenario.project()
    except NoProjectionError as error:
        raise CLIError(EXIT_DEGENERATE, 'no-projection', str(error)) from error
    except NonConvergenceError as error:
        raise CLIError(EXIT_DEGENERATE, 'non-convergence', str(error)) from error
    except ValueError as error:
        raise input_error(str(error)) from error

    print(f'min_value {format_float(report.min_value)}')
    print(f'k {report.k}')
    print(f'projections {",".join(map(str, report.projection_indices))}')
    print(f'tie_mode {report.tie_mode.value}')
    for row, model in zip(report.rows(), scenario.model_set.models):
        marker = '*' if row['is_projection'] else ' '
        print(
            f'{marker} {row["index"]} {model.spec} '
            f'L={format_float(row["l_value"])} gap={format_float(row["gap"])}'
        )

    if args.csv is not None:
        try:
            with open(args.csv, 'w', newline='') as f:
                writer = csv.writer(f, lineterminator='\n')
                writer.writerow(['index', 'model', 'l_value', 'gap', 'is_projection'])
                for row, model in zip(report.rows(), scenario.model_set.models):
                    writer.writerow(
                        [
                            row['index'],
                            model.spec,
                            format_float(row['l_value']),
                            format_float(row['gap']),
                            int(row['is_projection']),
                        ]
                    )
        except OSError as error:
            raise input_error(f'cannot write {args.csv}: {error.strerror}') from error

    return EXIT_OK


def _prepare_output_directory(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as error:
        raise input_error(f'cannot create output directory {path}: {error.strerror}') from error
    if not os.access(path, os.W_OK):
        raise input_error(f'output directory {path} is not writable')


def cmd_run(args: argparse.Namespace) -> int:
    """Runs a scenario, writes its outputs and checks its acceptance rules"""
    scenario_file = load_scenario_file(args.scenario)
    scenario = scenario_file.scenario
    if args.seed is not None:
        if args.seed < 0:
            raise input_error(f'seed ({args.seed}) should be non-negative')
        scenario = scenario.with_seed(args.seed)
    if args.tol is not None:
        scenario = scenario.with_rel_tol(args.tol)
    if args.jobs < 1:
        raise input_error(f'jobs ({args.jobs}) should be at least 1')

    _prepare_output_directory(args.out)

    logger.info('projecting %s onto %d models', scenario.true_source, len(scenario.model_set))
    try:
        plan = prepare(scenario)
    except ScenarioRejected as error:
        raise CLIError(EXIT_DEGENERATE, 'rejected', str(error)) from error
    except NonConvergenceError as error:
        raise CLIError(EXIT_DEGENERATE, 'non-convergence', str(error)) from error
    except ValueError as error:
        raise input_error(str(error)) from error

    logger.info(
        'running %d replicates of %s with %d job(s)',
        scenario.replicates,
        scenario.claim.value,
        args.jobs,
    )
    progress = (
        partial(tqdm, total=scenario.replicates, desc=scenario.name, file=sys.stderr)
        if args.progress
        else None
    )
    records = run_scenario(scenario, jobs=args.jobs, plan=plan, progress=progress)
    summary = summarize(records, scenario, plan)

    outputs = scenario_file.outputs
    paths = {
        name: os.path.join(args.out, filename)
        for name, filename in dataclasses.asdict(outputs).items()
    }
    try:
        write_trace(paths['trace'], records)
        write_summary(paths['summary'], summary)
        write_histogram(paths['histogram'], summary)
        write_metadata(paths['metadata'], build_metadata(scenario, plan, summary))
    except OSError as error:
        raise input_error(f'cannot write outputs: {error}') from error
    logger.info('wrote %s', ', '.join(paths.values()))

    for outcome in summary.outcomes:
        print(outcome.describe())
    for statistic, flag in summary.concentration.items():
        print(f'DIAGNOSTIC {statistic} at n={scenario.final_n}: {flag}')

    if not summary.passed:
        failed = sum(not outcome.passed for outcome in summary.outcomes)
        raise CLIError(
            EXIT_ACCEPTANCE_FAILURE,
            'acceptance-failed',
            f'{failed} of {len(summary.outcomes)} acceptance rules failed',
        )

    return EXIT_OK


def make_parser() -> ArgumentParser:
    parser = ArgumentParser(
        prog='lconsistency',
        description='posterior consistency in L-divergence for discrete priors',
    )
    parser.add_argument('-v', '--verbose', action='store_true', help='log progress')
    subparsers = parser.add_subparsers(dest='command', required=True)

    divergence = subparsers.add_parser('divergence', help='evaluate a divergence')
    divergence.add_argument('--kind', choices=['L', 'I', 'entropy'], default='L')
    divergence.add_argument('--q', default=None, help='model density, e.g. gaussian:1,1')
    divergence.add_argument('--p', required=True, help='reference density, e.g. gaussian:0,1')
    divergence.add_argument(
        '--tol', type=_tolerance, default=ACCEPTANCE_REL_TOL, help='relative tolerance'
    )
    divergence.set_defaults(function=cmd_divergence)

    project = subparsers.add_parser('project', help='compute L-projections')
    project.add_argument('scenario', help='scenario file (YAML or JSON)')
    project.add_argument('--csv', default=None, help='write the report as CSV')
    project.add_argument('--tol', type=_tolerance, default=None, help='relative tolerance')
    project.set_defaults(function=cmd_project)

    run = subparsers.add_parser('run', help='run a scenario')
    run.add_argument('scenario', help='scenario file (YAML or JSON)')
    run.add_argument('--out', default='.', help='output directory')
    run.add_argument('--jobs', type=int, default=1, help='worker processes')
    run.add_argument('--seed', type=int, default=None, help='override the scenario seed')
    run.add_argument('--tol', type=_tolerance, default=None, help='relative tolerance')
    run.add_argument('--progress', action='store_true', help='show a progress bar')
    run.set_defaults(function=cmd_run)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = make_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format='%(asctime)s %(name)s %(levelname)s %(message)s',
        )
        return args.function(args)
    except CLIError as error:
        print(f'lconsistency: {error.reason}: {error}', file=sys.stderr)
        return error.code


if __name__ == '__main__':
    sys.exit(main())
