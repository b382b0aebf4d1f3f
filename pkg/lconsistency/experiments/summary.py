""" Cross-replicate aggregation of trace records and acceptance rules """
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import more_itertools as mitt
import numpy as np

from lconsistency.experiments.records import TraceRecord, format_float
from lconsistency.experiments.runners import ExperimentPlan, prepare
from lconsistency.experiments.scenario import AcceptanceRule, RuleKind, Scenario

SUMMARY_HEADER = (
    'statistic',
    'n',
    'count',
    'mean',
    'sd',
    'min',
    'max',
    'target',
    'alt_target',
)
HISTOGRAM_HEADER = ('statistic', 'n', 'bin_low', 'bin_high', 'count')

CENTRAL_BAND = 0.1
"""Half-width of the band around 1/k counted as concentrated"""

EDGE_BAND = 0.1
"""Width of the bands near 0 and 1 counted as polarized"""


@dataclass(frozen=True)
class SummaryRow:
    statistic: str
    n: int
    count: int
    mean: float
    sd: float
    min: float
    max: float
    target: float = math.nan
    alt_target: float = math.nan


@dataclass(frozen=True)
class HistogramRow:
    statistic: str
    n: int
    bin_low: float
    bin_high: float
    count: int


@dataclass(frozen=True)
class RuleOutcome:
    """Result of one acceptance rule;  `observed` is a fraction or a mean"""

    rule: AcceptanceRule
    n: int
    target: float
    observed: float
    passed: bool

    def describe(self) -> str:
        verdict = 'PASS' if self.passed else 'FAIL'
        return (
            f'{verdict} {self.rule.describe()} '
            f'(target {format_float(self.target)}, '
            f'observed {format_float(self.observed)})'
        )


@dataclass(frozen=True)
class SummaryReport:
    rows: Tuple[SummaryRow, ...]
    histograms: Tuple[HistogramRow, ...]
    outcomes: Tuple[RuleOutcome, ...]
    concentration: Dict[str, str]

    @property
    def passed(self) -> bool:
        return all(outcome.passed for outcome in self.outcomes)

    def row(self, statistic: str, n: int) -> SummaryRow:
        try:
            return next(
                row for row in self.rows if row.statistic == statistic and row.n == n
            )
        except StopIteration as error:
            raise KeyError(f'no summary row for {statistic} at n={n}') from error


def group_values(
    records: Sequence[TraceRecord],
) -> Dict[Tuple[str, int], np.ndarray]:
    """Values of every (statistic, checkpoint), in replicate order"""
    groups = mitt.map_reduce(
        records,
        keyfunc=lambda record: (record.statistic, record.n),
        valuefunc=lambda record: (record.replicate, record.value),
    )
    return {
        key: np.array([value for _, value in sorted(pairs)])
        for key, pairs in sorted(groups.items())
    }


def _describe(values: np.ndarray) -> Tuple[float, float, float, float]:
    with np.errstate(invalid='ignore'):
        return (
            float(np.mean(values)),
            float(np.std(values)),
            float(np.min(values)),
            float(np.max(values)),
        )


def concentration_flag(values: np.ndarray, k: int) -> str:
    """Whether block masses cluster at 1/k, at the edges {0, 1}, or neither"""
    central = np.mean(np.abs(values - 1.0 / k) <= CENTRAL_BAND)
    edges = np.mean((values <= EDGE_BAND) | (values >= 1.0 - EDGE_BAND))
    if central >= 0.5:
        return 'concentrated'
    if edges >= 0.5:
        return 'polarized'
    return 'diffuse'


def evaluate_rule(
    rule: AcceptanceRule,
    values: np.ndarray,
    n: int,
    target: float,
) -> RuleOutcome:
    if rule.kind is RuleKind.MEAN:
        observed = float(np.mean(values))
        passed = abs(observed - target) <= rule.tolerance
        return RuleOutcome(rule, n, target, observed, bool(passed))

    if rule.kind is RuleKind.PROXIMITY:
        hits = np.abs(values - target) <= rule.tolerance
    elif rule.kind is RuleKind.UPPER:
        hits = values <= target
    else:
        hits = values >= target

    observed = float(np.mean(hits))
    return RuleOutcome(rule, n, target, observed, observed >= rule.fraction)


def summarize(
    records: Sequence[TraceRecord],
    scenario: Scenario,
    plan: Optional[ExperimentPlan] = None,
) -> SummaryReport:
    """Deterministic aggregation of trace records

    Args:
        records (`Sequence[TraceRecord]`): records of every replicate
        scenario (`Scenario`): the scenario that produced the records
        plan (`ExperimentPlan, optional`): recomputed when not given
    Returns:
        SummaryReport: per-checkpoint statistics, histograms and rule outcomes
    """
    if len(records) == 0:
        raise ValueError('cannot summarize an empty record set')

    if plan is None:
        plan = prepare(scenario)

    groups = group_values(records)

    rows = tuple(
        SummaryRow(
            statistic,
            n,
            len(values),
            *_describe(values),
            target=plan.targets.get(statistic, math.nan),
            alt_target=plan.alt_targets.get(statistic, math.nan),
        )
        for (statistic, n), values in groups.items()
    )

    histograms = []
    concentration = {}
    for statistic in plan.histogram_statistics:
        for n in scenario.n_schedule:
            values = groups.get((statistic, n))
            if values is None:
                continue
            counts, edges = np.histogram(
                np.clip(values, 0.0, 1.0), bins=scenario.histogram_bins, range=(0.0, 1.0)
            )
            histograms.extend(
                HistogramRow(statistic, n, float(low), float(high), int(count))
                for low, high, count in zip(edges[:-1], edges[1:], counts)
            )
        final = groups.get((statistic, scenario.final_n))
        if final is not None:
            concentration[statistic] = concentration_flag(final, plan.report.k)

    outcomes = []
    for rule in scenario.acceptance:
        n = scenario.final_n if rule.checkpoint is None else rule.checkpoint
        values = groups.get((rule.statistic, n))
        if values is None:
            raise ValueError(f'no records for {rule.statistic} at n={n}')
        target = rule.target if rule.target is not None else plan.targets[rule.statistic]
        outcomes.append(evaluate_rule(rule, values, n, target))

    return SummaryReport(rows, tuple(histograms), tuple(outcomes), concentration)


def write_summary(path: str, report: SummaryReport):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(SUMMARY_HEADER)
        for row in report.rows:
            writer.writerow(
                [row.statistic, row.n, row.count]
                + [
                    format_float(value)
                    for value in (
                        row.mean,
                        row.sd,
                        row.min,
                        row.max,
                        row.target,
                        row.alt_target,
                    )
                ]
            )


def write_histogram(path: str, report: SummaryReport):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(HISTOGRAM_HEADER)
        for row in report.histograms:
            writer.writerow(
                [
                    row.statistic,
                    row.n,
                    format_float(row.bin_low),
                    format_float(row.bin_high),
                    row.count,
                ]
            )
