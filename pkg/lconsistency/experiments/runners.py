""" Replicated Monte Carlo runs of the consistency claims

Each claim registers a planner that, given the scenario and its projection
report, decides which subsets to track and what their theoretical targets
are.  Replicates then share one streaming loop:  every replicate draws its
own counter-based sample stream and performs a single posterior pass,
recording statistics at each checkpoint.
"""
from __future__ import annotations

import inspect
import itertools as itt
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import more_itertools as mitt
from typing_extensions import Protocol

from lconsistency.densities import SampleStream
from lconsistency.experiments.records import TraceRecord
from lconsistency.experiments.scenario import Claim, Scenario, ScenarioRejected
from lconsistency.posterior import (
    PosteriorState,
    concentration_terms,
    init,
    log_subset_mass,
    map_indices,
    sandwich_bounds,
    update,
)
from lconsistency.projection import (
    Indices,
    NoProjectionError,
    ProjectionReport,
    epsilon_bad_set,
    epsilon_good_set,
    projection_partition,
)
from lconsistency.utils.protocols import get_positional_parameters
from lconsistency.utils.registry import FunctionRegistry

UPDATE_CHUNK_SIZE = 1 << 16
"""Maximum number of observations consumed per posterior update"""

MAP_STATISTIC = 'map:projection'
RESIDUAL_STATISTIC = 'ratio:residual'


def mass_statistic(label: str) -> str:
    return f'mass:{label}'


def rate_statistic_name(label: str) -> str:
    return f'rate:{label}'


def ratio_statistic(label: str) -> str:
    return f'ratio:{label}'


@dataclass(frozen=True)
class TrackedSubset:
    """A subset of models whose posterior mass is recorded"""

    label: str
    indices: Indices
    record_rate: bool = False


@dataclass(frozen=True)
class ExperimentPlan:
    """What a scenario records and the values theory predicts for it

    `alt_targets` carry diagnostic alternatives that are reported but never
    asserted (e.g. a prior-proportional split among tied projections).
    """

    claim: Claim
    report: ProjectionReport
    subsets: Tuple[TrackedSubset, ...]
    targets: Dict[str, float] = field(default_factory=dict)
    alt_targets: Dict[str, float] = field(default_factory=dict)
    blocks: Tuple[Indices, ...] = ()
    histogram_statistics: Tuple[str, ...] = ()

    @property
    def statistics(self) -> Tuple[str, ...]:
        names = []
        for subset in self.subsets:
            names.append(mass_statistic(subset.label))
            if subset.record_rate:
                names.append(rate_statistic_name(subset.label))
        names.append(MAP_STATISTIC)
        if self.blocks:
            names.extend(
                ratio_statistic(f'block{j + 1}') for j in range(len(self.blocks))
            )
            names.append(RESIDUAL_STATISTIC)
        return tuple(names)


class Planner(Protocol):
    """Signature that all claim planners must follow"""

    def __call__(
        self, scenario: Scenario, report: ProjectionReport
    ) -> ExperimentPlan:
        ...


class PlannerRegistry(FunctionRegistry):
    def get_protocol_parameters(
        self, signature: inspect.Signature
    ) -> List[inspect.Parameter]:
        return get_positional_parameters(signature, 2)

    def check_signature(self, function: Planner):
        signature = inspect.signature(function)
        scenario, report = self.get_protocol_parameters(signature)

        for parameter in (scenario, report):
            if parameter.kind not in [
                inspect.Parameter.POSITIONAL_OR_KEYWORD,
                inspect.Parameter.POSITIONAL_ONLY,
            ]:
                raise TypeError(
                    f'The argument ({parameter.name}) '
                    f'of a registered planner ({function}) '
                    'should be allowed to be a positional argument.'
                )

        if scenario.annotation not in [inspect.Parameter.empty, Scenario, 'Scenario']:
            warnings.warn(
                f'The first argument ({scenario.name}) '
                f'of a registered planner ({function}) '
                f'has an annotation ({scenario.annotation}) '
                'which is not `Scenario`.'
            )


planner_registry = PlannerRegistry()
"""Claim planner registry, keyed by claim value"""


def _projection_subset(report: ProjectionReport) -> TrackedSubset:
    return TrackedSubset('projections', report.projection_indices)


@planner_registry.register(name=Claim.LST.value)
def plan_lst(scenario: Scenario, report: ProjectionReport) -> ExperimentPlan:
    """Tracks the rate of decay of a subset N towards -gap(N)"""
    subset = (
        scenario.subset
        if scenario.subset is not None
        else epsilon_bad_set(report, scenario.epsilon)
    )
    if len(subset) == 0:
        raise ScenarioRejected(
            f'the epsilon-bad set is empty at epsilon={scenario.epsilon!r};  '
            'declare a subset'
        )

    gap = report.subset_gap(subset)
    if math.isinf(gap):
        raise ScenarioRejected(
            'every model of the subset has infinite L-divergence;  '
            'the target rate is not finite'
        )

    return ExperimentPlan(
        Claim.LST,
        report,
        (TrackedSubset('N', tuple(subset), True), _projection_subset(report)),
        targets={
            rate_statistic_name('N'): -gap,
            mass_statistic('projections'): 1.0,
            MAP_STATISTIC: 1.0,
        },
    )


@planner_registry.register(name=Claim.COROLLARY.value)
def plan_corollary(scenario: Scenario, report: ProjectionReport) -> ExperimentPlan:
    """Tracks the vanishing posterior mass of the epsilon-bad set"""
    bad = epsilon_bad_set(report, scenario.epsilon)
    if len(bad) == 0:
        raise ScenarioRejected(
            f'the epsilon-bad set is empty at epsilon={scenario.epsilon!r};  '
            'nothing to test'
        )

    good = epsilon_good_set(report, scenario.epsilon)
    return ExperimentPlan(
        Claim.COROLLARY,
        report,
        (
            TrackedSubset('bad', bad, True),
            TrackedSubset('good', good),
            _projection_subset(report),
        ),
        targets={
            mass_statistic('bad'): 0.0,
            rate_statistic_name('bad'): -report.subset_gap(bad),
            mass_statistic('good'): 1.0,
            mass_statistic('projections'): 1.0,
            MAP_STATISTIC: 1.0,
        },
    )


@planner_registry.register(name=Claim.EQUICONCENTRATION.value)
def plan_equiconcentration(
    scenario: Scenario, report: ProjectionReport
) -> ExperimentPlan:
    """Tracks the posterior mass of each partition block, against 1/k"""
    if report.k < 2:
        raise ScenarioRejected(
            'a single L-projection makes equi-concentration vacuous;  '
            'use the LST or Corollary claims'
        )

    blocks = tuple(projection_partition(report, scenario.epsilon))
    bad = epsilon_bad_set(report, scenario.epsilon)
    good = epsilon_good_set(report, scenario.epsilon)

    prior = scenario.model_set.prior
    projection_prior = sum(prior[i] for i in report.projection_indices)
    if len({prior[i] for i in report.projection_indices}) > 1:
        warnings.warn(
            'tied L-projections carry unequal prior masses;  the block masses '
            'are compared against both 1/k and the prior split'
        )

    subsets = [
        TrackedSubset(f'block{j + 1}', block) for j, block in enumerate(blocks)
    ]
    subsets.append(TrackedSubset('good', good))
    if bad:
        subsets.append(TrackedSubset('bad', bad))
    subsets.append(_projection_subset(report))

    block_statistics = tuple(mass_statistic(f'block{j + 1}') for j in range(len(blocks)))
    targets = {statistic: 1.0 / report.k for statistic in block_statistics}
    targets.update(
        {ratio_statistic(f'block{j + 1}'): 0.0 for j in range(len(blocks))}
    )
    targets[RESIDUAL_STATISTIC] = 0.0
    targets[mass_statistic('good')] = 1.0
    targets[mass_statistic('projections')] = 1.0
    alt_targets = {
        statistic: prior[p] / projection_prior
        for statistic, p in zip(block_statistics, report.projection_indices)
    }

    return ExperimentPlan(
        Claim.EQUICONCENTRATION,
        report,
        tuple(subsets),
        targets=targets,
        alt_targets=alt_targets,
        blocks=blocks,
        histogram_statistics=block_statistics,
    )


def prepare(scenario: Scenario) -> ExperimentPlan:
    """Projects the true source and plans the scenario's claim

    Raises:
        ScenarioRejected: if the claim cannot be tested on this scenario
    """
    try:
        report = scenario.project()
    except NoProjectionError as error:
        raise ScenarioRejected(str(error)) from error

    planner = planner_registry.lookup(scenario.claim.value)
    plan = planner(scenario, report)

    for rule in scenario.acceptance:
        if rule.statistic not in plan.statistics:
            raise ScenarioRejected(
                f'acceptance rule refers to unknown statistic `{rule.statistic}`;  '
                f'known statistics: {", ".join(plan.statistics)}'
            )
        if rule.target is None and rule.statistic not in plan.targets:
            raise ScenarioRejected(
                f'statistic `{rule.statistic}` has no theoretical target;  '
                'declare one explicitly'
            )

    return plan


def checkpoint_records(
    plan: ExperimentPlan, state: PosteriorState, replicate: int
) -> List[TraceRecord]:
    """Statistics of one replicate at the current checkpoint"""
    n = state.n
    records = []

    for subset in plan.subsets:
        log_mass = log_subset_mass(state, subset.indices)
        bounds = sandwich_bounds(state, subset.indices)
        records.append(
            TraceRecord(
                replicate,
                n,
                mass_statistic(subset.label),
                math.exp(log_mass),
                bounds.lower,
                bounds.upper,
            )
        )
        if subset.record_rate and n > 0:
            records.append(
                TraceRecord(
                    replicate,
                    n,
                    rate_statistic_name(subset.label),
                    log_mass / n,
                    bounds.log_lower / n,
                    bounds.log_upper / n,
                )
            )

    hit = set(map_indices(state)) <= set(plan.report.projection_indices)
    records.append(TraceRecord(replicate, n, MAP_STATISTIC, float(hit)))

    if plan.blocks:
        terms = concentration_terms(
            state, plan.blocks, plan.report.projection_indices
        )
        records.extend(
            TraceRecord(replicate, n, ratio_statistic(f'block{j + 1}'), ratio)
            for j, ratio in enumerate(terms.block_ratios)
        )
        records.append(
            TraceRecord(replicate, n, RESIDUAL_STATISTIC, terms.residual_ratio)
        )

    return records


def _advance(state: PosteriorState, stream: SampleStream, count: int) -> PosteriorState:
    while count > 0:
        size = min(count, UPDATE_CHUNK_SIZE)
        state = update(state, stream.take(size))
        count -= size
    return state


def run_replicate(
    plan: ExperimentPlan, scenario: Scenario, replicate: int
) -> List[TraceRecord]:
    """Single streaming posterior pass over all checkpoints of one replicate"""
    state = init(scenario.model_set)
    stream = SampleStream(scenario.true_source, scenario.seed, replicate)
    records = []

    for start, stop in mitt.pairwise(itt.chain([0], scenario.n_schedule)):
        state = _advance(state, stream, stop - start)
        records.extend(checkpoint_records(plan, state, replicate))

    return records


ProgressWrapper = Callable[[Iterable[List[TraceRecord]]], Iterable[List[TraceRecord]]]


def run_scenario(
    scenario: Scenario,
    *,
    jobs: int = 1,
    plan: Optional[ExperimentPlan] = None,
    progress: Optional[ProgressWrapper] = None,
) -> List[TraceRecord]:
    """Runs every replicate and returns records ordered by replicate

    Replicates run in up to `jobs` worker processes;  results never depend on
    `jobs` since every replicate owns its random substream.
    """
    if jobs < 1:
        raise ValueError(f'jobs ({jobs}) should be at least 1')

    if plan is None:
        plan = prepare(scenario)

    replicates = range(scenario.replicates)
    work = partial(run_replicate, plan, scenario)

    if jobs == 1:
        results: Iterable[List[TraceRecord]] = map(work, replicates)
        if progress is not None:
            results = progress(results)
        return list(itt.chain.from_iterable(results))

    chunksize = max(1, scenario.replicates // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        results = executor.map(work, replicates, chunksize=chunksize)
        if progress is not None:
            results = progress(results)
        return list(itt.chain.from_iterable(results))


def _run_claim(claim: Claim, scenario: Scenario, **kwargs) -> List[TraceRecord]:
    if scenario.claim is not claim:
        raise ScenarioRejected(
            f'scenario `{scenario.name}` tests {scenario.claim.value}, not {claim.value}'
        )
    return run_scenario(scenario, **kwargs)


def run_lst(scenario: Scenario, **kwargs) -> List[TraceRecord]:
    """Rate statistic of the subset N against -(L(N||r) - L(M||r))"""
    return _run_claim(Claim.LST, scenario, **kwargs)


def run_corollary(scenario: Scenario, **kwargs) -> List[TraceRecord]:
    """Posterior mass of the epsilon-bad set, with sandwich bounds"""
    return _run_claim(Claim.COROLLARY, scenario, **kwargs)


def run_equiconcentration(scenario: Scenario, **kwargs) -> List[TraceRecord]:
    """Posterior mass of every partition block against 1/k"""
    return _run_claim(Claim.EQUICONCENTRATION, scenario, **kwargs)
