""" Run metadata written next to the trace and summary files """
from __future__ import annotations

from typing import Any, Dict

import yaml

import lconsistency
from lconsistency.experiments.runners import ExperimentPlan
from lconsistency.experiments.scenario import Scenario
from lconsistency.experiments.summary import SummaryReport

PARTITION_RULE = (
    'non-projection models join the block of the projection minimizing '
    'I(projection||model);  ties go to the lower model index'
)


def build_metadata(
    scenario: Scenario, plan: ExperimentPlan, summary: SummaryReport
) -> Dict[str, Any]:
    """Metadata of a run;  deterministic given the scenario and its records"""
    report = plan.report
    metadata: Dict[str, Any] = {
        'tool': 'lconsistency',
        'version': lconsistency.__version__,
        'scenario': scenario.name,
        'scenario_hash': scenario.fingerprint,
        'claim': scenario.claim.value,
        'seed': scenario.seed,
        'replicates': scenario.replicates,
        'n_schedule': list(scenario.n_schedule),
        'rel_tol': scenario.rel_tol,
        'true_source': scenario.true_source.spec,
        'models': [q.spec for q in scenario.model_set.models],
        'prior': list(scenario.model_set.prior),
        'truncation_size': len(scenario.model_set),
        'truncated': scenario.model_set.truncated,
        'tie_mode': report.tie_mode.value,
        'tie_tolerance': report.tie_tolerance,
        'projection': {
            'min_value': report.min_value,
            'indices': list(report.projection_indices),
            'k': report.k,
            'l_values': list(report.l_values),
            'gaps': list(report.gaps),
        },
        'targets': dict(sorted(plan.targets.items())),
        'acceptance': [
            {
                'rule': outcome.rule.describe(),
                'n': outcome.n,
                'target': outcome.target,
                'observed': outcome.observed,
                'passed': outcome.passed,
            }
            for outcome in summary.outcomes
        ],
        'passed': summary.passed,
    }

    if plan.blocks:
        metadata['partition'] = {
            'rule': PARTITION_RULE,
            'blocks': [list(block) for block in plan.blocks],
        }
        metadata['alt_targets'] = dict(sorted(plan.alt_targets.items()))
        metadata['concentration'] = dict(sorted(summary.concentration.items()))

    return metadata


def write_metadata(path: str, metadata: Dict[str, Any]):
    with open(path, 'w') as f:
        yaml.safe_dump(metadata, f, sort_keys=False)
