from lconsistency.experiments.records import TraceRecord
from lconsistency.experiments.runners import (
    ExperimentPlan,
    planner_registry,
    prepare,
    run_corollary,
    run_equiconcentration,
    run_lst,
    run_scenario,
)
from lconsistency.experiments.scenario import (
    AcceptanceRule,
    Claim,
    OutputPaths,
    RuleKind,
    Scenario,
    ScenarioFile,
    ScenarioRejected,
)
from lconsistency.experiments.summary import SummaryReport, summarize

__all__ = [
    'AcceptanceRule',
    'Claim',
    'ExperimentPlan',
    'OutputPaths',
    'RuleKind',
    'Scenario',
    'ScenarioFile',
    'ScenarioRejected',
    'SummaryReport',
    'TraceRecord',
    'planner_registry',
    'prepare',
    'run_corollary',
    'run_equiconcentration',
    'run_lst',
    'run_scenario',
    'summarize',
]
