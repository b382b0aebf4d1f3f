import json
import os
from typing import Any, Dict, Tuple

import yaml
from lconsistency.densities import Density, FiniteMixture, make_density
from lconsistency.experiments.scenario import (
    AcceptanceRule,
    Claim,
    OutputPaths,
    RuleKind,
    Scenario,
    ScenarioFile,
)
from lconsistency.experiments.yaml.schemas import schemas
from lconsistency.projection import DEFAULT_TIE_TOLERANCE, ModelSet, TieMode
from lconsistency.quadrature import SWEEP_REL_TOL
from lconsistency.support import Interval


def factory_base_density(data) -> Density:
    data = schemas['base_density'].validate(data)
    density = make_density(data['family'], data['params'])

    if 'support' in data:
        support = Interval(*data['support'])
        if support != density.support:
            raise ValueError(
                f'declared support {support.as_tuple} of {density} differs '
                f'from its natural support {density.support.as_tuple}'
            )

    return density


def factory_density(data) -> Density:
    data = schemas['density'].validate(data)

    if data['family'] == 'mixture':
        components = tuple(factory_base_density(d) for d in data['components'])
        return FiniteMixture(components, tuple(data['weights']))

    return factory_base_density(data)


def factory_indexed_family(data) -> ModelSet:
    """Truncation of a one-parameter indexed family

    Model j has the template parameters, with parameter `vary` replaced by
    `start + j * step`.  The prior is uniform or geometric (proportional to
    `ratio ** j`), renormalized over the truncation.
    """
    data = schemas['indexed_family'].validate(data)

    template = list(data['template'])
    if data['vary'] >= len(template):
        raise ValueError(
            f'vary ({data["vary"]}) should index the template {template}'
        )

    models = []
    for j in range(data['truncation']):
        params = list(template)
        params[data['vary']] = data['start'] + j * data['step']
        models.append(make_density(data['family'], params))

    prior = data.get('prior', 'uniform')
    if prior == 'geometric':
        if 'ratio' not in data:
            raise ValueError('a geometric prior needs a `ratio`')
        weights = [data['ratio'] ** j for j in range(data['truncation'])]
    else:
        weights = [1.0] * data['truncation']

    return ModelSet.from_weights(models, weights, truncated=True)


def factory_model_set(data) -> ModelSet:
    data = schemas['model_set'].validate(data)

    if 'indexed' in data:
        return factory_indexed_family(data['indexed'])

    models = [factory_density(d) for d in data['models']]
    weights = data.get('prior', [1.0] * len(models))
    if len(weights) != len(models):
        raise ValueError(
            f'model set has {len(models)} models but {len(weights)} prior weights'
        )
    return ModelSet.from_weights(models, weights)


def factory_acceptance_rule(data) -> AcceptanceRule:
    data = schemas['acceptance_rule'].validate(data)

    target = data.get('target', 'auto')
    return AcceptanceRule(
        data['statistic'],
        RuleKind(data['kind']),
        target=None if target == 'auto' else target,
        tolerance=data.get('tolerance', 0.0),
        fraction=data.get('fraction', 1.0),
        checkpoint=data.get('checkpoint'),
    )


def factory_ties(data) -> Tuple[TieMode, float, Tuple[int, ...]]:
    data = schemas['ties'].validate(data)

    mode = TieMode(data['mode'])
    tolerance = data.get('tolerance', DEFAULT_TIE_TOLERANCE)
    indices = tuple(data.get('indices', ()))
    return mode, tolerance, indices


def factory_outputs(data) -> OutputPaths:
    data = schemas['outputs'].validate(data)
    return OutputPaths(**data)


def factory_scenario_from_data(data) -> ScenarioFile:
    data = schemas['scenario'].validate(data)

    tie_mode, tie_tolerance, tied_indices = (
        factory_ties(data['ties'])
        if 'ties' in data
        else (TieMode.NUMERIC, DEFAULT_TIE_TOLERANCE, ())
    )
    subset = data.get('subset', 'auto')
    tolerances = data.get('tolerances', {})

    scenario = Scenario(
        name=data['name'],
        claim=Claim(data['claim']),
        true_source=factory_density(data['true_source']),
        model_set=factory_model_set(data['model_set']),
        epsilon=data['epsilon'],
        n_schedule=tuple(data['n_schedule']),
        replicates=data['replicates'],
        seed=data['seed'],
        subset=None if subset == 'auto' else tuple(subset),
        tie_mode=tie_mode,
        tie_tolerance=tie_tolerance,
        tied_indices=tied_indices,
        rel_tol=tolerances.get('rel_tol', SWEEP_REL_TOL),
        acceptance=tuple(
            factory_acceptance_rule(d) for d in data.get('acceptance', [])
        ),
        histogram_bins=data.get('histogram_bins', 10),
    )
    outputs = (
        factory_outputs(data['outputs']) if 'outputs' in data else OutputPaths()
    )
    return ScenarioFile(scenario, outputs, data['version'])


def load_scenario_data(path: str) -> Dict[str, Any]:
    """Reads a scenario document;  `.json` files are read as JSON, others as YAML"""
    with open(path) as f:
        if os.path.splitext(path)[1].lower() == '.json':
            return json.load(f)
        return yaml.safe_load(f)


def factory_scenario_from_yaml(path: str) -> ScenarioFile:
    return factory_scenario_from_data(load_scenario_data(path))

