import math

import pytest

from lconsistency.densities import Gaussian, Uniform
from lconsistency.experiments.records import format_float
from lconsistency.experiments.runners import (
    MAP_STATISTIC,
    RESIDUAL_STATISTIC,
    ExperimentPlan,
    planner_registry,
    prepare,
    run_corollary,
    run_equiconcentration,
    run_lst,
    run_replicate,
    run_scenario,
)
from lconsistency.experiments.scenario import (
    AcceptanceRule,
    Claim,
    RuleKind,
    Scenario,
    ScenarioRejected,
)
from lconsistency.projection import ModelSet, TieMode


def lst_scenario(**kwargs) -> Scenario:
    defaults = dict(
        name='lst',
        claim=Claim.LST,
        true_source=Gaussian(0.0, 1.0),
        model_set=ModelSet.uniform([Gaussian(1.0, 1.0), Gaussian(2.0, 1.0)]),
        epsilon=0.5,
        n_schedule=(0, 10, 100),
        replicates=5,
        seed=1,
        subset=(1,),
    )
    defaults.update(kwargs)
    return Scenario(**defaults)


def equiconcentration_scenario(**kwargs) -> Scenario:
    defaults = dict(
        name='equi',
        claim=Claim.EQUICONCENTRATION,
        true_source=Gaussian(0.0, 1.0),
        model_set=ModelSet.uniform(
            [Gaussian(-1.0, 1.0), Gaussian(1.0, 1.0), Gaussian(3.0, 1.0)]
        ),
        epsilon=0.5,
        n_schedule=(10, 100),
        replicates=6,
        seed=2,
        tie_mode=TieMode.STRUCTURAL,
        tied_indices=(0, 1),
    )
    defaults.update(kwargs)
    return Scenario(**defaults)


def test_planner_registry():
    assert set(planner_registry) == {claim.value for claim in Claim}


def test_prepare_lst():
    plan = prepare(lst_scenario())
    assert isinstance(plan, ExperimentPlan)
    assert plan.claim is Claim.LST
    assert plan.targets['rate:N'] == pytest.approx(-1.5, abs=1e-6)
    assert plan.statistics == (
        'mass:N',
        'rate:N',
        'mass:projections',
        MAP_STATISTIC,
    )


def test_prepare_lst_default_subset():
    plan = prepare(lst_scenario(subset=None))
    assert plan.subsets[0].indices == (1,)


def test_prepare_corollary():
    scenario = lst_scenario(
        claim=Claim.COROLLARY,
        subset=None,
        model_set=ModelSet.uniform(
            [Gaussian(0.5, 1.0), Gaussian(1.0, 1.0), Gaussian(2.0, 1.0)]
        ),
    )
    plan = prepare(scenario)
    subsets = {subset.label: subset.indices for subset in plan.subsets}
    assert subsets == {'bad': (2,), 'good': (0, 1), 'projections': (0,)}
    assert plan.targets['rate:bad'] == pytest.approx(-1.875, abs=1e-6)
    assert plan.targets['mass:bad'] == 0.0


def test_prepare_equiconcentration():
    plan = prepare(equiconcentration_scenario())
    assert plan.blocks == ((0,), (1,))
    assert plan.targets['mass:block1'] == 0.5
    assert plan.alt_targets['mass:block1'] == pytest.approx(0.5)
    assert plan.histogram_statistics == ('mass:block1', 'mass:block2')
    assert 'ratio:block1' in plan.statistics
    assert RESIDUAL_STATISTIC in plan.statistics


def test_prepare_equiconcentration_unequal_prior():
    model_set = ModelSet.from_weights(
        [Gaussian(-1.0, 1.0), Gaussian(1.0, 1.0)], [3.0, 7.0]
    )
    with pytest.warns(UserWarning):
        plan = prepare(equiconcentration_scenario(model_set=model_set))

    assert plan.targets['mass:block1'] == 0.5
    assert plan.alt_targets['mass:block1'] == pytest.approx(0.3)
    assert plan.alt_targets['mass:block2'] == pytest.approx(0.7)


@pytest.mark.parametrize(
    'scenario',
    [
        # empty bad set
        lst_scenario(subset=None, epsilon=10.0),
        lst_scenario(claim=Claim.COROLLARY, epsilon=10.0),
        # a single projection
        lst_scenario(claim=Claim.EQUICONCENTRATION),
        # no projection at all
        lst_scenario(
            true_source=Uniform(0.0, 2.0),
            model_set=ModelSet.uniform([Uniform(0.0, 1.0)]),
            subset=None,
        ),
        # unknown statistic
        lst_scenario(acceptance=(AcceptanceRule('mass:other', RuleKind.UPPER, 0.1),)),
        # no theoretical target
        lst_scenario(acceptance=(AcceptanceRule('mass:N', RuleKind.UPPER),)),
    ],
)
def test_prepare_rejected(scenario: Scenario):
    with pytest.raises(ScenarioRejected):
        prepare(scenario)


def test_run_replicate():
    scenario = lst_scenario()
    records = run_replicate(prepare(scenario), scenario, 0)

    at_zero = [record for record in records if record.n == 0]
    assert {record.statistic for record in at_zero} == {
        'mass:N',
        'mass:projections',
        MAP_STATISTIC,
    }
    assert {record.n for record in records} == {0, 10, 100}

    for record in records:
        assert record.replicate == 0
        if record.is_bounded:
            assert record.lower <= record.value
            assert record.value <= record.upper

    mass = next(r for r in at_zero if r.statistic == 'mass:N')
    assert mass.value == pytest.approx(0.5)


def test_run_scenario_ordered():
    records = run_scenario(lst_scenario())
    replicates = [record.replicate for record in records]
    assert replicates == sorted(replicates)
    assert set(replicates) == set(range(5))


def as_rows(records):
    return [
        (r.replicate, r.n, r.statistic)
        + tuple(format_float(v) for v in (r.value, r.lower, r.upper))
        for r in records
    ]


def test_run_scenario_jobs():
    scenario = lst_scenario(replicates=8)
    assert as_rows(run_scenario(scenario, jobs=1)) == as_rows(
        run_scenario(scenario, jobs=3)
    )


def test_run_scenario_seed():
    assert run_scenario(lst_scenario()) == run_scenario(lst_scenario())
    assert run_scenario(lst_scenario()) != run_scenario(lst_scenario(seed=2))


def test_run_scenario_progress():
    seen = []

    def progress(iterable):
        for item in iterable:
            seen.append(item)
            yield item

    records = run_scenario(lst_scenario(), progress=progress)
    assert len(seen) == 5
    assert sum(map(len, seen)) == len(records)


def test_run_scenario_invalid_jobs():
    with pytest.raises(ValueError):
        run_scenario(lst_scenario(), jobs=0)


def test_run_claims():
    assert run_lst(lst_scenario())
    with pytest.raises(ScenarioRejected):
        run_corollary(lst_scenario())
    with pytest.raises(ScenarioRejected):
        run_equiconcentration(lst_scenario())


def test_equiconcentration_masses_sum_to_one():
    scenario = equiconcentration_scenario(n_schedule=(0, 10, 100, 1000))
    records = run_equiconcentration(scenario)

    values = {(r.replicate, r.n, r.statistic): r.value for r in records}
    for replicate in range(scenario.replicates):
        for n in scenario.n_schedule:
            total = (
                values[replicate, n, 'mass:block1']
                + values[replicate, n, 'mass:block2']
                + values[replicate, n, 'mass:bad']
            )
            assert total == pytest.approx(1.0, abs=1e-9)


def test_equiconcentration_blocks_sum():
    scenario = equiconcentration_scenario()
    records = run_equiconcentration(scenario)

    values = {(r.replicate, r.n, r.statistic): r.value for r in records}
    for replicate in range(scenario.replicates):
        for n in scenario.n_schedule:
            block_total = values[replicate, n, 'mass:block1'] + values[
                replicate, n, 'mass:block2'
            ]
            assert block_total == pytest.approx(
                values[replicate, n, 'mass:good'], abs=1e-9
            )
            assert not math.isnan(values[replicate, n, RESIDUAL_STATISTIC])
