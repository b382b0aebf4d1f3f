import math
from functools import lru_cache

from schema import And, Optional, Or, Schema, Use

from lconsistency.densities import BASE_FAMILIES
from lconsistency.experiments.scenario import Claim, RuleKind
from lconsistency.projection import TieMode

SCHEMA_VERSION = 1

# general purpose schemas


@lru_cache()
def _non_empty_schema():
    return Schema(len, error='{} should not be empty')


@lru_cache()
def _len_schema(n: int):
    return Schema(
        lambda data: len(data) == n, error=f'{{}} should have length {n}'
    )


@lru_cache()
def _unique_schema():
    return Schema(
        lambda data: len(set(data)) == len(data),
        error='{} should have unique elements',
    )


@lru_cache()
def _increasing_schema():
    return Schema(
        lambda data: all(a < b for a, b in zip(data[:-1], data[1:])),
        error='{} should be strictly increasing',
    )


@lru_cache()
def _number_schema():
    # JSON-style `1e-9` is read as a string by YAML 1.1 loaders
    return Schema(
        Or(
            And(Or(int, float), lambda data: not isinstance(data, bool)),
            And(str, Use(float)),
        ),
        error='{} should be a number',
    )


@lru_cache()
def _finite_schema():
    return Schema(
        And(_number_schema(), Use(float), math.isfinite),
        error='{} should be a finite number',
    )


@lru_cache()
def _positive_schema():
    return Schema(
        And(_finite_schema(), lambda data: data > 0.0),
        error='{} should be a positive number',
    )


@lru_cache()
def _non_negative_schema():
    return Schema(
        And(_finite_schema(), lambda data: data >= 0.0),
        error='{} should be a non-negative number',
    )


@lru_cache()
def _count_schema(minimum: int):
    return Schema(
        And(
            int,
            lambda data: not isinstance(data, bool) and data >= minimum,
        ),
        error=f'{{}} should be an integer >= {minimum}',
    )


@lru_cache()
def _fraction_schema():
    return Schema(
        And(_finite_schema(), lambda data: 0.0 <= data <= 1.0),
        error='{} should be in [0, 1]',
    )


_base_families = [density_type.family.value for density_type in BASE_FAMILIES]

# base schemas
schemas = {
    'number': _number_schema(),
    'index': _count_schema(0),
    'family': Schema(Or(*_base_families)),
    'claim': Schema(Or(*(claim.value for claim in Claim))),
    'rule_kind': Schema(Or(*(kind.value for kind in RuleKind))),
}

schemas.update(
    {
        'indices': Schema(
            And(
                [schemas['index']],
                _non_empty_schema(),
                _unique_schema(),
            ),
            description='A non-empty list of unique model indices',
        ),
        'support': Schema(
            And([_number_schema()], _len_schema(2)),
            description='A [low, high] pair;  endpoints may be `inf`/`-inf`',
        ),
    }
)

# density schemas
schemas.update(
    {
        'base_density': Schema(
            {
                'family': schemas['family'],
                'params': And([_finite_schema()], _non_empty_schema()),
                Optional('support'): schemas['support'],
            },
            description='A base-family density',
            name='base_density',
            as_reference=True,
        ),
    }
)

schemas.update(
    {
        'mixture': Schema(
            {
                'family': 'mixture',
                'components': And(
                    [schemas['base_density']], _non_empty_schema()
                ),
                'weights': And([_non_negative_schema()], _non_empty_schema()),
            },
            description='A finite mixture of base-family densities',
            name='mixture',
            as_reference=True,
        ),
    }
)

schemas.update(
    {
        'density': Schema(
            Or(schemas['base_density'], schemas['mixture']),
            description='A density:  base family or finite mixture',
        ),
    }
)

# model set schemas
schemas.update(
    {
        'indexed_family': Schema(
            {
                'family': schemas['family'],
                'template': And([_finite_schema()], _non_empty_schema()),
                'vary': schemas['index'],
                'start': _finite_schema(),
                'step': _finite_schema(),
                'truncation': _count_schema(1),
                Optional('prior'): Or('uniform', 'geometric'),
                Optional('ratio'): And(
                    _finite_schema(), lambda data: 0.0 < data < 1.0
                ),
            },
            description='Truncation of a one-parameter indexed family of sources',
        ),
    }
)

schemas.update(
    {
        'model_set': Schema(
            Or(
                {
                    'models': And(
                        [schemas['density']], _non_empty_schema()
                    ),
                    Optional('prior'): And(
                        [_positive_schema()], _non_empty_schema()
                    ),
                },
                {'indexed': schemas['indexed_family']},
            ),
            description='Explicit models with prior weights, or an indexed family',
        ),
    }
)

# experiment schemas
schemas.update(
    {
        'ties': Schema(
            Or(
                {
                    'mode': TieMode.NUMERIC.value,
                    Optional('tolerance'): _non_negative_schema(),
                },
                {
                    'mode': TieMode.STRUCTURAL.value,
                    'indices': And(schemas['indices'], lambda data: len(data) >= 2),
                    Optional('tolerance'): _non_negative_schema(),
                },
            ),
            description='How tied L-projections are detected',
        ),
        'acceptance_rule': Schema(
            {
                'statistic': str,
                'kind': schemas['rule_kind'],
                Optional('target'): Or('auto', _finite_schema()),
                Optional('tolerance'): _non_negative_schema(),
                Optional('fraction'): _fraction_schema(),
                Optional('checkpoint'): schemas['index'],
            },
            description='A pass/fail criterion on one statistic',
            name='acceptance_rule',
            as_reference=True,
        ),
        'tolerances': Schema(
            {Optional('rel_tol'): And(_positive_schema(), lambda data: data <= 1e-2)},
            description='Numerical tolerance overrides',
        ),
        'outputs': Schema(
            {
                Optional('trace'): str,
                Optional('summary'): str,
                Optional('histogram'): str,
                Optional('metadata'): str,
            },
            description='Output file names, relative to the output directory',
        ),
    }
)

# scenario schema
schemas.update(
    {
        'scenario': Schema(
            {
                'version': SCHEMA_VERSION,
                'name': And(str, _non_empty_schema()),
                'claim': schemas['claim'],
                'true_source': schemas['density'],
                'model_set': schemas['model_set'],
                'epsilon': _positive_schema(),
                'n_schedule': And(
                    [schemas['index']],
                    _non_empty_schema(),
                    _increasing_schema(),
                ),
                'replicates': _count_schema(1),
                'seed': _count_schema(0),
                Optional('subset'): Or('auto', schemas['indices']),
                Optional('ties'): schemas['ties'],
                Optional('tolerances'): schemas['tolerances'],
                Optional('acceptance'): [schemas['acceptance_rule']],
                Optional('histogram_bins'): _count_schema(1),
                Optional('outputs'): schemas['outputs'],
            },
            description='A replicated posterior-consistency experiment',
        )
    }
)
