""" Declarative description of a replicated posterior-consistency experiment """
from __future__ import annotations

import dataclasses
import enum
import hashlib
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from lconsistency.densities import Density
from lconsistency.projection import (
    DEFAULT_TIE_TOLERANCE,
    Indices,
    ModelSet,
    ProjectionReport,
    TieMode,
    l_projection,
)
from lconsistency.quadrature import MAX_REL_TOL, SWEEP_REL_TOL


class ScenarioRejected(ValueError):
    """Raised when a scenario cannot test its claim (e.g. nothing to test)"""


class Claim(enum.Enum):
    """Asymptotic statement tested by a scenario"""

    LST = 'LST'
    COROLLARY = 'Corollary'
    EQUICONCENTRATION = 'EquiConcentration'


class RuleKind(enum.Enum):
    PROXIMITY = 'proximity'
    UPPER = 'upper'
    LOWER = 'lower'
    MEAN = 'mean'


@dataclass(frozen=True)
class AcceptanceRule:
    """Pass/fail criterion evaluated on one statistic at one checkpoint

    * proximity:  |value - target| <= tolerance in >= `fraction` of replicates
    * upper:      value <= target in >= `fraction` of replicates
    * lower:      value >= target in >= `fraction` of replicates
    * mean:       |cross-replicate mean - target| <= tolerance

    A `target` of None is replaced by the theoretical value of the statistic;
    a `checkpoint` of None means the final checkpoint.
    """

    statistic: str
    kind: RuleKind
    target: Optional[float] = None
    tolerance: float = 0.0
    fraction: float = 1.0
    checkpoint: Optional[int] = None

    def __post_init__(self):
        if not self.tolerance >= 0.0:
            raise ValueError(f'tolerance ({self.tolerance}) should be non-negative')
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f'fraction ({self.fraction}) should be in [0, 1]')

    def describe(self) -> str:
        target = 'auto' if self.target is None else repr(self.target)
        where = 'final' if self.checkpoint is None else f'n={self.checkpoint}'
        if self.kind is RuleKind.MEAN:
            return f'mean({self.statistic}) within {self.tolerance!r} of {target} at {where}'
        if self.kind is RuleKind.PROXIMITY:
            condition = f'|{self.statistic} - {target}| <= {self.tolerance!r}'
        elif self.kind is RuleKind.UPPER:
            condition = f'{self.statistic} <= {target}'
        else:
            condition = f'{self.statistic} >= {target}'
        return f'{condition} in >= {self.fraction:.0%} of replicates at {where}'


@dataclass(frozen=True)
class Scenario:
    """Replicated experiment:  true source, model set, claim and schedule

    The true source need not belong to the model set (misspecification).  A
    `subset` of None is derived from the projection report (the epsilon-bad
    set, or the partition blocks for equi-concentration).
    """

    name: str
    claim: Claim
    true_source: Density
    model_set: ModelSet
    epsilon: float
    n_schedule: Tuple[int, ...]
    replicates: int
    seed: int
    subset: Optional[Indices] = None
    tie_mode: TieMode = TieMode.NUMERIC
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE
    tied_indices: Indices = ()
    rel_tol: float = SWEEP_REL_TOL
    acceptance: Tuple[AcceptanceRule, ...] = ()
    histogram_bins: int = 10

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError(f'epsilon ({self.epsilon}) should be positive')
        if len(self.n_schedule) == 0:
            raise ValueError('n_schedule should not be empty')
        if self.n_schedule[0] < 0:
            raise ValueError('n_schedule should be non-negative')
        if any(a >= b for a, b in zip(self.n_schedule[:-1], self.n_schedule[1:])):
            raise ValueError(f'n_schedule {self.n_schedule} should be strictly increasing')
        if self.replicates < 1:
            raise ValueError(f'replicates ({self.replicates}) should be at least 1')
        if self.seed < 0:
            raise ValueError(f'seed ({self.seed}) should be non-negative')
        if self.subset is not None:
            if len(self.subset) == 0:
                raise ValueError('subset should not be empty')
            self.model_set.check_indices(self.subset)
        if self.tie_mode is TieMode.STRUCTURAL:
            if len(self.tied_indices) < 2:
                raise ValueError('structural ties need at least two indices')
            self.model_set.check_indices(self.tied_indices)
        if not 0.0 < self.rel_tol <= MAX_REL_TOL:
            raise ValueError(f'rel_tol ({self.rel_tol}) should be in (0, {MAX_REL_TOL}]')
        if self.histogram_bins < 1:
            raise ValueError('histogram_bins should be positive')
        for rule in self.acceptance:
            if rule.checkpoint is not None and rule.checkpoint not in self.n_schedule:
                raise ValueError(
                    f'acceptance checkpoint {rule.checkpoint} is not in n_schedule'
                )

    @property
    def final_n(self) -> int:
        return self.n_schedule[-1]

    @property
    def fingerprint(self) -> str:
        """sha256 of the scenario's canonical representation"""
        return hashlib.sha256(repr(self).encode()).hexdigest()

    def with_seed(self, seed: int) -> Scenario:
        return dataclasses.replace(self, seed=seed)

    def with_rel_tol(self, rel_tol: float) -> Scenario:
        return dataclasses.replace(self, rel_tol=rel_tol)

    def project(self) -> ProjectionReport:
        """L-projections of the true source onto the model set"""
        return l_projection(
            self.true_source,
            self.model_set,
            self.tie_tolerance,
            rel_tol=self.rel_tol,
            structural_ties=(
                self.tied_indices if self.tie_mode is TieMode.STRUCTURAL else None
            ),
        )


@dataclass(frozen=True)
class OutputPaths:
    """Output file names, relative to the output directory"""

    trace: str = 'trace.csv'
    summary: str = 'summary.csv'
    histogram: str = 'histogram.csv'
    metadata: str = 'metadata.yaml'


@dataclass(frozen=True)
class ScenarioFile:
    """Contents of a scenario file:  the scenario and where to write results"""

    scenario: Scenario
    outputs: OutputPaths = OutputPaths()
    version: int = 1
