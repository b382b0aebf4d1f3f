""" Model sets with strictly positive priors, and L-projections onto them """
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from lconsistency.densities import Density
from lconsistency.divergence import i_divergence, l_divergence
from lconsistency.quadrature import ACCEPTANCE_REL_TOL

DEFAULT_TIE_TOLERANCE = 1e-9
"""Tie tolerance, relative to the minimal L-divergence"""

STRUCTURAL_TIE_TOLERANCE = 1e-6
"""How far declared (structural) ties may drift numerically"""

PRIOR_SUM_TOLERANCE = 1e-12

Indices = Tuple[int, ...]


class NoProjectionError(ValueError):
    """Raised when every model has infinite L-divergence"""


class TieMode(enum.Enum):
    """How tied L-projections are detected"""

    NUMERIC = 'numeric'
    STRUCTURAL = 'structural'


@dataclass(frozen=True)
class ModelSet:
    """Finite (truncated) set of sources with a strictly positive prior

    `truncated` marks model sets obtained by truncating an indexed countable
    family, whose prior was renormalized over the retained models.
    """

    models: Tuple[Density, ...]
    prior: Tuple[float, ...]
    truncated: bool = False

    def __post_init__(self):
        if len(self.models) == 0:
            raise ValueError('model set should not be empty')
        if len(self.models) != len(self.prior):
            raise ValueError(
                f'model set has {len(self.models)} models '
                f'but {len(self.prior)} prior masses'
            )
        for mass in self.prior:
            if not (math.isfinite(mass) and mass > 0.0):
                raise ValueError(
                    f'prior mass ({mass}) should be strictly positive'
                )
        if abs(math.fsum(self.prior) - 1.0) > PRIOR_SUM_TOLERANCE:
            raise ValueError(f'prior {self.prior} should sum to 1')

    @staticmethod
    def from_weights(
        models: Sequence[Density],
        weights: Sequence[float],
        *,
        truncated: bool = False,
    ) -> ModelSet:
        """Model set whose prior is proportional to positive `weights`"""
        weights = [float(w) for w in weights]
        for weight in weights:
            if not (math.isfinite(weight) and weight > 0.0):
                raise ValueError(
                    f'prior weight ({weight}) should be strictly positive'
                )
        total = math.fsum(weights)
        return ModelSet(
            tuple(models), tuple(w / total for w in weights), truncated
        )

    @staticmethod
    def uniform(models: Sequence[Density]) -> ModelSet:
        return ModelSet.from_weights(models, [1.0] * len(models))

    def __len__(self) -> int:
        return len(self.models)

    @property
    def indices(self) -> Indices:
        return tuple(range(len(self.models)))

    @property
    def log_prior(self) -> np.ndarray:
        return np.log(np.asarray(self.prior, dtype=float))

    def check_indices(self, indices: Sequence[int]):
        for index in indices:
            if not 0 <= index < len(self.models):
                raise IndexError(
                    f'model index {index} out of range [0, {len(self.models)})'
                )


@dataclass(frozen=True)
class ProjectionReport:
    """L-projections of the true source onto a model set

    `projection_divergences[i][j]` is I(q_i||q_j) between the i-th
    L-projection (in index order) and model j;  it measures how far a model
    is from each projection and drives the nearest-projection partition.
    """

    min_value: float
    projection_indices: Indices
    gaps: Tuple[float, ...]
    tie_tolerance: float
    l_values: Tuple[float, ...]
    projection_divergences: Tuple[Tuple[float, ...], ...]
    tie_mode: TieMode = TieMode.NUMERIC

    def __post_init__(self):
        if len(self.projection_indices) == 0:
            raise ValueError('a projection report needs at least one projection')
        if any(gap < 0.0 for gap in self.gaps):
            raise ValueError('L-divergence gaps should be non-negative')
        if len(self.projection_divergences) != self.k or any(
            len(row) != len(self.gaps) for row in self.projection_divergences
        ):
            raise ValueError(
                'projection divergences should hold one row per projection '
                'and one column per model'
            )

    @property
    def k(self) -> int:
        """Number of L-projections"""
        return len(self.projection_indices)

    def is_projection(self, index: int) -> bool:
        return index in self.projection_indices

    def subset_value(self, indices: Sequence[int]) -> float:
        """L(N||r), the smallest L-divergence within a subset"""
        return min((self.l_values[i] for i in indices), default=math.inf)

    def subset_gap(self, indices: Sequence[int]) -> float:
        """L(N||r) - L(M||r), the decay rate of the subset's posterior mass"""
        return min((self.gaps[i] for i in indices), default=math.inf)

    def rows(self) -> List[Dict[str, object]]:
        return [
            {
                'index': i,
                'l_value': value,
                'gap': gap,
                'is_projection': self.is_projection(i),
            }
            for i, (value, gap) in enumerate(zip(self.l_values, self.gaps))
        ]


def l_projection(
    r: Density,
    m: ModelSet,
    tie_tolerance: float = DEFAULT_TIE_TOLERANCE,
    *,
    rel_tol: float = ACCEPTANCE_REL_TOL,
    structural_ties: Optional[Sequence[int]] = None,
) -> ProjectionReport:
    """L-projections of `r` onto the models of `m`

    Projections are the models whose L-divergence lies within
    `tie_tolerance * max(1, |min|)` of the minimum.  When `structural_ties`
    is given, those models are declared tied by construction (e.g. by
    symmetry):  they must agree numerically within a looser tolerance and
    their gaps are reported as exactly zero.

    Raises:
        NoProjectionError: if every model has infinite L-divergence
    """
    if not tie_tolerance >= 0.0:
        raise ValueError(f'tie tolerance ({tie_tolerance}) should be non-negative')

    l_values = tuple(l_divergence(q, r, rel_tol).value for q in m.models)
    finite = [value for value in l_values if math.isfinite(value)]
    if not finite:
        raise NoProjectionError(
            f'no model covers the support of the true source {r}'
        )

    min_value = min(finite)
    threshold = tie_tolerance * max(1.0, abs(min_value))
    gaps = [value - min_value for value in l_values]
    projections = {i for i, gap in enumerate(gaps) if gap <= threshold}
    tie_mode = TieMode.NUMERIC

    if structural_ties is not None:
        tie_mode = TieMode.STRUCTURAL
        m.check_indices(structural_ties)
        loose = STRUCTURAL_TIE_TOLERANCE * max(1.0, abs(min_value))
        for index in structural_ties:
            if not gaps[index] <= loose:
                raise ValueError(
                    f'declared tie {index} has L-divergence gap {gaps[index]!r}'
                )
            gaps[index] = 0.0
        projections.update(structural_ties)

    projection_indices = tuple(sorted(projections))
    projection_divergences = tuple(
        tuple(
            0.0 if i == j else i_divergence(m.models[i], q, rel_tol).value
            for j, q in enumerate(m.models)
        )
        for i in projection_indices
    )

    return ProjectionReport(
        min_value,
        projection_indices,
        tuple(gaps),
        tie_tolerance,
        l_values,
        projection_divergences,
        tie_mode,
    )


def _check_epsilon(epsilon: float):
    if not epsilon > 0.0:
        raise ValueError(f'epsilon ({epsilon}) should be positive')


def epsilon_bad_set(report: ProjectionReport, epsilon: float) -> Indices:
    """Models whose L-divergence exceeds the minimum by more than epsilon"""
    _check_epsilon(epsilon)
    return tuple(
        i
        for i, gap in enumerate(report.gaps)
        if gap > epsilon and not report.is_projection(i)
    )


def epsilon_good_set(report: ProjectionReport, epsilon: float) -> Indices:
    """Complement of the epsilon-bad set within the model set"""
    bad = set(epsilon_bad_set(report, epsilon))
    return tuple(i for i in range(len(report.gaps)) if i not in bad)


def projection_partition(
    report: ProjectionReport, epsilon: float
) -> List[Indices]:
    """Splits the epsilon-good set into one block per L-projection

    Every non-projection model joins the block of the projection it is closest
    to, measuring closeness by the L-gap of the model when the projection plays
    the true source, i.e. I(projection||model).  Ties go to the projection with
    the lower model index.
    """
    blocks: List[List[int]] = [[p] for p in report.projection_indices]

    for j in epsilon_good_set(report, epsilon):
        if report.is_projection(j):
            continue

        distances = [row[j] for row in report.projection_divergences]
        blocks[int(np.argmin(distances))].append(j)

    return [tuple(sorted(block)) for block in blocks]
