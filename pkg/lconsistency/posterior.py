""" Exact log-space posterior over a model set

Masses are never exponentiated before they are combined, so decay rates stay
measurable long after the masses themselves underflow.  A model whose
log-likelihood reaches `-inf` (an observation outside its support) is
eliminated for good.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from lconsistency.debugging import checkraise
from lconsistency.projection import Indices, ModelSet

NORMALIZATION_TOLERANCE = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


def _log_normalize(joint: np.ndarray) -> np.ndarray:
    log_normalizer = logsumexp(joint) if np.any(joint > -np.inf) else -np.inf
    if log_normalizer == -np.inf:
        warnings.warn(
            'every model has been eliminated;  the posterior is undefined'
        )
        return np.full(joint.shape, -np.inf)
    return joint - log_normalizer


@dataclass(frozen=True, eq=False)
class PosteriorState:
    """Posterior after `n` observations

    Stores cumulative log-likelihoods rather than data, so memory does not
    grow with `n`.
    """

    model_set: ModelSet
    n: int
    log_prior: np.ndarray
    log_likelihood: np.ndarray
    log_posterior: np.ndarray

    @property
    def log_joint(self) -> np.ndarray:
        """log prior-weighted likelihoods, log rho_n(q)"""
        return self.log_prior + self.log_likelihood

    @property
    def posterior(self) -> np.ndarray:
        return np.exp(self.log_posterior)

    @property
    def eliminated(self) -> Indices:
        return tuple(np.flatnonzero(self.log_likelihood == -np.inf).tolist())


@dataclass(frozen=True)
class SandwichBounds:
    """Two-sided bound on the posterior mass of a subset

    lower = max_N rho_n / max_M l_n,  upper = min(1, max_N l_n / max_M rho_n),
    where l_n are likelihoods and rho_n prior-weighted likelihoods.
    """

    log_lower: float
    log_upper: float

    @property
    def lower(self) -> float:
        return math.exp(self.log_lower)

    @property
    def upper(self) -> float:
        return math.exp(self.log_upper)


@dataclass(frozen=True)
class ConcentrationTerms:
    """Residual ratios controlling equi-concentration

    `block_ratios[j]` is the posterior mass of block j's non-projection members
    relative to the mass of its projection;  `residual_ratio` is the mass
    outside every projection relative to the projections' total mass.
    """

    block_ratios: Tuple[float, ...]
    residual_ratio: float


def init(m: ModelSet) -> PosteriorState:
    """Posterior before any observation, i.e. the prior"""
    prior = np.asarray(m.prior, dtype=float)
    if not np.all(prior > 0.0):
        raise ValueError('prior masses should be strictly positive')

    log_prior = _readonly(np.log(prior))
    log_likelihood = _readonly(np.zeros(len(m)))
    log_posterior = _readonly(_log_normalize(log_prior.copy()))
    return PosteriorState(m, 0, log_prior, log_likelihood, log_posterior)


def update(s: PosteriorState, xs: Sequence[float]) -> PosteriorState:
    """Consumes observations `xs` and renormalizes"""
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size == 0:
        return s

    increments = np.array(
        [np.sum(q.log_density(xs)) for q in s.model_set.models]
    )
    log_likelihood = _readonly(s.log_likelihood + increments)
    log_posterior = _readonly(_log_normalize(s.log_prior + log_likelihood))

    state = PosteriorState(
        s.model_set, s.n + xs.size, s.log_prior, log_likelihood, log_posterior
    )
    checkraise(
        lambda: not np.any(log_posterior > -np.inf)
        or abs(float(np.sum(np.exp(log_posterior))) - 1.0)
        <= NORMALIZATION_TOLERANCE,
        RuntimeError,
        'posterior masses do not sum to one after {} observations',
        state.n,
    )
    return state


def _as_indices(s: PosteriorState, idx: Sequence[int]) -> np.ndarray:
    s.model_set.check_indices(idx)
    return np.asarray(sorted(set(idx)), dtype=int)


def log_subset_mass(s: PosteriorState, idx: Sequence[int]) -> float:
    """log posterior mass of a subset of models (`-inf` allowed)"""
    indices = _as_indices(s, idx)
    joint = s.log_joint
    if indices.size == 0 or not np.any(joint[indices] > -np.inf):
        return -math.inf
    return min(0.0, float(logsumexp(joint[indices]) - logsumexp(joint)))


def subset_mass(s: PosteriorState, idx: Sequence[int]) -> float:
    """posterior mass of a subset of models"""
    return math.exp(log_subset_mass(s, idx))


def rate_statistic(s: PosteriorState, idx: Sequence[int]) -> float:
    """(1/n) log posterior mass of a subset"""
    if s.n < 1:
        raise ValueError('the rate statistic needs at least one observation')
    return log_subset_mass(s, idx) / s.n


def sandwich_bounds(s: PosteriorState, idx: Sequence[int]) -> SandwichBounds:
    """Bounds on the subset mass via per-subset likelihood maxima"""
    indices = _as_indices(s, idx)
    if indices.size == 0:
        raise ValueError('sandwich bounds need a non-empty subset')

    joint = s.log_joint
    best_likelihood = np.max(s.log_likelihood)
    if best_likelihood == -np.inf:
        return SandwichBounds(-math.inf, -math.inf)

    log_lower = float(np.max(joint[indices]) - best_likelihood)
    log_upper = float(np.max(s.log_likelihood[indices]) - np.max(joint))
    # the bounds omit the normalizer;  enclose the rounded mass they bound
    log_mass = log_subset_mass(s, indices)
    return SandwichBounds(
        min(log_lower, log_mass), max(min(0.0, log_upper), log_mass)
    )


def map_indices(s: PosteriorState) -> Indices:
    """Models attaining the largest posterior mass"""
    best = np.max(s.log_posterior)
    return tuple(np.flatnonzero(s.log_posterior == best).tolist())


def concentration_terms(
    s: PosteriorState,
    blocks: Sequence[Sequence[int]],
    projection_indices: Sequence[int],
) -> ConcentrationTerms:
    """Residual ratios of the equi-concentration argument

    Every block must contain exactly one of the projection indices.
    """
    projections = set(projection_indices)
    joint = s.log_joint

    with np.errstate(divide='ignore', invalid='ignore'):
        return _concentration_terms(joint, blocks, projections)


def _concentration_terms(joint, blocks, projections) -> ConcentrationTerms:
    ratios = []
    for block in blocks:
        anchors = [i for i in block if i in projections]
        if len(anchors) != 1:
            raise ValueError(f'block {block} should contain exactly one projection')
        others = [i for i in block if i not in projections]
        log_others = logsumexp(joint[others]) if others else -np.inf
        ratios.append(float(np.exp(log_others - joint[anchors[0]])))

    outside = [i for i in range(len(joint)) if i not in projections]
    log_outside = logsumexp(joint[outside]) if outside else -np.inf
    log_projections = logsumexp(joint[sorted(projections)])
    residual = float(np.exp(log_outside - log_projections))
    return ConcentrationTerms(tuple(ratios), residual)
