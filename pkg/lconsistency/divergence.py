""" L-divergence (cross-entropy), I-divergence (KL) and differential entropy

All functionals integrate over the support of the reference density `p`.  A
support mismatch (`p` puts mass where `q` vanishes) is detected up front and
reported as `+inf`, never as a numerical overflow.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from lconsistency.densities import (
    LOG_SQRT_2PI,
    Density,
    Exponential,
    Gaussian,
    Laplace,
    Uniform,
)
from lconsistency.quadrature import (
    ACCEPTANCE_REL_TOL,
    IntegralResult,
    NonConvergenceError,
    integrate,
)


class DivergenceKind(enum.Enum):
    L = 'L'
    I = 'I'  # noqa: E741
    ENTROPY = 'entropy'


@dataclass(frozen=True)
class DivergenceValue:
    """Value of a divergence functional, possibly `+inf`"""

    kind: DivergenceKind
    value: float
    numerical_error: float

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


def _support_covered(q: Density, p: Density) -> bool:
    """True iff the support of `p` lies within the support of `q`"""
    return q.support.includes(p.support)


def _integrate_under(
    p: Density,
    q: Optional[Density],
    term: Callable[[np.ndarray, np.ndarray], np.ndarray],
    rel_tol: float,
    label: str,
) -> IntegralResult:
    """integrates p(x) * term(log p(x), log q(x)) over the support of p"""
    points = set(p.breakpoints + p.anchors)
    if q is not None:
        points.update(q.breakpoints + q.anchors)

    def integrand(x: np.ndarray) -> np.ndarray:
        log_p = p.log_density(x)
        log_q = q.log_density(x) if q is not None else log_p
        density = np.exp(log_p)
        # p underflows to zero far in the tails;  0 * log 0 is taken as 0
        with np.errstate(invalid='ignore'):
            values = density * term(log_p, log_q)
        return np.where(density > 0.0, values, 0.0)

    try:
        return integrate(
            integrand,
            p.support,
            rel_tol,
            points=p.support.clip_points(points),
            center=p.location,
            scale=p.scale,
        )
    except NonConvergenceError as error:
        raise NonConvergenceError(
            f'{label} did not converge', error.partial
        ) from error


def l_divergence(
    q: Density, p: Density, rel_tol: float = ACCEPTANCE_REL_TOL
) -> DivergenceValue:
    """L-divergence of `q` with respect to `p`:  L(q||p) = -int p log q"""
    if not _support_covered(q, p):
        return DivergenceValue(DivergenceKind.L, math.inf, 0.0)

    result = _integrate_under(
        p, q, lambda log_p, log_q: log_q, rel_tol, f'L({q}||{p})'
    )
    return DivergenceValue(DivergenceKind.L, -result.value, result.abs_error_estimate)


def i_divergence(
    p: Density, q: Density, rel_tol: float = ACCEPTANCE_REL_TOL
) -> DivergenceValue:
    """I-divergence (Kullback-Leibler) of `p` from `q`:  int p log(p/q)"""
    if not _support_covered(q, p):
        return DivergenceValue(DivergenceKind.I, math.inf, 0.0)

    result = _integrate_under(
        p, q, lambda log_p, log_q: log_p - log_q, rel_tol, f'I({p}||{q})'
    )
    return DivergenceValue(DivergenceKind.I, result.value, result.abs_error_estimate)


def differential_entropy(
    p: Density, rel_tol: float = ACCEPTANCE_REL_TOL
) -> DivergenceValue:
    """differential entropy h(p) = -int p log p"""
    result = _integrate_under(
        p, None, lambda log_p, log_q: log_p, rel_tol, f'h({p})'
    )
    return DivergenceValue(
        DivergenceKind.ENTROPY, -result.value, result.abs_error_estimate
    )


def closed_form_l(q: Density, p: Density) -> Optional[float]:
    """Analytic L(q||p) for same-family pairs, or None if not available

    Available for Gaussian, Exponential, Laplace and Uniform pairs;  a
    Uniform pair whose supports are not nested evaluates to `+inf`.
    """
    if isinstance(q, Gaussian) and isinstance(p, Gaussian):
        return (
            LOG_SQRT_2PI
            + math.log(q.sigma)
            + (p.sigma**2 + (p.mu - q.mu) ** 2) / (2.0 * q.sigma**2)
        )

    if isinstance(q, Exponential) and isinstance(p, Exponential):
        return -math.log(q.rate) + q.rate / p.rate

    if isinstance(q, Laplace) and isinstance(p, Laplace):
        distance = abs(p.loc - q.loc)
        expected_deviation = p.width * math.exp(-distance / p.width) + distance
        return math.log(2.0 * q.width) + expected_deviation / q.width

    if isinstance(q, Uniform) and isinstance(p, Uniform):
        if not _support_covered(q, p):
            return math.inf
        return math.log(q.high - q.low)

    return None


def closed_form_entropy(p: Density) -> Optional[float]:
    """Analytic differential entropy of a base-family density, or None"""
    if isinstance(p, Gaussian):
        return 0.5 * math.log(2.0 * math.pi * math.e * p.sigma**2)

    if isinstance(p, Exponential):
        return 1.0 - math.log(p.rate)

    if isinstance(p, Laplace):
        return 1.0 + math.log(2.0 * p.width)

    if isinstance(p, Uniform):
        return math.log(p.high - p.low)

    return None


def closed_form_i(p: Density, q: Density) -> Optional[float]:
    """Analytic I(p||q) = L(q||p) - h(p), when both terms are available"""
    cross = closed_form_l(q, p)
    entropy = closed_form_entropy(p)
    if cross is None or entropy is None:
        return None
    return cross - entropy if math.isfinite(cross) else math.inf
