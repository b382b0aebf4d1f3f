""" Adaptive Gauss-Kronrod quadrature over (possibly infinite) intervals

Every interval is split at the given breakpoints into segments.  Finite
segments are integrated directly;  infinite segments are mapped onto the
open interval (-1, 1) with algebraic substitutions scaled by `scale` (s):

    (-inf, inf):  x = c + s t / (1 - t^2)
    [a, inf):     x = a + s (1 + t) / (1 - t)
    (-inf, b]:    x = b - s (1 - t) / (1 + t)

The 7/15-point Gauss-Kronrod rule never evaluates panel endpoints, so
integrands may be singular at finite endpoints and mapped infinities are never
evaluated.  Panels are refined globally, always bisecting the panel with the
largest error estimate, until the summed estimate meets the tolerance.
"""
from __future__ import annotations

import heapq
import itertools as itt
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from lconsistency.support import Interval

ACCEPTANCE_REL_TOL = 1e-9
"""Relative tolerance for acceptance-grade computations"""

SWEEP_REL_TOL = 1e-7
"""Relative tolerance for bulk experiment sweeps"""

DEFAULT_ABS_TOL = 1e-12
"""Absolute error floor (integrals close to zero)"""

MAX_REL_TOL = 1e-2

DEFAULT_LIMIT = 2000
"""Maximum number of panels"""

Integrand = Callable[[np.ndarray], np.ndarray]
Transform = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]

# Kronrod abscissae (positive half) and weights
_XK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144845693013,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
    ]
)
_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
    ]
)
_WK0 = 0.209482141084727828012999174891714
# Gauss weights live on every other Kronrod abscissa
_WG = np.array(
    [
        0.0,
        0.129484966168869693270611432679082,
        0.0,
        0.279705391489276667901467771423780,
        0.0,
        0.381830050505118944950369775488975,
        0.0,
    ]
)
_WG0 = 0.417959183673469387755102040816327

NODES = np.concatenate([-_XK, [0.0], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK, [_WK0], _WK[::-1]])
GAUSS_WEIGHTS = np.concatenate([_WG, [_WG0], _WG[::-1]])


@dataclass(frozen=True)
class IntegralResult:
    value: float
    abs_error_estimate: float
    evaluations: int


class NonConvergenceError(RuntimeError):
    """Raised when the error estimate cannot be brought below tolerance

    The best estimate obtained so far is available as `partial`.
    """

    def __init__(self, message: str, partial: IntegralResult):
        super().__init__(
            f'{message} (partial value {partial.value!r}, '
            f'error estimate {partial.abs_error_estimate!r})'
        )
        self.partial = partial


def _identity(t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return t, np.ones_like(t)


def _real_line(center: float, scale: float) -> Transform:
    def transform(t):
        u = 1.0 - t * t
        return center + scale * t / u, scale * (1.0 + t * t) / (u * u)

    return transform


def _upper_tail(low: float, scale: float) -> Transform:
    def transform(t):
        u = 1.0 - t
        return low + scale * (1.0 + t) / u, 2.0 * scale / (u * u)

    return transform


def _lower_tail(high: float, scale: float) -> Transform:
    def transform(t):
        u = 1.0 + t
        return high - scale * (1.0 - t) / u, 2.0 * scale / (u * u)

    return transform


@dataclass(frozen=True)
class _Segment:
    transform: Transform
    low: float
    high: float


def make_segments(
    support: Interval,
    points: Sequence[float] = (),
    *,
    center: Optional[float] = None,
    scale: float = 1.0,
) -> List[_Segment]:
    """splits the support at `points` and maps infinite pieces onto (-1, 1)"""
    if not (math.isfinite(scale) and scale > 0.0):
        raise ValueError(f'scale ({scale}) should be finite and positive')

    inner = list(support.clip_points(points))

    if not inner and not math.isfinite(support.low) and not math.isfinite(support.high):
        if center is None or not math.isfinite(center):
            center = 0.0
        return [_Segment(_real_line(center, scale), -1.0, 1.0)]

    if not inner and math.isfinite(support.low) and math.isfinite(support.high):
        return [_Segment(_identity, support.low, support.high)]

    # at least one finite anchor exists for every infinite tail
    anchors = inner
    if math.isfinite(support.low):
        anchors = [support.low] + anchors
    if math.isfinite(support.high):
        anchors = anchors + [support.high]

    segments = []
    if not math.isfinite(support.low):
        segments.append(_Segment(_lower_tail(anchors[0], scale), -1.0, 1.0))
    segments.extend(
        _Segment(_identity, a, b) for a, b in zip(anchors[:-1], anchors[1:])
    )
    if not math.isfinite(support.high):
        segments.append(_Segment(_upper_tail(anchors[-1], scale), -1.0, 1.0))
    return segments


@dataclass(frozen=True)
class _Panel:
    segment: _Segment
    low: float
    high: float
    value: float
    error: float


def _evaluate(f: Integrand, segment: _Segment, low: float, high: float) -> _Panel:
    half = 0.5 * (high - low)
    mid = 0.5 * (high + low)
    x, jacobian = segment.transform(mid + half * NODES)
    fx = np.asarray(f(x), dtype=float) * jacobian

    if not np.all(np.isfinite(fx)):
        bad = x[~np.isfinite(fx)][0]
        raise ValueError(f'integrand is not finite at x={bad!r}')

    kronrod = half * float(KRONROD_WEIGHTS @ fx)
    gauss = half * float(GAUSS_WEIGHTS @ fx)
    return _Panel(segment, low, high, kronrod, abs(kronrod - gauss))


def integrate(
    f: Integrand,
    support: Interval,
    rel_tol: float = ACCEPTANCE_REL_TOL,
    *,
    abs_tol: float = DEFAULT_ABS_TOL,
    points: Sequence[float] = (),
    center: Optional[float] = None,
    scale: float = 1.0,
    initial_panels: int = 4,
    limit: int = DEFAULT_LIMIT,
) -> IntegralResult:
    """Adaptive integral of a vectorized integrand over an interval

    Args:
        f (`Integrand`): maps an array of abscissae to an array of values
        support (`Interval`): integration domain, endpoints may be infinite
        rel_tol (`float`): relative tolerance, in (0, 1e-2]
        abs_tol (`float`): absolute tolerance floor
        points (`Sequence[float]`): interior points where f is not smooth
        center (`float, optional`): center of the real-line substitution
        scale (`float`): length scale of the infinite-domain substitutions
        initial_panels (`int`): panels per segment before refinement
        limit (`int`): maximum number of panels

    Returns:
        IntegralResult: value, error estimate and number of evaluations
    """
    if not 0.0 < rel_tol <= MAX_REL_TOL:
        raise ValueError(f'rel_tol ({rel_tol}) should be in (0, {MAX_REL_TOL}]')
    if initial_panels < 1:
        raise ValueError(f'initial_panels ({initial_panels}) should be positive')

    segments = make_segments(support, points, center=center, scale=scale)
    counter = itt.count()
    heap: List[Tuple[float, int, _Panel]] = []
    evaluations = 0

    for segment in segments:
        edges = np.linspace(segment.low, segment.high, initial_panels + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            panel = _evaluate(f, segment, float(a), float(b))
            evaluations += len(NODES)
            heapq.heappush(heap, (-panel.error, next(counter), panel))

    def result() -> IntegralResult:
        value = math.fsum(panel.value for _, _, panel in heap)
        error = math.fsum(panel.error for _, _, panel in heap)
        return IntegralResult(value, error, evaluations)

    while True:
        current = result()
        tolerance = max(abs_tol, rel_tol * abs(current.value))
        if current.abs_error_estimate <= tolerance:
            return current

        if len(heap) >= limit:
            raise NonConvergenceError(
                f'maximum number of panels ({limit}) exceeded', current
            )

        _, _, worst = heapq.heappop(heap)
        mid = 0.5 * (worst.low + worst.high)
        if not worst.low < mid < worst.high:
            heapq.heappush(heap, (-worst.error, next(counter), worst))
            raise NonConvergenceError('panel width below machine precision', result())

        for a, b in ((worst.low, mid), (mid, worst.high)):
            panel = _evaluate(f, worst.segment, a, b)
            evaluations += len(NODES)
            heapq.heappush(heap, (-panel.error, next(counter), panel))
