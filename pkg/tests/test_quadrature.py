import math

import numpy as np
import pytest
from scipy import integrate as sp_integrate

from lconsistency.quadrature import (
    IntegralResult,
    NonConvergenceError,
    integrate,
    make_segments,
)
from lconsistency.support import Interval

inf = math.inf


@pytest.mark.parametrize(
    'support,points,expected',
    [
        (Interval(0.0, 1.0), (), 1),
        (Interval(0.0, 1.0), (0.5,), 2),
        (Interval.real_line(), (), 1),
        (Interval.real_line(), (0.0,), 2),
        (Interval.real_line(), (-1.0, 1.0), 3),
        (Interval.half_line(), (), 1),
        (Interval.half_line(), (1.0, 2.0), 3),
        (Interval(-inf, 0.0), (), 1),
    ],
)
def test_make_segments(support: Interval, points, expected: int):
    assert len(make_segments(support, points)) == expected


@pytest.mark.parametrize('scale', [0.0, -1.0, inf, math.nan])
def test_make_segments_invalid_scale(scale: float):
    with pytest.raises(ValueError):
        make_segments(Interval.real_line(), scale=scale)


@pytest.mark.parametrize(
    'f,support,kwargs,expected',
    [
        # polynomials are exact
        (lambda x: x**2, Interval(0.0, 3.0), {}, 9.0),
        # gaussian integral
        (
            lambda x: np.exp(-0.5 * x**2),
            Interval.real_line(),
            {},
            math.sqrt(2.0 * math.pi),
        ),
        # shifted and narrow
        (
            lambda x: np.exp(-0.5 * ((x - 50.0) / 0.1) ** 2),
            Interval.real_line(),
            {'center': 50.0, 'scale': 0.1},
            0.1 * math.sqrt(2.0 * math.pi),
        ),
        # exponential tail
        (lambda x: np.exp(-x), Interval.half_line(), {}, 1.0),
        (lambda x: np.exp(x), Interval(-inf, 0.0), {}, 1.0),
        # kink
        (lambda x: np.exp(-np.abs(x - 1.0)), Interval.real_line(), {'points': (1.0,)}, 2.0),
        # integrable endpoint singularity
        (lambda x: 1.0 / np.sqrt(x), Interval(0.0, 1.0), {}, 2.0),
        # heavy (but integrable) tail
        (lambda x: 1.0 / (1.0 + x**2), Interval.real_line(), {}, math.pi),
    ],
)
def test_integrate(f, support: Interval, kwargs, expected: float):
    result = integrate(f, support, 1e-10, **kwargs)
    assert isinstance(result, IntegralResult)
    assert result.value == pytest.approx(expected, rel=1e-8)
    assert result.abs_error_estimate <= max(1e-12, 1e-10 * abs(result.value))
    assert result.evaluations > 0


@pytest.mark.parametrize('rel_tol', [0.0, -1e-9, 0.1, math.nan])
def test_integrate_invalid_tolerance(rel_tol: float):
    with pytest.raises(ValueError):
        integrate(lambda x: x, Interval(0.0, 1.0), rel_tol)


def test_integrate_not_finite():
    with pytest.raises(ValueError):
        integrate(lambda x: np.full_like(x, np.nan), Interval(0.0, 1.0))


def test_integrate_non_convergence():
    # oscillations faster than the panel limit can resolve
    with pytest.raises(NonConvergenceError) as excinfo:
        integrate(lambda x: np.sin(1e6 * x), Interval(0.0, 1.0), 1e-10, limit=8)

    assert isinstance(excinfo.value.partial, IntegralResult)


def test_integrate_tolerance_tradeoff():
    def f(x):
        return np.exp(-np.abs(x)) * np.cos(x) ** 2

    loose = integrate(f, Interval.real_line(), 1e-3, points=(0.0,))
    tight = integrate(f, Interval.real_line(), 1e-10, points=(0.0,))

    assert loose.evaluations <= tight.evaluations
    # int e^{-|x|} cos^2 x = 1 + 1 / 5
    assert tight.value == pytest.approx(1.2, rel=1e-9)


@pytest.mark.parametrize(
    'f,low,high',
    [
        (lambda x: np.log1p(x**2) * np.exp(-0.5 * x**2), -inf, inf),
        (lambda x: x * np.exp(-2.0 * x), 0.0, inf),
        (lambda x: np.cos(3.0 * x) * np.exp(-np.abs(x) / 2.0), -inf, inf),
    ],
)
def test_integrate_scipy(f, low: float, high: float):
    expected, _ = sp_integrate.quad(f, low, high, epsabs=1e-13, epsrel=1e-12)
    result = integrate(f, Interval(low, high), 1e-10, points=(0.0,))
    assert result.value == pytest.approx(expected, rel=1e-8, abs=1e-12)
