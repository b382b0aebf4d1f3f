import math

import numpy as np
import pytest

from lconsistency.densities import (
    Density,
    Exponential,
    FiniteMixture,
    Gaussian,
    Laplace,
    Uniform,
)
from lconsistency.divergence import (
    DivergenceKind,
    closed_form_entropy,
    closed_form_i,
    closed_form_l,
    differential_entropy,
    i_divergence,
    l_divergence,
)
from lconsistency.rng import substream_rng

G = Gaussian
E = Exponential
U = Uniform


@pytest.mark.parametrize(
    'q,p,expected',
    [
        (G(0.0, 1.0), G(0.0, 1.0), 1.4189385),
        (G(1.0, 1.0), G(0.0, 1.0), 1.9189385),
        (G(2.0, 1.0), G(0.0, 1.0), 3.4189385),
        (E(2.0), E(1.0), 1.3068528),
        (U(0.0, 2.0), U(0.0, 1.0), math.log(2.0)),
    ],
)
def test_l_divergence_examples(q: Density, p: Density, expected: float):
    value = l_divergence(q, p)
    assert value.kind is DivergenceKind.L
    assert value.value == pytest.approx(expected, abs=1e-7)


@pytest.mark.parametrize(
    'q,p,expected',
    [
        (G(0.0, 1.0), G(0.0, 1.0), 0.0),
        (G(1.0, 1.0), G(0.0, 1.0), 0.5),
        (E(2.0), E(1.0), 0.3068528),
    ],
)
def test_i_divergence_examples(q: Density, p: Density, expected: float):
    value = i_divergence(p, q)
    assert value.kind is DivergenceKind.I
    assert value.value == pytest.approx(expected, abs=1e-7)


def test_entropy_standard_normal():
    value = differential_entropy(G(0.0, 1.0))
    assert value.kind is DivergenceKind.ENTROPY
    assert value.value == pytest.approx(1.4189385, abs=1e-7)


@pytest.mark.parametrize(
    'q,p',
    [
        (U(0.0, 1.0), U(0.0, 2.0)),
        (U(0.0, 1.0), G(0.0, 1.0)),
        (E(1.0), G(0.0, 1.0)),
        (E(1.0), U(-1.0, 1.0)),
    ],
)
def test_support_mismatch(q: Density, p: Density):
    l_value = l_divergence(q, p)
    assert l_value.value == math.inf
    assert not l_value.is_finite
    assert i_divergence(p, q).value == math.inf


gaussian_pairs = [
    (G(0.0, 1.0), G(0.0, 1.0)),
    (G(1.0, 1.0), G(0.0, 1.0)),
    (G(-3.0, 0.5), G(2.0, 1.5)),
    (G(0.0, 3.0), G(0.0, 0.2)),
    (G(10.0, 2.0), G(-10.0, 2.0)),
    (G(0.5, 0.1), G(0.4, 0.05)),
    (G(100.0, 10.0), G(95.0, 20.0)),
]
exponential_pairs = [
    (E(2.0), E(1.0)),
    (E(1.0), E(2.0)),
    (E(0.1), E(5.0)),
    (E(7.0), E(0.3)),
]
uniform_pairs = [
    (U(0.0, 2.0), U(0.0, 1.0)),
    (U(-5.0, 5.0), U(1.0, 2.0)),
    (U(0.0, 1.0), U(0.0, 1.0)),
]
laplace_pairs = [
    (Laplace(0.0, 1.0), Laplace(0.0, 1.0)),
    (Laplace(1.0, 2.0), Laplace(-1.0, 0.5)),
]


@pytest.mark.parametrize(
    'q,p', gaussian_pairs + exponential_pairs + uniform_pairs + laplace_pairs
)
def test_l_divergence_closed_form(q: Density, p: Density):
    expected = closed_form_l(q, p)
    assert expected is not None
    assert abs(l_divergence(q, p).value - expected) <= 1e-6


@pytest.mark.parametrize(
    'p',
    [G(3.0, 0.3), E(4.0), Laplace(1.0, 2.0), U(-1.0, 3.0)],
)
def test_entropy_closed_form(p: Density):
    assert differential_entropy(p).value == pytest.approx(
        closed_form_entropy(p), abs=1e-6
    )


@pytest.mark.parametrize('q,p', gaussian_pairs + exponential_pairs)
def test_i_divergence_closed_form(q: Density, p: Density):
    assert i_divergence(p, q).value == pytest.approx(closed_form_i(p, q), abs=1e-6)


def test_closed_form_unavailable():
    assert closed_form_l(G(0.0, 1.0), Laplace(0.0, 1.0)) is None
    mixture = FiniteMixture((G(0.0, 1.0),), (1.0,))
    assert closed_form_entropy(mixture) is None
    assert closed_form_i(mixture, G(0.0, 1.0)) is None


def _random_density(rng) -> Density:
    family = rng.integers(3)
    if family == 0:
        return G(rng.uniform(-3.0, 3.0), rng.uniform(0.3, 3.0))
    if family == 1:
        return Laplace(rng.uniform(-3.0, 3.0), rng.uniform(0.3, 3.0))
    return FiniteMixture(
        (
            G(rng.uniform(-3.0, 0.0), rng.uniform(0.5, 2.0)),
            G(rng.uniform(0.0, 3.0), rng.uniform(0.5, 2.0)),
        ),
        (0.4, 0.6),
    )


def test_entropy_identity():
    """L(q||p) = h(p) + I(p||q) on randomized pairs"""
    rng = substream_rng(1337)

    for _ in range(100):
        p = _random_density(rng)
        q = _random_density(rng)

        l_value = l_divergence(q, p).value
        entropy = differential_entropy(p).value
        i_value = i_divergence(p, q).value

        assert abs(l_value - (entropy + i_value)) <= 1e-6
        assert i_value >= -1e-9


def test_gibbs_inequality():
    p = G(0.0, 1.0)
    entropy = differential_entropy(p).value
    for q in [G(0.1, 1.0), G(0.0, 1.1), Laplace(0.0, 1.0)]:
        assert l_divergence(q, p).value > entropy


def test_numerical_error_reported():
    value = l_divergence(Laplace(0.0, 1.0), G(0.5, 2.0))
    assert 0.0 <= value.numerical_error <= 1e-6


def _random_oracle_pair(rng, family: int):
    if family == 0:
        return (
            G(rng.uniform(-3.0, 3.0), rng.uniform(0.5, 3.0)),
            G(rng.uniform(-3.0, 3.0), rng.uniform(0.3, 3.0)),
        )
    if family == 1:
        return E(rng.uniform(0.2, 5.0)), E(rng.uniform(0.2, 5.0))
    if family == 2:
        return (
            Laplace(rng.uniform(-3.0, 3.0), rng.uniform(0.5, 3.0)),
            Laplace(rng.uniform(-3.0, 3.0), rng.uniform(0.3, 3.0)),
        )
    low = rng.uniform(-2.0, 0.0)
    high = low + rng.uniform(0.5, 2.0)
    outer = U(low - rng.uniform(0.0, 1.0), high + rng.uniform(0.0, 1.0))
    return outer, U(low, high)


@pytest.mark.parametrize('family', [0, 1, 2, 3])
def test_l_divergence_closed_form_randomized(family: int):
    rng = substream_rng(99, family)

    for _ in range(20):
        q, p = _random_oracle_pair(rng, family)
        expected = closed_form_l(q, p)
        assert expected is not None
        assert abs(l_divergence(q, p).value - expected) <= 1e-6


def test_gaussian_location_minimizer():
    p = G(0.0, 1.0)
    thetas = [i / 10 for i in range(-20, 21)]
    values = [l_divergence(G(theta, 1.0), p).value for theta in thetas]
    assert thetas[int(np.argmin(values))] == 0.0


@pytest.mark.parametrize(
    'p,sigma',
    [
        (FiniteMixture((G(-1000.0, 1.0), G(1000.0, 1.0)), (0.5, 0.5)), 1000.0),
        (FiniteMixture((G(0.0, 1.0), G(50.0, 0.01)), (0.5, 0.5)), 10.0),
        (FiniteMixture((G(0.0, 10.0), G(3.3, 1e-4)), (0.9, 0.1)), 3.0),
    ],
)
def test_l_divergence_mixture_source(p: FiniteMixture, sigma: float):
    """-int p log N(0, sigma) only depends on the second moment of p"""
    second_moment = p.variance + p.mean**2
    expected = 0.5 * math.log(2.0 * math.pi * sigma**2) + second_moment / (
        2.0 * sigma**2
    )
    assert l_divergence(G(0.0, sigma), p).value == pytest.approx(expected, abs=1e-6)


@pytest.mark.parametrize(
    'p,expected',
    [
        (
            FiniteMixture((G(-1000.0, 1.0), G(1000.0, 1.0)), (0.5, 0.5)),
            0.5 * math.log(2.0 * math.pi * math.e) + math.log(2.0),
        ),
        (
            FiniteMixture((G(0.0, 1.0), G(50.0, 0.01)), (0.5, 0.5)),
            0.25 * math.log(2.0 * math.pi * math.e)
            + 0.25 * math.log(2.0 * math.pi * math.e * 1e-4)
            + math.log(2.0),
        ),
    ],
)
def test_entropy_separated_mixture(p: FiniteMixture, expected: float):
    assert differential_entropy(p).value == pytest.approx(expected, abs=1e-6)


def test_l_divergence_separated_mixture_model():
    q = FiniteMixture((G(-1000.0, 1.0), G(1000.0, 1.0)), (0.5, 0.5))
    expected = 0.5 * math.log(2.0 * math.pi * math.e) + math.log(2.0)
    assert l_divergence(q, G(1000.0, 1.0)).value == pytest.approx(expected, abs=1e-6)
