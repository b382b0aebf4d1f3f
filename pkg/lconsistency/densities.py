""" Sources: one-dimensional probability densities and i.i.d. sampling """
from __future__ import annotations

import abc
import enum
import math
from collections import UserList
from dataclasses import dataclass, field
from typing import ClassVar, Sequence, Tuple, Type, Union

import numpy as np
import numpy.random as rnd
from scipy.special import logsumexp

from lconsistency.rng import substream_rng
from lconsistency.support import Interval

ArrayLike = Union[float, Sequence[float], np.ndarray]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

MIXTURE_WEIGHT_TOLERANCE = 1e-12

ANCHOR_OFFSETS = (-32.0, -8.0, -2.0, 0.0, 2.0, 8.0, 32.0)
"""Offsets, in component scales, of the integration anchors of a mixture"""


class Family(enum.Enum):
    """Parametric family of a density"""

    GAUSSIAN = 'gaussian'
    EXPONENTIAL = 'exponential'
    LAPLACE = 'laplace'
    UNIFORM = 'uniform'
    MIXTURE = 'mixture'


def format_number(value: float) -> str:
    return f'{value:.15g}'


def _check_finite(name: str, value: float):
    if not math.isfinite(value):
        raise ValueError(f'{name} ({value}) should be finite')


def _check_positive(name: str, value: float):
    _check_finite(name, value)
    if not value > 0.0:
        raise ValueError(f'{name} ({value}) should be strictly positive')


class DensityRegistry(UserList):
    def register(self, density_type: Type[Density]) -> Type[Density]:
        self.data.append(density_type)
        return density_type

    def names(self) -> Tuple[str, ...]:
        """Returns the family names of registered densities"""
        return tuple(density_type.family.value for density_type in self.data)

    def from_name(self, name: str) -> Type[Density]:
        """Returns the density class associated with a family name"""
        try:
            return next(
                density_type
                for density_type in self.data
                if density_type.family.value == name.lower()
            )
        except StopIteration as error:
            raise ValueError(f'unregistered density family `{name}`') from error


density_registry = DensityRegistry()
"""Density family registry"""


class Density(metaclass=abc.ABCMeta):
    """An evaluable and sampleable density on the real line

    Densities are immutable;  invalid parameters are rejected at construction
    time, so that evaluation never fails.  The log-density is finite on the
    support and `-inf` outside of it.
    """

    family: ClassVar[Family]

    @property
    @abc.abstractmethod
    def params(self) -> Tuple[float, ...]:
        """Family-specific parameter vector"""

    @property
    @abc.abstractmethod
    def support(self) -> Interval:
        """Closed support interval"""

    @property
    @abc.abstractmethod
    def mean(self) -> float:
        ...

    @property
    @abc.abstractmethod
    def variance(self) -> float:
        ...

    @property
    def location(self) -> float:
        """Center used to map infinite domains during integration"""
        return self.mean

    @property
    def scale(self) -> float:
        """Length scale used to map infinite domains during integration"""
        return math.sqrt(self.variance)

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Points where the log-density is not smooth"""
        return ()

    @property
    def anchors(self) -> Tuple[float, ...]:
        """Points where integration panels should start, besides breakpoints"""
        return ()

    @property
    def spec(self) -> str:
        """Short textual description, e.g. `gaussian:0,1`"""
        params = ','.join(format_number(p) for p in self.params)
        return f'{self.family.value}:{params}'

    @abc.abstractmethod
    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        """log-density for points known to be inside the support"""

    @abc.abstractmethod
    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        """Draws `size` i.i.d. values using `rng`"""

    def log_density(self, x: ArrayLike) -> Union[float, np.ndarray]:
        x = np.asarray(x, dtype=float)
        inside = self.support.contains(x)
        out = np.full(x.shape, -np.inf)
        out[inside] = self._log_density_inside(x[inside])
        return float(out) if out.ndim == 0 else out

    def __str__(self) -> str:
        return self.spec


@density_registry.register
@dataclass(frozen=True)
class Gaussian(Density):
    family: ClassVar[Family] = Family.GAUSSIAN

    mu: float
    sigma: float

    def __post_init__(self):
        _check_finite('mean', self.mu)
        _check_positive('stdev', self.sigma)

    @classmethod
    def from_params(cls, params: Sequence[float]) -> Gaussian:
        _check_arity(cls, params, 2)
        return cls(float(params[0]), float(params[1]))

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.mu, self.sigma)

    @property
    def support(self) -> Interval:
        return Interval.real_line()

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def variance(self) -> float:
        return self.sigma**2

    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        z = (x - self.mu) / self.sigma
        return -LOG_SQRT_2PI - math.log(self.sigma) - 0.5 * z * z

    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, size=size)


@density_registry.register
@dataclass(frozen=True)
class Exponential(Density):
    family: ClassVar[Family] = Family.EXPONENTIAL

    rate: float

    def __post_init__(self):
        _check_positive('rate', self.rate)

    @classmethod
    def from_params(cls, params: Sequence[float]) -> Exponential:
        _check_arity(cls, params, 1)
        return cls(float(params[0]))

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.rate,)

    @property
    def support(self) -> Interval:
        return Interval.half_line(0.0)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate**2

    @property
    def location(self) -> float:
        return 0.0

    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        return math.log(self.rate) - self.rate * x

    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        return rng.exponential(1.0 / self.rate, size=size)


@density_registry.register
@dataclass(frozen=True)
class Laplace(Density):
    family: ClassVar[Family] = Family.LAPLACE

    loc: float
    width: float

    def __post_init__(self):
        _check_finite('location', self.loc)
        _check_positive('scale', self.width)

    @classmethod
    def from_params(cls, params: Sequence[float]) -> Laplace:
        _check_arity(cls, params, 2)
        return cls(float(params[0]), float(params[1]))

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.loc, self.width)

    @property
    def support(self) -> Interval:
        return Interval.real_line()

    @property
    def mean(self) -> float:
        return self.loc

    @property
    def variance(self) -> float:
        return 2.0 * self.width**2

    @property
    def scale(self) -> float:
        return self.width

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.loc,)

    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        return -math.log(2.0 * self.width) - np.abs(x - self.loc) / self.width

    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        return rng.laplace(self.loc, self.width, size=size)


@density_registry.register
@dataclass(frozen=True)
class Uniform(Density):
    family: ClassVar[Family] = Family.UNIFORM

    low: float
    high: float

    def __post_init__(self):
        _check_finite('low', self.low)
        _check_finite('high', self.high)
        if not self.low < self.high:
            raise ValueError(
                f'low ({self.low}) should be strictly less than high ({self.high})'
            )

    @classmethod
    def from_params(cls, params: Sequence[float]) -> Uniform:
        _check_arity(cls, params, 2)
        return cls(float(params[0]), float(params[1]))

    @property
    def params(self) -> Tuple[float, ...]:
        return (self.low, self.high)

    @property
    def support(self) -> Interval:
        return Interval(self.low, self.high)

    @property
    def mean(self) -> float:
        return 0.5 * (self.low + self.high)

    @property
    def variance(self) -> float:
        return (self.high - self.low) ** 2 / 12.0

    @property
    def scale(self) -> float:
        return 0.5 * (self.high - self.low)

    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        return np.full(x.shape, -math.log(self.high - self.low))

    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=size)


BASE_FAMILIES = (Gaussian, Exponential, Laplace, Uniform)


@density_registry.register
@dataclass(frozen=True)
class FiniteMixture(Density):
    """Finite mixture of base-family densities

    Components with zero weight are kept (so that parameters round-trip) but
    do not contribute to the support.  The support of the positive-weight
    components must be connected.
    """

    family: ClassVar[Family] = Family.MIXTURE

    components: Tuple[Density, ...]
    weights: Tuple[float, ...]
    _support: Interval = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValueError('mixture needs at least one component')
        if len(self.components) != len(self.weights):
            raise ValueError(
                f'mixture has {len(self.components)} components '
                f'but {len(self.weights)} weights'
            )
        for component in self.components:
            if not isinstance(component, BASE_FAMILIES):
                raise TypeError(
                    f'mixture component ({component}) should belong to a base family'
                )
        for weight in self.weights:
            _check_finite('weight', weight)
            if weight < 0.0:
                raise ValueError(f'weight ({weight}) should be non-negative')
        if abs(math.fsum(self.weights) - 1.0) > MIXTURE_WEIGHT_TOLERANCE:
            raise ValueError(f'weights {self.weights} should sum to 1')

        active = sorted(
            (c.support for c, w in zip(self.components, self.weights) if w > 0),
            key=lambda interval: interval.low,
        )
        support = active[0]
        for interval in active[1:]:
            if not support.overlaps(interval):
                raise ValueError('mixture support should be a single interval')
            support = support.hull(interval)

        object.__setattr__(self, '_support', support)

    @property
    def params(self) -> Tuple[float, ...]:
        return tuple(self.weights)

    @property
    def support(self) -> Interval:
        return self._support

    @property
    def spec(self) -> str:
        terms = '+'.join(
            f'{format_number(w)}*{c.spec}'
            for c, w in zip(self.components, self.weights)
        )
        return f'{self.family.value}({terms})'

    @property
    def mean(self) -> float:
        return math.fsum(w * c.mean for c, w in zip(self.components, self.weights))

    @property
    def variance(self) -> float:
        second = math.fsum(
            w * (c.variance + c.mean**2)
            for c, w in zip(self.components, self.weights)
        )
        return second - self.mean**2

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        points = set()
        for component, weight in zip(self.components, self.weights):
            if weight > 0.0:
                points.update(component.breakpoints)
                points.update(component.support.as_tuple)
        return self.support.clip_points(points)

    @property
    def anchors(self) -> Tuple[float, ...]:
        """Points around every positive-weight component

        The overall mean and spread of a mixture do not locate its components;
        narrow or far-apart components are only seen by panels anchored on them.
        """
        points = {
            component.location + offset * component.scale
            for component, weight in zip(self.components, self.weights)
            if weight > 0.0
            for offset in ANCHOR_OFFSETS
        }
        return self.support.clip_points(points)

    def _log_density_inside(self, x: np.ndarray) -> np.ndarray:
        terms = np.stack(
            [
                math.log(w) + c.log_density(x)
                for c, w in zip(self.components, self.weights)
                if w > 0.0
            ]
        )
        with np.errstate(divide='ignore'):
            return logsumexp(terms, axis=0)

    def draw(self, rng: rnd.Generator, size: int) -> np.ndarray:
        labels = rng.choice(len(self.components), size=size, p=self.weights)
        values = np.empty(size)
        for i, component in enumerate(self.components):
            mask = labels == i
            values[mask] = component.draw(rng, int(mask.sum()))
        return values


def _check_arity(cls, params: Sequence[float], n: int):
    if len(params) != n:
        raise ValueError(
            f'{cls.family.value} expects {n} parameters, got {len(params)}'
        )


def make_density(family: str, params: Sequence[float]) -> Density:
    """Constructs a base-family density from its family name and parameters"""
    density_type = density_registry.from_name(family)
    if density_type is FiniteMixture:
        raise ValueError('mixtures need components;  use FiniteMixture directly')
    return density_type.from_params(params)


def density_from_spec(text: str) -> Density:
    """Parses the `family:param,param` mini-syntax, e.g. `gaussian:0,1`"""
    family, sep, rest = text.strip().partition(':')
    if not sep or not rest:
        raise ValueError(f'density spec `{text}` should read `family:p1,p2,...`')
    try:
        params = [float(token) for token in rest.split(',')]
    except ValueError as error:
        raise ValueError(f'density spec `{text}` has non-numeric parameters') from error
    return make_density(family, params)


def log_density(d: Density, x: ArrayLike) -> Union[float, np.ndarray]:
    """log of the density at `x`;  `-inf` outside the support, never nan"""
    return d.log_density(x)


SAMPLE_BLOCK_SIZE = 4096
"""Number of draws generated per counter block"""


class SampleStream:
    """Counter-based stream of i.i.d. draws from a density

    The draw with index j is the (j mod B)-th value of block j // B, and block
    b is generated from the substream (seed, replicate, b).  Hence a value
    depends only on (seed, replicate, j), however the stream is consumed.
    """

    def __init__(
        self,
        density: Density,
        seed: int,
        replicate: int = 0,
        *,
        block_size: int = SAMPLE_BLOCK_SIZE,
    ):
        if block_size < 1:
            raise ValueError(f'block_size ({block_size}) should be positive')

        self.density = density
        self.seed = seed
        self.replicate = replicate
        self.block_size = block_size
        self.position = 0
        self._block_index = -1
        self._block = np.empty(0)

    def _load_block(self, index: int):
        if index != self._block_index:
            rng = substream_rng(self.seed, self.replicate, index)
            self._block = self.density.draw(rng, self.block_size)
            self._block_index = index

    def take(self, count: int) -> np.ndarray:
        """Returns the next `count` draws"""
        if count < 0:
            raise ValueError(f'count ({count}) should be non-negative')

        chunks = []
        remaining = count
        while remaining > 0:
            index, offset = divmod(self.position, self.block_size)
            self._load_block(index)
            size = min(remaining, self.block_size - offset)
            chunks.append(self._block[offset : offset + size])
            self.position += size
            remaining -= size

        return np.concatenate(chunks) if chunks else np.empty(0)


@dataclass(frozen=True)
class Sample:
    """Realized i.i.d. sample drawn from a source"""

    values: np.ndarray
    source_id: str
    seed: int
    replicate: int = 0

    def __len__(self) -> int:
        return len(self.values)


def sample(d: Density, seed: int, n: int, *, replicate: int = 0) -> Sample:
    """Draws `n` i.i.d. values from `d`, deterministically given the seed

    Distinct `replicate` indices yield independent substreams.
    """
    if n < 1:
        raise ValueError(f'sample size ({n}) should be at least 1')

    values = SampleStream(d, seed, replicate).take(n)
    values.setflags(write=False)
    return Sample(values, d.spec, seed, replicate)


def normalization_defect(d: Density, rel_tol: float = 1e-10) -> float:
    """|integral of d - 1| computed by adaptive quadrature"""
    from lconsistency.quadrature import integrate

    result = integrate(
        lambda x: np.exp(d.log_density(x)),
        d.support,
        rel_tol,
        points=d.support.clip_points(d.breakpoints + d.anchors),
        center=d.location,
        scale=d.scale,
    )
    return abs(result.value - 1.0)
