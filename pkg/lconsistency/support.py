from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class Interval:
    """Closed real interval [low, high], whose endpoints may be infinite

    The support of every density is an interval; infinite endpoints are
    represented by `-math.inf` and `math.inf`.
    """

    low: float
    high: float

    def __post_init__(self):
        if math.isnan(self.low) or math.isnan(self.high):
            raise ValueError(f'endpoints ({self.low}, {self.high}) cannot be nan')
        if not self.low < self.high:
            raise ValueError(
                f'low ({self.low}) should be strictly less than high ({self.high})'
            )

    @staticmethod
    def real_line() -> Interval:
        return Interval(-math.inf, math.inf)

    @staticmethod
    def half_line(low: float = 0.0) -> Interval:
        return Interval(low, math.inf)

    @property
    def as_tuple(self) -> Tuple[float, float]:
        return self.low, self.high

    def contains(self, x) -> np.ndarray:
        """elementwise membership test (works on scalars and arrays)"""
        x = np.asarray(x, dtype=float)
        return (self.low <= x) & (x <= self.high)

    def includes(self, other: Interval) -> bool:
        """True iff `other` is a subset of this interval"""
        return self.low <= other.low and other.high <= self.high

    def overlaps(self, other: Interval) -> bool:
        return self.low <= other.high and other.low <= self.high

    def hull(self, other: Interval) -> Interval:
        return Interval(min(self.low, other.low), max(self.high, other.high))

    def clip_points(self, points) -> Tuple[float, ...]:
        """sorted unique points lying strictly inside the interval"""
        return tuple(
            sorted({float(p) for p in points if self.low < p < self.high})
        )
