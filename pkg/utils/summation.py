"""Compensated summation helpers used by every accumulation in the numerics."""

import math
from typing import Iterable, Tuple

import numpy as np

from utils.errors import ShapeException


def two_sum(u: float, v: float) -> Tuple[float, float]:
    """Error-free transformation: u + v == s + t exactly with s = fl(u + v)."""
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    return s, -(up + vpp)


class Accumulator:
    """A running sum held as an unevaluated pair (s, t) with t the rounding residue."""

    def __init__(self, y: float = 0.0):
        self._s = float(y)
        self._t = 0.0

    def add(self, y: float) -> None:
        y, u = two_sum(float(y), self._t)
        self._s, self._t = two_sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u

    @property
    def total(self) -> float:
        return self._s


def fsum(values) -> float:
    """Correctly rounded sum of a numpy array or any iterable of floats."""
    if isinstance(values, np.ndarray):
        values = values.ravel().tolist()
    return math.fsum(values)


def dot(a: np.ndarray, b: np.ndarray) -> float:
    """Correctly rounded sum of the elementwise products."""
    return fsum(np.multiply(a, b))


def mean_and_stderr(values: Iterable[float]) -> Tuple[float, float]:
    """Sample mean and standard error of the mean, accumulated in input order."""
    data = np.asarray(list(values), dtype=np.float64)
    if data.size < 2:
        raise ShapeException(f"Standard error needs at least 2 samples, got {data.size}.")
    mean = fsum(data) / data.size
    variance = fsum((data - mean) ** 2) / (data.size - 1)
    return mean, math.sqrt(variance / data.size)
