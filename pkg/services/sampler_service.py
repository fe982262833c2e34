"""Seeded dyadic Brownian sample paths on [-1, 1] and their elementary transforms."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from . import settings
from utils.errors import BoundsException, CapacityException, DomainException

# --- Counter-based random streams ---

SAMPLE_STREAM = 0
REFINE_STREAM = 1
PERTURB_STREAM = 2

_UNIT = 2.0 ** -53


def _stream_key(seed: int, level: int, stream: int) -> int:
    if not 0 <= seed <= settings.MAX_SEED:
        raise DomainException("seed", seed, "0 <= seed < 2^64")
    return (seed << 64) | (level << 8) | stream


def uniform_stream(seed: int, level: int, stream: int, count: int) -> np.ndarray:
    """Open-interval uniforms; entry i depends only on (seed, level, stream, i)."""
    bitgen = np.random.Philox(key=_stream_key(seed, level, stream))
    raw = bitgen.random_raw(count)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _UNIT


def normal_stream(seed: int, level: int, stream: int, count: int) -> np.ndarray:
    """Standard normals by inverse CDF of `uniform_stream`."""
    return special.ndtri(uniform_stream(seed, level, stream, count))


def trial_seed(seed: int, trial: int) -> int:
    """Independent 64-bit seed for trial `trial` of a Monte-Carlo run keyed by `seed`."""
    state = np.random.SeedSequence(seed, spawn_key=(trial,)).generate_state(1, np.uint64)
    return int(state[0])


# --- Paths ---

def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=np.float64)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class SamplePath:
    """Grid values f(k/2^level - 1), k = 0..2^(level+1), of a path with f(-1) = 0."""

    level: int
    values: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self):
        values = _readonly(self.values)
        if values.ndim != 1 or values.size != (1 << (self.level + 1)) + 1:
            raise DomainException("values", values.shape, f"length 2^{self.level + 1}+1")
        if values[0] != 0.0:
            raise DomainException("values[0]", values[0], "f(-1) = 0")
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        """Index of the last grid point, 2^(level+1)."""
        return self.values.size - 1

    @property
    def last(self) -> float:
        return float(self.values[-1])

    def points(self) -> np.ndarray:
        return np.arange(self.values.size, dtype=np.float64) / (1 << self.level) - 1.0

    def coarsen(self, n: int) -> np.ndarray:
        """Values on the level-n sub-grid (a strided view)."""
        if not 0 <= n <= self.level:
            raise DomainException("n", n, f"0 <= n <= path level {self.level}")
        return self.values[:: 1 << (self.level - n)]


@dataclass(frozen=True, eq=False)
class ReversedPath:
    """Grid values of u -> f(1) - f(1 - u) on [0, 2]."""

    level: int
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))

    def as_path(self) -> SamplePath:
        return SamplePath(self.level, self.values)


def _check_capacity(level: int) -> None:
    cap = settings.max_level()
    if level > cap:
        logging.error(f"Level {level} exceeds the memory cap {cap}")
        raise CapacityException("Grid points", (1 << (level + 1)) + 1, (1 << (cap + 1)) + 1)


def sample(level: int, seed: int) -> SamplePath:
    """Brownian grid path with 2^(level+1) i.i.d. N(0, 2^-level) increments."""
    if level < 0:
        raise DomainException("level", level, "level >= 0")
    _check_capacity(level)

    steps = normal_stream(seed, level, SAMPLE_STREAM, 1 << (level + 1))
    steps *= math.sqrt(2.0 ** -level)
    values = np.empty(steps.size + 1)
    values[0] = 0.0
    np.cumsum(steps, out=values[1:])
    return SamplePath(level, values, seed)


def refine(path: SamplePath, seed: int) -> SamplePath:
    """Inserts Brownian-bridge midpoints; the coarse values are copied unchanged."""
    level = path.level + 1
    _check_capacity(level)

    noise = normal_stream(seed, level, REFINE_STREAM, path.size)
    values = np.empty(2 * path.size + 1)
    values[::2] = path.values
    values[1::2] = 0.5 * (path.values[:-1] + path.values[1:]) + math.sqrt(2.0 ** -(level + 1)) * noise
    return SamplePath(level, values, seed)


def reverse(path: SamplePath) -> ReversedPath:
    return ReversedPath(path.level, path.last - path.values[::-1])


def increment(path: SamplePath, a_index: int, b_index: int) -> float:
    """f at grid index `b_index` minus f at grid index `a_index`."""
    for index in (a_index, b_index):
        if not 0 <= index <= path.size:
            raise BoundsException(index, path.size)
    if a_index > b_index:
        raise DomainException("a_index", a_index, f"a_index <= b_index = {b_index}")
    return float(path.values[b_index] - path.values[a_index])


def ramp_path(level: int) -> SamplePath:
    """Deterministic control f(x) = x + 1 on the grid."""
    if level < 0:
        raise DomainException("level", level, "level >= 0")
    _check_capacity(level)
    return SamplePath(level, np.arange((1 << (level + 1)) + 1, dtype=np.float64) / (1 << level))
