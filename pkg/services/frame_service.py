"""The frame operator T_h: length-one windows of a sampled path and their polygonal interpolation in h."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple, Union

import numpy as np

from .sampler_service import SamplePath
from utils.dyadic import DyadicTime, as_dyadic
from utils.errors import AlignmentException, DomainException, ShapeException


def n_of_h(h: Union[float, Fraction, DyadicTime]) -> int:
    """The unique n with 2^-n <= h < 2^(1-n), for 0 < h <= 1."""
    value = h.value if isinstance(h, DyadicTime) else Fraction(h)
    if not 0 < value <= 1:
        raise DomainException("h", h, "0 < h <= 1")
    n = 0
    while Fraction(1, 1 << n) > value:
        n += 1
    return n


@dataclass(frozen=True, eq=False)
class FrameEvaluation:
    """Entry j holds f(h - 1 + j/2^n), copied out of the source path."""

    source_level: int
    h: DyadicTime
    values: np.ndarray

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class FramePolygonal:
    approx_level: int
    knots: Tuple[FrameEvaluation, ...]


def frame_eval(path: SamplePath, h) -> FrameEvaluation:
    h = as_dyadic(h)
    n = path.level
    start = h.index_at(n)
    values = path.values[start : start + (1 << n) + 1].copy()
    values.setflags(write=False)
    return FrameEvaluation(n, h, values)


def _check_pair(a: FrameEvaluation, b: FrameEvaluation) -> None:
    if a.source_level != b.source_level or a.size != b.size:
        raise ShapeException(
            f"Frame evaluations differ in shape: level {a.source_level}/{a.size} "
            f"vs level {b.source_level}/{b.size}."
        )


def frame_difference(a: FrameEvaluation, b: FrameEvaluation) -> np.ndarray:
    """Grid values of T_a - T_b."""
    _check_pair(a, b)
    return a.values - b.values


def sup_distance(a: FrameEvaluation, b: FrameEvaluation) -> float:
    _check_pair(a, b)
    return float(np.max(np.abs(a.values - b.values)))


# --- Dyadic polygonal approximations ---

def polygonal(path: SamplePath, m: int) -> FramePolygonal:
    if not 0 <= m <= path.level:
        raise AlignmentException(f"2^-{m}", path.level)
    knots = tuple(frame_eval(path, DyadicTime(k, m)) for k in range((1 << m) + 1))
    logging.debug(f"Built level-{m} polygonal frame with {len(knots)} knots")
    return FramePolygonal(m, knots)


def eval_polygonal(fp: FramePolygonal, t) -> np.ndarray:
    """X(m)_t = X_{(k-1)/2^m} + 2^m (t - (k-1)/2^m) (X_{k/2^m} - X_{(k-1)/2^m})."""
    value = t.value if isinstance(t, DyadicTime) else Fraction(t)
    if not 0 <= value <= 1:
        raise DomainException("t", t, "0 <= t <= 1")

    scaled = value * (1 << fp.approx_level)
    left = int(scaled)
    if scaled == left:
        return fp.knots[left].values.copy()

    weight = float(scaled - left)
    a, b = fp.knots[left].values, fp.knots[left + 1].values
    return a + weight * (b - a)


def polygonal_errors(path: SamplePath) -> List[float]:
    """
    For m = 0..level: the largest sup-distance between X(m)_t and T_t over
    all grid times t = j/2^level.
    """
    n = path.level
    errors = []
    for m in range(n + 1):
        fp = polygonal(path, m)
        worst = 0.0
        for j in range((1 << n) + 1):
            t = DyadicTime(j, n)
            exact = frame_eval(path, t).values
            worst = max(worst, float(np.max(np.abs(eval_polygonal(fp, t) - exact))))
        errors.append(worst)
    return errors
