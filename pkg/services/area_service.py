"""
Levy area of the frame process.

On the level-n grid, position i stands for the point i/2^n - 1 and
d_i = B[i+1] - B[i]. For dyadic s < t put N = 2^n, sigma = N s, tau = N t;
the s-window is positions sigma..sigma+N-1 and the t-window tau..tau+N-1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from . import sampler_service, settings
from .sampler_service import SamplePath
from utils.dyadic import DyadicTime, as_dyadic
from utils.errors import CapacityException, DomainException, ResolutionException, ShapeException
from utils.parallel import ordered_map
from utils.summation import dot, fsum, mean_and_stderr

PAIR_ENUMERATION_MAX_LEVEL = 10
REGION_NAMES = ("rho_plus", "rho_minus_1", "rho_minus_2", "rho_minus_3")


@dataclass(frozen=True)
class _Windows:
    n: int
    sigma: int
    tau: int

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def lag(self) -> int:
        return self.tau - self.sigma


def _windows(s, t, n: int) -> _Windows:
    s, t = as_dyadic(s), as_dyadic(t)
    if not s < t:
        raise DomainException("(s, t)", (str(s), str(t)), "s < t")
    gap = t - s
    if gap.value * (1 << n) < 1:
        raise ResolutionException(str(gap), n)
    return _Windows(n, s.index_at(n), t.index_at(n))


def _grid(path: SamplePath, n: int) -> np.ndarray:
    return path.coarsen(n)


# --- Double sum ---

def area_double_sum(path: SamplePath, s, t, n: int) -> float:
    """
    1/2 sum_{v=1}^{N-1} sum_{u<v} (dS_u dT_v - dT_u dS_v), with the inner sums
    collapsed to prefix increments X_s(v) = B[sigma+v] - B[sigma].
    """
    w = _windows(s, t, n)
    b = _grid(path, n)
    size = w.size
    ds = np.diff(b[w.sigma : w.sigma + size + 1])
    dt = np.diff(b[w.tau : w.tau + size + 1])
    xs = b[w.sigma + 1 : w.sigma + size] - b[w.sigma]
    xt = b[w.tau + 1 : w.tau + size] - b[w.tau]
    return 0.5 * fsum(np.concatenate((xs * dt[1:], -(xt * ds[1:]))))


# --- Region decomposition ---

@dataclass(frozen=True, eq=False)
class RegionSets:
    """
    For each t-window position j (array `rows`), region r contains the
    s-window positions lo[r][k] .. hi[r][k] (empty when hi < lo).
    """

    n: int
    s: DyadicTime
    t: DyadicTime
    rows: np.ndarray
    lo: Dict[str, np.ndarray]
    hi: Dict[str, np.ndarray]

    def cardinality(self, name: str) -> int:
        return int(np.sum(np.maximum(0, self.hi[name] - self.lo[name] + 1)))

    @property
    def plus_cardinality(self) -> int:
        return self.cardinality("rho_plus")

    @property
    def minus_cardinality(self) -> int:
        return sum(self.cardinality(name) for name in REGION_NAMES[1:])

    def pairs(self, name: str) -> Iterator[Tuple[int, int]]:
        """Enumerates (i, j) grid positions; small levels only."""
        if self.n > PAIR_ENUMERATION_MAX_LEVEL:
            raise CapacityException("Pair enumeration level", self.n, PAIR_ENUMERATION_MAX_LEVEL)
        for j, lo, hi in zip(self.rows, self.lo[name], self.hi[name]):
            for i in range(int(lo), int(hi) + 1):
                yield i, int(j)


def region_sets(n: int, s, t) -> RegionSets:
    """
    rho_plus:    j - i >= tau - sigma + 1
    rho_minus_1: 1 <= j - i <= tau - sigma - 1
    rho_minus_2: j - i < 0
    rho_minus_3: j = i
    """
    w = _windows(s, t, n)
    size = w.size
    first, last = w.sigma, w.sigma + size - 1
    j = np.arange(w.tau, w.tau + size, dtype=np.int64)

    lo = {
        "rho_plus": np.full_like(j, first),
        "rho_minus_1": np.maximum(first, j - w.lag + 1),
        "rho_minus_2": np.maximum(first, j + 1),
        "rho_minus_3": j.copy(),
    }
    hi = {
        "rho_plus": j - w.lag - 1,
        "rho_minus_1": np.minimum(j - 1, last),
        "rho_minus_2": np.full_like(j, last),
        "rho_minus_3": np.where(j <= last, j, j - 1),
    }
    return RegionSets(n, as_dyadic(s), as_dyadic(t), j, lo, hi)


def _region_sum(b: np.ndarray, regions: RegionSets, name: str) -> float:
    lo, hi = regions.lo[name], regions.hi[name]
    live = hi >= lo
    j = regions.rows[live]
    inner = b[hi[live] + 1] - b[lo[live]]
    return dot(b[j + 1] - b[j], inner)


def area_by_regions(path: SamplePath, s, t, n: int) -> Tuple[float, Dict[str, float]]:
    """1/2 (rho_plus - rho_minus_1 - rho_minus_2 - rho_minus_3) of the products d_i d_j."""
    regions = region_sets(n, s, t)
    b = _grid(path, n)
    parts = {name: _region_sum(b, regions, name) for name in REGION_NAMES}
    value = 0.5 * fsum([parts["rho_plus"], -parts["rho_minus_1"], -parts["rho_minus_2"], -parts["rho_minus_3"]])
    return value, parts


# --- Ito-sum representation ---

ITO_MODES = ("exact", "analytic")


def ito_terms(path: SamplePath, s, t, n: int) -> Dict[str, float]:
    """
    The eight terms of the Ito representation as left-point sums on the level-n grid.
    The reversed integral with lag tau - sigma is sampled at k - (tau - sigma).
    """
    w = _windows(s, t, n)
    b = _grid(path, n)
    size, sigma, tau, lag = w.size, w.sigma, w.tau, w.lag
    d = np.diff(b)

    level_path = SamplePath(n, b)
    bh = sampler_service.reverse(level_path).values
    dbh = np.diff(bh)  # dbh[k-1] = bh[k] - bh[k-1]

    j = np.arange(tau, tau + size)
    overlap = np.arange(tau, sigma + size)
    k_shift = np.arange(size - sigma + 1, 2 * size - sigma + 1)
    k_plain = np.arange(size - sigma + 1, 2 * size - tau + 1)

    return {
        "forward_lagged": dot(b[j - lag], d[j]),
        "forward_overlap": dot(b[overlap], d[overlap]),
        "boundary_t": b[tau] * (b[sigma + size] - b[tau]),
        "boundary_s": b[sigma] * (b[tau + size] - b[tau]),
        "quadratic_variation": fsum(d[overlap] ** 2),
        "reversed_lagged": dot(bh[k_shift - lag], dbh[k_shift - 1]),
        "reversed_plain": dot(bh[k_plain - 1], dbh[k_plain - 1]),
        "reversed_boundary": bh[2 * size - tau] * (bh[2 * size - sigma] - bh[2 * size - tau]),
    }


def area_ito_form(path: SamplePath, s, t, n: int, mode: str = "exact") -> float:
    """
    1/2 I_lag - 1/2 I_overlap + 1/2 B_{t-1}(B_s - B_{t-1}) - 1/2 B_{s-1}(B_t - B_{t-1})
    - 1/2 QV + 1/2 Î_lag - 1/2 Î - 1/2 B̂_{2-t}(B̂_{2-s} - B̂_{2-t}).

    QV is the realized sum in exact mode and 1 - t + s in analytic mode.
    """
    if mode not in ITO_MODES:
        raise DomainException("mode", mode, f"one of {ITO_MODES}")
    terms = ito_terms(path, s, t, n)
    if mode == "analytic":
        s, t = as_dyadic(s), as_dyadic(t)
        terms["quadratic_variation"] = float(1 - t.value + s.value)
    return 0.5 * fsum(
        [
            terms["forward_lagged"],
            -terms["forward_overlap"],
            terms["boundary_t"],
            -terms["boundary_s"],
            -terms["quadratic_variation"],
            terms["reversed_lagged"],
            -terms["reversed_plain"],
            -terms["reversed_boundary"],
        ]
    )


def qv_discrepancy(path: SamplePath, s, t, n: int) -> float:
    """Analytic-mode minus exact-mode Ito form."""
    return area_ito_form(path, s, t, n, "analytic") - area_ito_form(path, s, t, n, "exact")


# --- Surface ---

@dataclass(frozen=True, eq=False)
class AreaSurface:
    """Upper-triangle values keyed by (k_s, k_t), k_s < k_t, at points k/2^grid_level."""

    grid_level: int
    sum_level: int
    source_level: int
    source_seed: Optional[int]
    values: Dict[Tuple[int, int], float]

    def get(self, s, t) -> float:
        ks, kt = as_dyadic(s).index_at(self.grid_level), as_dyadic(t).index_at(self.grid_level)
        if ks == kt:
            return 0.0
        if ks < kt:
            return self.values[(ks, kt)]
        return -self.values[(kt, ks)]

    def rows(self) -> List[Tuple[float, float, float]]:
        scale = float(1 << self.grid_level)
        return [(ks / scale, kt / scale, area) for (ks, kt), area in sorted(self.values.items())]


def area_surface(path: SamplePath, m: int, n: int, threads: int = 1) -> AreaSurface:
    """A(s, t) for every s < t among the points k/2^m, k = 0..2^m - 1."""
    if not 0 <= m <= n <= path.level:
        raise DomainException("(m, n)", (m, n), f"0 <= m <= n <= path level {path.level}")
    cap = settings.max_surface_entries()
    if (1 << (2 * m)) > cap:
        raise CapacityException("Surface entries", 1 << (2 * m), cap)

    keys = [(ks, kt) for ks in range(1 << m) for kt in range(ks + 1, 1 << m)]
    logging.info(f"Evaluating {len(keys)} surface cells at m={m}, n={n}")

    def one(key: Tuple[int, int]) -> float:
        return area_double_sum(path, DyadicTime(key[0], m), DyadicTime(key[1], m), n)

    values = dict(zip(keys, ordered_map(one, keys, threads)))
    return AreaSurface(m, n, path.level, path.seed, values)


def surface_oscillation(surface: AreaSurface, margin: float = 0.125) -> float:
    """Largest |A| jump between neighbouring cells that both stay `margin` away from the diagonal."""
    gap = int(math.ceil(margin * (1 << surface.grid_level)))
    worst = 0.0
    for (ks, kt), area in surface.values.items():
        if kt - ks < gap:
            continue
        for neighbour in ((ks + 1, kt), (ks, kt + 1)):
            other = surface.values.get(neighbour)
            if other is not None and neighbour[1] - neighbour[0] >= gap:
                worst = max(worst, abs(other - area))
    return worst


# --- Diagonal jump ---

@dataclass
class DiagonalReport:
    s: str
    offsets: List[float]
    offset_exponents: List[int]
    mean_above: List[float]
    se_above: List[float]
    mean_below: List[float]
    se_below: List[float]
    params: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> Dict[str, object]:
        return {
            "s": self.s,
            "offsets": self.offsets,
            "offset_exponents": self.offset_exponents,
            "mean_above": self.mean_above,
            "se_above": self.se_above,
            "mean_below": self.mean_below,
            "se_below": self.se_below,
            "params": self.params,
        }


def diagonal_limit(
    seeds: Sequence[int],
    s,
    offsets: Sequence[int],
    n: int,
    level: Optional[int] = None,
    threads: int = 1,
    path_factory=sampler_service.sample,
) -> DiagonalReport:
    """
    Ensemble mean and standard error of A(s - 2^-k, s) and A(s, s - 2^-k) for each
    offset exponent k.
    """
    s = as_dyadic(s)
    level = n if level is None else level
    if n > level:
        raise DomainException("n", n, f"n <= level {level}")
    starts = []
    for k in offsets:
        if k > n:
            raise ResolutionException(f"2^-{k}", n)
        delta = DyadicTime(1, k)
        if s < delta:
            raise DomainException("offset", f"2^-{k}", f"s - offset >= 0 for s = {s}")
        starts.append(s - delta)

    def one(seed: int) -> List[float]:
        path = path_factory(level, seed)
        return [area_double_sum(path, start, s, n) for start in starts]

    per_seed = np.asarray(ordered_map(one, seeds, threads)).reshape(len(seeds), len(starts))
    mean_above, se_above, mean_below, se_below = [], [], [], []
    for column in range(len(starts)):
        mean, se = mean_and_stderr(per_seed[:, column])
        mean_above.append(mean)
        se_above.append(se)
        mean_below.append(0.0 - mean)
        se_below.append(se)

    return DiagonalReport(
        s=str(s),
        offsets=[2.0 ** -k for k in offsets],
        offset_exponents=list(offsets),
        mean_above=mean_above,
        se_above=se_above,
        mean_below=mean_below,
        se_below=se_below,
        params={"n": n, "level": level, "trials": len(seeds)},
    )


# --- Bounded-variation planar paths ---

def _planar(xs, ys) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or x.shape != y.shape:
        raise ShapeException(f"Coordinate sequences differ in shape: {x.shape} vs {y.shape}.")
    if x.size < 2:
        raise ShapeException(f"A planar path needs at least 2 points, got {x.size}.")
    return x, y


def bv2d_levy_area(xs, ys) -> float:
    """1/2 sum (x_i - x_0)(y_{i+1} - y_i) - (y_i - y_0)(x_{i+1} - x_i)."""
    x, y = _planar(xs, ys)
    rx, ry = x[:-1] - x[0], y[:-1] - y[0]
    return 0.5 * fsum(np.concatenate((rx * np.diff(y), -(ry * np.diff(x)))))


def bv2d_signature_level2(xs, ys) -> np.ndarray:
    """Second iterated integral of the polygonal path, built segment by segment with Chen's identity."""
    x, y = _planar(xs, ys)
    points = np.stack((x, y), axis=1)
    relative = points[:-1] - points[0]
    steps = np.diff(points, axis=0)
    result = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            result[a, b] = fsum(
                np.concatenate((relative[:, a] * steps[:, b], 0.5 * steps[:, a] * steps[:, b]))
            )
    return result


def oscillating_circle(radius_inverse: int, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """(cos(N^2 u)/N, sin(N^2 u)/N) sampled at `points` uniform times u in [0, 1]."""
    u = np.linspace(0.0, 1.0, points)
    angle = radius_inverse ** 2 * u
    return np.cos(angle) / radius_inverse, np.sin(angle) / radius_inverse
