"""Gaussian moments, Cameron-Martin Lipschitz values and the Monte-Carlo check of the tail estimate."""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate, special

from . import frame_service, sampler_service, variation_service
from .sampler_service import SamplePath
from utils.dyadic import DyadicTime, as_dyadic
from utils.errors import AlignmentException, DomainException
from utils.parallel import ordered_map
from utils.summation import fsum, mean_and_stderr

DEFAULT_R_GRID = (0.5, 1.0, 1.5, 2.0, 3.0)
MIN_TAIL_TRIALS = 100

PathFactory = Callable[[int, int], SamplePath]


def _sampled(level: int, seed: int) -> SamplePath:
    return sampler_service.sample(level, seed)


# --- Closed forms ---

def gaussian_abs_moment(pprime: float, dt: float) -> float:
    """E|B_t - B_s|^{p'} = sqrt(2^{p'}/pi) Gamma((p'+1)/2) dt^{p'/2}."""
    if not pprime > 0:
        raise DomainException("pprime", pprime, "p' > 0")
    if not dt >= 0:
        raise DomainException("dt", dt, "dt >= 0")
    return math.sqrt(2.0 ** pprime / math.pi) * float(special.gamma((pprime + 1) / 2)) * float(dt) ** (pprime / 2)


def gaussian_tail_bound(r: float) -> float:
    """exp(-r^2/2) / (sqrt(2 pi) r)."""
    if not r > 0:
        raise DomainException("r", r, "r > 0")
    return math.exp(-r * r / 2) / (math.sqrt(2 * math.pi) * r)


@dataclass(frozen=True)
class MomentCheck:
    estimate: float
    stderr: float
    formula_value: float

    @property
    def within_3se(self) -> bool:
        return abs(self.estimate - self.formula_value) <= 3 * self.stderr


def mc_moment_check(pprime: float, dt, level: int, trials: int, seed: int, threads: int = 1) -> MomentCheck:
    """Monte-Carlo mean of |f(dt - 1) - f(-1)|^{p'} over `trials` independent paths."""
    value = Fraction(dt.value if isinstance(dt, DyadicTime) else dt)
    steps = value * (1 << level)
    if steps.denominator != 1:
        raise AlignmentException(dt, level)
    if trials < 2:
        raise DomainException("trials", trials, "trials >= 2")
    formula = gaussian_abs_moment(pprime, float(value))

    def one(trial: int) -> float:
        path = sampler_service.sample(level, sampler_service.trial_seed(seed, trial))
        return abs(sampler_service.increment(path, 0, int(steps))) ** pprime

    estimate, stderr = mean_and_stderr(ordered_map(one, range(trials), threads))
    return MomentCheck(estimate, stderr, formula)


# --- Cameron-Martin Lipschitz values ---

@dataclass(frozen=True)
class WindowExtremal:
    cm_norm: float
    sup_value: float
    argmax_t: float


def _check_window(h1: float, h2: float) -> float:
    if not 0 <= h1 < h2 <= 1:
        raise DomainException("(h1, h2)", (h1, h2), "0 <= h1 < h2 <= 1")
    return h2 - h1


def _piecewise_integral(func: Callable[[float], float], lo: float, hi: float, breaks: Sequence[float]) -> float:
    """Adaptive quadrature of `func` over [lo, hi], split at the breakpoints inside it."""
    edges = [lo] + sorted(b for b in breaks if lo < b < hi) + [hi]
    return fsum(integrate.quad(func, a, b)[0] for a, b in zip(edges, edges[1:]))


def cm_window_norm(h1, h2, grid_level: int = 10) -> Tuple[float, WindowExtremal]:
    """
    sqrt(h2 - h1), with the extremal g = 1_[h1-1, h2-1) / sqrt(h2 - h1) checked by quadrature
    on the shifts t = j/2^grid_level: its L2 norm and the sup of |int g| over [h1-1+t, h2-1+t].
    """
    width = _check_window(float(h1), float(h2))
    lip = math.sqrt(width)
    start, stop = float(h1) - 1, float(h2) - 1
    height = 1.0 / lip

    def extremal(s: float) -> float:
        return height if start <= s < stop else 0.0

    cm_norm = math.sqrt(_piecewise_integral(lambda s: extremal(s) ** 2, -1.0, 1.0, (start, stop)))
    shifts = np.arange((1 << grid_level) + 1) / (1 << grid_level)
    overlaps = np.array([abs(_piecewise_integral(extremal, start + t, stop + t, (start, stop))) for t in shifts])
    best = int(np.argmax(overlaps))
    return lip, WindowExtremal(cm_norm, float(overlaps[best]), float(shifts[best]))


def lip_pvar_bound(p: float, h1, h2) -> float:
    """d_p (h2 - h1)^{1/2 - 1/p}."""
    if not p > 2:
        raise DomainException("p", p, "p > 2")
    width = _check_window(float(h1), float(h2))
    return variation_service.d_p_lip(p) * width ** (0.5 - 1 / p)


def lip_norm_bound(p: float, h1, h2) -> float:
    """2 d_p (h2 - h1)^{1/2 - 1/p}, dominating sup-norm plus p-variation Lipschitz values."""
    return 2 * lip_pvar_bound(p, h1, h2)


def hoelder_moment_bound(alpha: float, beta: float, p: float, pprime: float, h1, h2) -> float:
    """d(alpha,beta,p,p') (h2 - h1)^{(1/2 - 1/p) p'}."""
    variation_service.check_admissible(alpha, beta, p, pprime)
    width = _check_window(float(h1), float(h2))
    return variation_service.d_alpha_beta_p_pprime(alpha, beta, p, pprime) * width ** ((0.5 - 1 / p) * pprime)


# --- Tail experiment ---

@dataclass
class TailReport:
    params: Dict[str, object]
    r_grid: List[float]
    empirical_survival: List[float]
    bound: List[float]
    binomial_se: List[float]
    deviation_survival: List[float]
    median: float
    mean: float
    moment_estimates: Dict[str, Dict[str, float]] = field(default_factory=dict)
    constants: Dict[str, float] = field(default_factory=dict)

    def to_json(self) -> Dict[str, object]:
        return {
            "params": self.params,
            "r": self.r_grid,
            "survival": self.empirical_survival,
            "bound": self.bound,
            "binomial_se": self.binomial_se,
            "deviation_survival": self.deviation_survival,
            "median": self.median,
            "mean": self.mean,
            "moments": self.moment_estimates,
            "constants": self.constants,
        }

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.r_grid, self.empirical_survival, self.bound))


def frame_norm(path: SamplePath, h1: DyadicTime, h2: DyadicTime, p: float) -> float:
    """||T_h2 - T_h1||_p on the grid."""
    diff = frame_service.frame_difference(
        frame_service.frame_eval(path, h2), frame_service.frame_eval(path, h1)
    )
    return variation_service.pvar_norm(diff, p)


def tail_experiment(
    p: float,
    alpha: float,
    h1,
    h2,
    level: int,
    trials: int,
    r_grid: Optional[Sequence[float]] = None,
    seed: int = 0,
    pprimes: Sequence[float] = (),
    beta: Optional[float] = None,
    threads: int = 1,
    path_factory: PathFactory = _sampled,
) -> TailReport:
    """
    Z = ||T_h2 - T_h1||_p / (d2 (h2-h1)^{1/2-1/p}) - d1 per trial; empirical
    survival P(Z >= r) against exp(-r^2/2)/(sqrt(2 pi) r).
    """
    h1, h2 = as_dyadic(h1), as_dyadic(h2)
    if not h1 < h2:
        raise DomainException("(h1, h2)", (str(h1), str(h2)), "h1 < h2")
    h1.index_at(level)
    h2.index_at(level)
    if trials < MIN_TAIL_TRIALS:
        raise DomainException("trials", trials, f"trials >= {MIN_TAIL_TRIALS}")
    beta = alpha if beta is None else beta
    for pprime in pprimes:
        variation_service.check_admissible(alpha, beta, p, pprime)
    constants = variation_service.d_constants(alpha, beta, p, p)
    r_grid = list(DEFAULT_R_GRID if r_grid is None else r_grid)
    bounds = [gaussian_tail_bound(r) for r in r_grid]

    width = float(h2 - h1)
    scale = constants.d2 * width ** (0.5 - 1 / p)
    logging.info(f"Tail experiment: p={p}, alpha={alpha}, h1={h1}, h2={h2}, level={level}, trials={trials}")

    def one(trial: int) -> float:
        path = path_factory(level, sampler_service.trial_seed(seed, trial))
        return frame_norm(path, h1, h2, p)

    norms = np.asarray(ordered_map(one, range(trials), threads))
    z = norms / scale - constants.d1

    survival = [float(np.count_nonzero(z >= r)) / trials for r in r_grid]
    binomial_se = [math.sqrt(min(b, 1.0) * (1 - min(b, 1.0)) / trials) for b in bounds]
    mean_norm = fsum(norms) / trials
    lipschitz = lip_norm_bound(p, h1.value, h2.value)
    deviation = [float(np.count_nonzero(norms > 2 * mean_norm + r * lipschitz)) / trials for r in r_grid]

    moments = {}
    for pprime in pprimes:
        estimate, stderr = mean_and_stderr(norms ** pprime)
        moments[repr(float(pprime))] = {
            "estimate": estimate,
            "stderr": stderr,
            "bound": hoelder_moment_bound(alpha, beta, p, pprime, float(h1), float(h2)),
        }

    params = {
        "p": p,
        "alpha": alpha,
        "beta": beta,
        "h1": str(h1),
        "h2": str(h2),
        "level": level,
        "trials": trials,
        "seed": seed,
    }
    return TailReport(
        params=params,
        r_grid=[float(r) for r in r_grid],
        empirical_survival=survival,
        bound=bounds,
        binomial_se=binomial_se,
        deviation_survival=deviation,
        median=float(np.median(z)),
        mean=fsum(z) / trials,
        moment_estimates=moments,
        constants=constants.as_dict(),
    )
