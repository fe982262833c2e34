"""p-variation of discrete paths, the dyadic domination functional and the closed-form constants."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import special

from . import settings
from .frame_service import n_of_h
from .sampler_service import PERTURB_STREAM, SamplePath, uniform_stream
from utils.dyadic import as_dyadic
from utils.errors import CapacityException, DomainException, ShapeException
from utils.summation import Accumulator, fsum

BRUTEFORCE_MAX_LENGTH = 20
SERIES_MAX_TERMS = 1 << 20
ZETA_HEAD_MAX_TERMS = 1 << 16


@dataclass(frozen=True)
class PVarResult:
    p: float
    value: float
    dissection: Tuple[int, ...]

    def certificate(self, seq) -> float:
        """Sum of |increments|^p over the stored dissection; equals value**p."""
        x = np.asarray(seq, dtype=np.float64)[list(self.dissection)]
        return fsum(np.abs(np.diff(x)) ** self.p)


def _as_sequence(seq, p: float) -> np.ndarray:
    x = np.asarray(seq, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ShapeException(f"p-variation needs a 1-d sequence of length >= 2, got shape {x.shape}.")
    if not p >= 1:
        raise DomainException("p", p, "p >= 1")
    return x


def _turning_points(x: np.ndarray) -> np.ndarray:
    """Endpoints plus every interior index where the path does not move strictly monotonically."""
    steps = np.diff(x)
    interior = np.flatnonzero(steps[:-1] * steps[1:] <= 0) + 1
    return np.concatenate(([0], interior, [x.size - 1]))


def pvar_exact(seq, p: float) -> PVarResult:
    """
    Exact p-variation by dynamic programming over the turning points of `seq`.

    best[i] = max_{j<i} best[j] + |y_i - y_j|^p, ties broken towards the smallest j.
    """
    x = _as_sequence(seq, p)
    cap = settings.max_pvar_points()
    if x.size > cap:
        raise CapacityException("p-variation input length", x.size, cap)

    keep = _turning_points(x)
    y = x[keep]
    best = np.zeros(y.size)
    link = np.zeros(y.size, dtype=np.int64)
    for i in range(1, y.size):
        candidates = best[:i] + np.abs(y[i] - y[:i]) ** p
        j = int(np.argmax(candidates))
        best[i] = candidates[j]
        link[i] = j

    chain = [y.size - 1]
    while chain[-1] != 0:
        chain.append(int(link[chain[-1]]))
    dissection = tuple(int(keep[i]) for i in reversed(chain))
    return PVarResult(p, float(best[-1]) ** (1.0 / p), dissection)


def pvar_bruteforce(seq, p: float) -> PVarResult:
    """Exhaustive search over every index subset containing both endpoints."""
    x = np.asarray(seq, dtype=np.float64)
    if x.ndim == 1 and x.size > BRUTEFORCE_MAX_LENGTH:
        raise CapacityException("Brute-force length", x.size, BRUTEFORCE_MAX_LENGTH)
    x = _as_sequence(x, p)

    size = x.size
    free = size - 2
    positions = np.arange(size)
    best_value, best_mask = -1.0, 0
    chunk = 1 << 14
    for start in range(0, 1 << free, chunk):
        masks = np.arange(start, min(start + chunk, 1 << free), dtype=np.int64)
        chosen = np.ones((masks.size, size), dtype=bool)
        if free:
            chosen[:, 1:-1] = (masks[:, None] >> np.arange(free)) & 1 == 1
        marked = np.where(chosen, positions, 0)
        previous = np.maximum.accumulate(marked, axis=1)[:, :-1]
        steps = np.abs(x[1:] - x[previous]) ** p
        totals = np.sum(np.where(chosen[:, 1:], steps, 0.0), axis=1)
        row = int(np.argmax(totals))
        if totals[row] > best_value:
            best_value, best_mask = float(totals[row]), int(masks[row])

    dissection = (0,) + tuple(i + 1 for i in range(free) if best_mask >> i & 1) + (size - 1,)
    return PVarResult(p, best_value ** (1.0 / p), dissection)


def pvar_norm(fe_diff, p: float) -> float:
    """Sup norm plus p-variation."""
    x = _as_sequence(fe_diff, p)
    return float(np.max(np.abs(x))) + pvar_exact(x, p).value


# --- Series constants ---

def _check_tol(tol: Optional[float]) -> float:
    tol = settings.series_tol() if tol is None else tol
    if not tol > 0:
        raise DomainException("tol", tol, "tol > 0")
    return tol


def zeta_series(q: float, tol: float) -> Tuple[float, float, float]:
    """
    Sum of n^-q over n >= 1.

    Returns the value together with the integral bracket of the part that
    was not summed term by term.
    """
    if not q > 1:
        raise DomainException("q", q, "q > 1")
    head_terms = min(int(math.ceil(tol ** (-1.0 / q))), ZETA_HEAD_MAX_TERMS)
    head = fsum(np.arange(head_terms, 0, -1, dtype=np.float64) ** -q)
    tail = float(special.zeta(q, head_terms + 1))
    lower = (head_terms + 1) ** (1 - q) / (q - 1)
    upper = head_terms ** (1 - q) / (q - 1)
    return head + tail, lower, upper


def c_alpha_p(alpha: float, p: float, tol: Optional[float] = None) -> float:
    """(sum_{n>=1} n^{-alpha p/(p-1)})^{(p-1)/p}."""
    if not p > 1:
        raise DomainException("p", p, "p > 1")
    if not alpha > 1 - 1 / p:
        raise DomainException("alpha", alpha, f"alpha > 1 - 1/p = {1 - 1 / p}")
    tol = _check_tol(tol)
    q = alpha * p / (p - 1)
    total, _, _ = zeta_series(q, tol)
    return total ** ((p - 1) / p)


def hoelder_seq_bound_check(a, alpha: float, p: float) -> Tuple[float, float]:
    """(sum |a_i|)^p and c(alpha,p)^p sum i^{alpha p} |a_i|^p, indexed from 1."""
    c = c_alpha_p(alpha, p)
    a = np.abs(np.asarray(a, dtype=np.float64))
    if a.size == 0:
        return 0.0, 0.0
    weights = np.arange(1, a.size + 1, dtype=np.float64) ** (alpha * p)
    lhs = fsum(a) ** p
    rhs = c ** p * fsum(weights * a ** p)
    return lhs, rhs


def weighted_geometric_series(exponent: float, log2_ratio: float, start: int, tol: float) -> Tuple[float, int, float]:
    """
    sum_{n >= start} (n+1)^exponent 2^(n log2_ratio) for log2_ratio < 0.

    Terms are added until the geometric tail bound t_N rho/(1-rho) drops
    below `tol`; returns (value, terms used, tail bound).
    """
    if not log2_ratio < 0:
        raise DomainException("ratio", 2.0 ** log2_ratio, "ratio < 1")
    log_ratio = log2_ratio * math.log(2.0)
    acc = Accumulator()
    n = start
    while n - start < SERIES_MAX_TERMS:
        term = math.exp(exponent * math.log(n + 1) + n * log_ratio)
        acc.add(term)
        rho = max(((n + 2) / (n + 1)) ** exponent * math.exp(log_ratio), math.exp(log_ratio))
        if rho < 1:
            bound = term * rho / (1 - rho)
            if bound < tol:
                return acc.total, n - start + 1, bound
        n += 1
    raise CapacityException("Series terms", n - start, SERIES_MAX_TERMS)


def d_p_lip(p: float) -> float:
    """2^{1/p+1/2} (1 + 2^{p/2})^{1/p}."""
    return 2.0 ** (1 / p + 0.5) * (1 + 2.0 ** (p / 2)) ** (1 / p)


def _gaussian_factor(pp: float) -> float:
    return math.sqrt(2.0 ** pp / math.pi) * float(special.gamma((pp + 1) / 2))


def d_alpha_p(alpha: float, p: float, tol: Optional[float] = None, start: int = 0) -> float:
    """
    2^{p/2} (4 + 2^{(p-1)/p})^p c(alpha,p)^p sqrt(2^p/pi) Gamma((p+1)/2)
    times sum_{n >= start} (n+1)^{alpha p} 2^{n(1-p/2)}.
    """
    tol = _check_tol(tol)
    c = c_alpha_p(alpha, p, tol)
    series, _, _ = weighted_geometric_series(alpha * p, 1 - p / 2, start, tol)
    return 2.0 ** (p / 2) * (4 + 2.0 ** ((p - 1) / p)) ** p * c ** p * _gaussian_factor(p) * series


def d_alpha_beta_p_pprime(alpha: float, beta: float, p: float, pprime: float, tol: Optional[float] = None) -> float:
    """Constant of the moment bound E ||T_h2 - T_h1||_p^{p'} <= d (h2-h1)^{(1/2-1/p)p'}."""
    tol = _check_tol(tol)
    if pprime == p:
        return d_alpha_p(alpha, p, tol)
    if pprime < p:
        return d_alpha_p(alpha, p, tol) ** (pprime / p)

    c = c_alpha_p(alpha, p, tol)
    c_beta = c_alpha_p(beta, pprime / p, tol)
    series, _, _ = weighted_geometric_series(
        alpha * pprime + beta * pprime / p, (1 / p - 0.5) * pprime, 0, tol
    )
    return (
        2.0 ** (pprime / 2)
        * (2 * (2 + 2.0 ** (-1 / p)) * c) ** pprime
        * c_beta ** (pprime / p)
        * _gaussian_factor(pprime)
        * series
    )


@dataclass(frozen=True)
class Constants:
    alpha: float
    beta: float
    p: float
    pprime: float
    c_alpha_p: float
    d_alpha_p: float
    d_alpha_p_stated: float
    d_alpha_beta_p_pprime: float
    d_p_lip: float
    d1: float
    d2: float

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def check_admissible(alpha: float, beta: float, p: float, pprime: float) -> None:
    if not p > 2:
        raise DomainException("p", p, "p > 2")
    if not pprime > 2:
        raise DomainException("pprime", pprime, "p' > 2")
    if not alpha > 1 - 1 / p:
        raise DomainException("alpha", alpha, f"alpha > 1 - 1/p = {1 - 1 / p}")
    if pprime > p and not beta > 1 - p / pprime:
        raise DomainException("beta", beta, f"beta > 1 - p/p' = {1 - p / pprime}")


def d_constants(alpha: float, beta: float, p: float, pprime: float, tol: Optional[float] = None) -> Constants:
    check_admissible(alpha, beta, p, pprime)
    tol = _check_tol(tol)
    d = d_alpha_p(alpha, p, tol)
    lip = d_p_lip(p)
    constants = Constants(
        alpha=alpha,
        beta=beta,
        p=p,
        pprime=pprime,
        c_alpha_p=c_alpha_p(alpha, p, tol),
        d_alpha_p=d,
        d_alpha_p_stated=d_alpha_p(alpha, p, tol, start=1),
        d_alpha_beta_p_pprime=d_alpha_beta_p_pprime(alpha, beta, p, pprime, tol),
        d_p_lip=lip,
        d1=d ** (1 / p) / lip,
        d2=2 * lip,
    )
    logging.debug(f"Constants for alpha={alpha}, beta={beta}, p={p}, p'={pprime}: {constants}")
    return constants


# --- Dyadic domination functional ---

def dyadic_sum(path: SamplePath, h, p: float, alpha: float) -> float:
    """sum_{n=0}^{L-n(h)} (n+1)^{alpha p} sum_k |level-(n+n(h)) increments of f on [-1,1]|^p."""
    h = as_dyadic(h)
    if h.numerator == 0:
        raise DomainException("h", h, "h > 0")
    nh = n_of_h(h)
    if nh > path.level:
        raise DomainException("h", h, f"n(h) <= path level {path.level}")

    acc = Accumulator()
    for n in range(path.level - nh + 1):
        increments = np.diff(path.coarsen(n + nh))
        acc.add((n + 1) ** (alpha * p) * fsum(np.abs(increments) ** p))
    return acc.total


def dyadic_bound(path: SamplePath, h, p: float, alpha: float) -> float:
    """c(alpha,p) (dyadic_sum)^{1/p}, truncated at the path grid."""
    c = c_alpha_p(alpha, p)
    return c * dyadic_sum(path, h, p, alpha) ** (1 / p)


def ramp_dyadic_sum(level: int, h, p: float, alpha: float) -> float:
    """dyadic_sum of the ramp f(x) = x + 1, whose 2^(j+1) level-j increments all equal 2^-j."""
    nh = n_of_h(as_dyadic(h))
    return fsum([(n + 1) ** (alpha * p) * 2.0 ** ((n + nh) * (1 - p) + 1) for n in range(level - nh + 1)])


def bound_constant(p: float) -> float:
    """The factor 4 + 2^{(p-1)/p} relating the dyadic bound to the p-variation norm."""
    return 4 + 2.0 ** ((p - 1) / p)


# --- Lower semicontinuity check ---

LSC_SUBSTEPS = 4


@dataclass(frozen=True)
class LscReport:
    p: float
    variation: float
    perturbed: List[float]
    amplitudes: List[float]
    slacks: List[float]
    min_perturbed: float
    slack: float
    holds: bool


def _perturbed_polygon(x: np.ndarray, n: int) -> np.ndarray:
    """Polygonal interpolant on LSC_SUBSTEPS sub-steps per segment, every point moved by at most 2^-n."""
    grid = np.arange((x.size - 1) * LSC_SUBSTEPS + 1) / LSC_SUBSTEPS
    dense = np.interp(grid, np.arange(x.size), x)
    noise = 2.0 * uniform_stream(0, n, PERTURB_STREAM, dense.size) - 1.0
    return dense + 2.0 ** -n * noise


def _lsc_slack(perturbed: float, amplitude: float, points: int, p: float) -> float:
    # Minkowski for V_p^{1/p}: the noise at the original vertices has V_p <= (points-1) (2 amplitude)^p.
    noise_norm = 2 * amplitude * (points - 1) ** (1 / p)
    return (perturbed ** (1 / p) + noise_norm) ** p - perturbed


def lsc_probe(seq, p: float, refinements: int) -> LscReport:
    """Checks V_p(f) <= V_p(f_n) + slack_n for every perturbation f_n, |f_n - f| <= 2^-n, n = 1..refinements."""
    x = _as_sequence(seq, p)
    if refinements < 1:
        raise DomainException("refinements", refinements, "refinements >= 1")

    variation = pvar_exact(x, p).value
    perturbed, amplitudes, slacks = [], [], []
    for n in range(1, refinements + 1):
        value = pvar_exact(_perturbed_polygon(x, n), p).value
        perturbed.append(value)
        amplitudes.append(2.0 ** -n)
        slacks.append(_lsc_slack(value, 2.0 ** -n, x.size, p))

    tolerance = 1e-12 * max(variation, 1.0)
    holds = all(variation <= value + slack + tolerance for value, slack in zip(perturbed, slacks))
    best = int(np.argmin(perturbed))
    if not holds:
        logging.warning(f"Semicontinuity check failed: V_p={variation}, perturbed={perturbed}, slacks={slacks}")
    return LscReport(p, variation, perturbed, amplitudes, slacks, perturbed[best], slacks[best], holds)
