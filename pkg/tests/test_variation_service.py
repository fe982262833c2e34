import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from services import variation_service
from services.frame_service import frame_difference, frame_eval
from services.sampler_service import SamplePath, sample, trial_seed
from services.variation_service import (
    bound_constant,
    c_alpha_p,
    check_admissible,
    d_alpha_beta_p_pprime,
    d_alpha_p,
    d_constants,
    d_p_lip,
    dyadic_bound,
    dyadic_sum,
    hoelder_seq_bound_check,
    lsc_probe,
    pvar_bruteforce,
    pvar_exact,
    pvar_norm,
    ramp_dyadic_sum,
    weighted_geometric_series,
    zeta_series,
)
from utils.dyadic import DyadicTime
from utils.errors import CapacityException, DomainException, ShapeException

sequences = st.lists(st.floats(min_value=-100, max_value=100, allow_nan=False), min_size=2, max_size=40)


# --- pvar_exact / pvar_bruteforce ---

def test_pvar_examples():
    monotone = pvar_exact([0, 0.3, 0.7, 1.0], 2)
    assert monotone.value == 1.0
    assert monotone.dissection == (0, 3)

    assert pvar_exact([0, 1, 0, 1], 1).value == 3.0
    assert pvar_exact([0, 1, 0], 2).value == pytest.approx(math.sqrt(2), rel=1e-15)


def test_bruteforce_examples():
    assert pvar_bruteforce([0, 1], 3.5).value == 1.0
    assert pvar_bruteforce([2.0] * 7, 2).value == 0.0
    assert pvar_bruteforce([0, 1, 0], 2).value == pytest.approx(math.sqrt(2), rel=1e-15)


def test_pvar_errors():
    with pytest.raises(ShapeException):
        pvar_exact([1.0], 2)
    with pytest.raises(DomainException):
        pvar_exact([0, 1], 0.5)
    with pytest.raises(CapacityException):
        pvar_bruteforce(np.zeros(21), 2)


def test_pvar_exact_capacity(monkeypatch):
    monkeypatch.setenv("FRAMEPATH_MAX_PVAR_POINTS", "16")
    assert pvar_exact(np.arange(16.0), 2).value == 15.0
    with pytest.raises(CapacityException):
        pvar_exact(np.arange(17.0), 2)


def test_exact_matches_bruteforce_on_random_sequences():
    rng = np.random.default_rng(2024)
    for case in range(1000):
        size = int(rng.integers(2, 13))
        if case % 4 == 0:
            seq = rng.integers(-2, 3, size=size).astype(float)
        else:
            seq = rng.standard_normal(size)
        p = float(rng.choice([1.0, 1.5, 2.0, 3.0, 4.0]))
        exact, brute = pvar_exact(seq, p), pvar_bruteforce(seq, p)
        assert exact.value == pytest.approx(brute.value, rel=1e-12, abs=1e-15)


@given(sequences, st.sampled_from([1.0, 2.0, 2.5, 4.0]))
@settings(max_examples=100, deadline=None)
def test_dissection_certifies_value(seq, p):
    result = pvar_exact(seq, p)
    assert result.dissection[0] == 0
    assert result.dissection[-1] == len(seq) - 1
    assert list(result.dissection) == sorted(set(result.dissection))
    assert result.certificate(seq) == pytest.approx(result.value ** p, rel=1e-12, abs=1e-12)


@given(sequences)
@settings(max_examples=100, deadline=None)
def test_pvar_nonincreasing_in_p(seq):
    values = [pvar_exact(seq, p).value for p in (1.0, 2.0, 3.0, 6.0)]
    for lower, higher in zip(values, values[1:]):
        assert higher <= lower * (1 + 1e-12) + 1e-12


@given(sequences, st.floats(min_value=-8, max_value=8).filter(lambda x: abs(x) > 1e-3))
@settings(max_examples=100, deadline=None)
def test_pvar_is_absolutely_homogeneous(seq, scale):
    base = pvar_exact(seq, 3.0).value
    scaled = pvar_exact(np.asarray(seq) * scale, 3.0).value
    assert scaled == pytest.approx(abs(scale) * base, rel=1e-9, abs=1e-9)


def test_pvar_norm():
    assert pvar_norm(np.zeros(9), 2) == 0.0
    assert pvar_norm([0, 1, 0], 2) == pytest.approx(1 + math.sqrt(2), rel=1e-15)


# --- Series constants ---

@pytest.mark.parametrize(
    "alpha,p,expected",
    [(1, 2, math.sqrt(math.pi ** 2 / 6)), (2, 2, math.sqrt(math.pi ** 4 / 90))],
)
def test_c_alpha_p_matches_zeta(alpha, p, expected):
    assert c_alpha_p(alpha, p) == pytest.approx(expected, rel=1e-9)


def test_c_alpha_p_dominant_term_limit():
    assert abs(c_alpha_p(50, 2) - 1.0) <= 1e-12


@pytest.mark.parametrize("alpha,p", [(0.5, 2), (0.7, 4), (1, 1)])
def test_c_alpha_p_divergent(alpha, p):
    with pytest.raises(DomainException):
        c_alpha_p(alpha, p)


def test_zeta_series_bracket():
    total, lower, upper = zeta_series(2.0, 1e-8)
    assert total == pytest.approx(math.pi ** 2 / 6, rel=1e-12)
    assert 0 < lower <= upper
    with pytest.raises(DomainException):
        zeta_series(1.0, 1e-8)


def test_hoelder_check_examples():
    lhs, rhs = hoelder_seq_bound_check([1.0], 2, 3)
    assert lhs == 1.0
    assert rhs == pytest.approx(c_alpha_p(2, 3) ** 3) and rhs >= 1.0
    assert hoelder_seq_bound_check([0.0, 0.0, 0.0], 2, 3) == (0.0, 0.0)


@pytest.mark.parametrize("alpha,p,cases", [(2, 3, 1000), (0.8, 4, 50)])
def test_hoelder_inequality_on_random_sequences(alpha, p, cases):
    rng = np.random.default_rng(5)
    for _ in range(cases):
        a = rng.standard_normal(int(rng.integers(1, 60))) * 10.0 ** rng.uniform(-3, 3)
        lhs, rhs = hoelder_seq_bound_check(a, alpha, p)
        assert lhs <= rhs * (1 + 1e-12)


def test_weighted_geometric_series_against_closed_form():
    # sum (n+1)^2 2^-n = 12
    value, terms, bound = weighted_geometric_series(2.0, -1.0, 0, 1e-14)
    assert value == pytest.approx(12.0, rel=1e-12)
    assert terms > 1
    assert bound < 1e-14


def test_weighted_geometric_series_with_start():
    full, _, _ = weighted_geometric_series(3.2, -1.0, 0, 1e-14)
    tail, _, _ = weighted_geometric_series(3.2, -1.0, 1, 1e-14)
    assert full - tail == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(DomainException):
        weighted_geometric_series(1.0, 0.0, 0, 1e-10)


def test_d_p_lip_closed_form():
    assert d_p_lip(4) == pytest.approx(2 ** 0.75 * 5 ** 0.25, rel=1e-15)
    assert d_p_lip(4) == pytest.approx(2.514867, abs=1e-6)


def test_d_p_lip_decreases_in_p():
    values = [d_p_lip(p) for p in np.linspace(2.1, 20.0, 60)]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_d_constants_are_finite_and_positive():
    constants = d_constants(0.8, 0.8, 4, 6)
    for name, value in constants.as_dict().items():
        assert math.isfinite(value) and value > 0, name
    assert constants.d2 == pytest.approx(5.029734, abs=1e-6)
    assert constants.d1 == pytest.approx(constants.d_alpha_p ** 0.25 / constants.d_p_lip)


def test_stated_variant_drops_the_first_term():
    constants = d_constants(0.8, 0.8, 4, 4)
    assert constants.d_alpha_p_stated < constants.d_alpha_p


@pytest.mark.parametrize(
    "args,parameter",
    [((0.8, 0.8, 2, 6), "p"), ((0.8, 0.8, 4, 2), "pprime"), ((0.7, 0.8, 4, 4), "alpha"), ((0.8, 0.2, 4, 6), "beta")],
)
def test_inadmissible_parameters_are_named(args, parameter):
    with pytest.raises(DomainException) as excinfo:
        check_admissible(*args)
    assert excinfo.value.parameter == parameter
    with pytest.raises(DomainException):
        d_constants(*args)


def test_moment_constant_cases():
    d = d_alpha_p(0.8, 4)
    assert d_alpha_beta_p_pprime(0.8, 0.8, 4, 4) == d
    assert d_alpha_beta_p_pprime(0.8, 0.8, 4, 3) == pytest.approx(d ** 0.75, rel=1e-15)
    above = d_alpha_beta_p_pprime(0.8, 0.8, 4, 6)
    assert math.isfinite(above) and above > 0


def test_bound_constant():
    assert bound_constant(4) == pytest.approx(4 + 2 ** 0.75)


# --- Dyadic domination functional ---

def test_dyadic_bound_of_zero_path():
    zero = SamplePath(5, np.zeros(65))
    assert dyadic_sum(zero, DyadicTime(1, 2), 4, 0.8) == 0.0
    assert dyadic_bound(zero, DyadicTime(1, 2), 4, 0.8) == 0.0


@pytest.mark.parametrize("h", [DyadicTime(1, 0), DyadicTime(1, 2), DyadicTime(3, 5)])
def test_dyadic_sum_of_ramp_matches_closed_form(ramp10, h):
    assert dyadic_sum(ramp10, h, 4, 0.8) == pytest.approx(ramp_dyadic_sum(10, h, 4, 0.8), rel=1e-13)


def test_dyadic_sum_errors():
    path = sample(4, 0)
    with pytest.raises(DomainException):
        dyadic_sum(path, DyadicTime(0, 0), 4, 0.8)
    with pytest.raises(DomainException):
        dyadic_sum(path, DyadicTime(1, 6), 4, 0.8)


def _bound_ratio(path, h1, h2, p, alpha):
    diff = frame_difference(frame_eval(path, h2), frame_eval(path, h1))
    norm = pvar_norm(diff, p)
    return dyadic_bound(path, h2 - h1, p, alpha) * bound_constant(p) / norm


@pytest.mark.parametrize("h1,h2", [(DyadicTime(0, 0), DyadicTime(1, 2)), (DyadicTime(1, 2), DyadicTime(1, 1))])
def test_dyadic_bound_dominates_frame_norm(h1, h2):
    for i in range(20):
        path = sample(10, trial_seed(3, i))
        assert _bound_ratio(path, h1, h2, 4, 0.8) >= 1.0


@pytest.mark.slow
@pytest.mark.parametrize("h1,h2", [(DyadicTime(0, 0), DyadicTime(1, 2)), (DyadicTime(1, 2), DyadicTime(1, 1))])
def test_dyadic_bound_dominates_frame_norm_at_acceptance_size(h1, h2):
    for i in range(100):
        path = sample(12, trial_seed(4, i))
        assert _bound_ratio(path, h1, h2, 4, 0.8) >= 1.0


# --- Lower semicontinuity check ---

def test_lsc_constant_sequence():
    report = lsc_probe([1.5] * 6, 3, 4)
    assert report.variation == 0.0
    dense_steps = 5 * variation_service.LSC_SUBSTEPS
    for value, amplitude in zip(report.perturbed, report.amplitudes):
        assert value <= dense_steps * (2 * amplitude) ** 3 + 1e-15
    assert report.holds


def test_lsc_zigzag():
    report = lsc_probe([0, 1, 0, 1], 2, 8)
    assert report.holds
    assert len(report.perturbed) == len(report.slacks) == 8
    assert report.amplitudes == [2.0 ** -n for n in range(1, 9)]
    assert report.slacks[-1] < report.slacks[0]
    assert report.min_perturbed == min(report.perturbed)


def test_lsc_random_sequences():
    rng = np.random.default_rng(8)
    for _ in range(100):
        seq = np.cumsum(rng.standard_normal(int(rng.integers(2, 20))))
        assert lsc_probe(seq, 2.5, 3).holds


def test_lsc_detects_a_collapsed_perturbation(monkeypatch):
    monkeypatch.setattr(variation_service, "_perturbed_polygon", lambda x, n: np.zeros(x.size))
    report = lsc_probe([0, 1, 0, 1], 2, 3)
    assert report.variation == 3.0
    assert report.perturbed == [0.0, 0.0, 0.0]
    assert not report.holds


def test_lsc_slack_vanishes_with_amplitude():
    slacks = [variation_service._lsc_slack(3.0, 2.0 ** -n, 4, 2) for n in range(1, 30)]
    assert all(b < a for a, b in zip(slacks, slacks[1:]))
    assert slacks[-1] < 1e-7
    assert variation_service._lsc_slack(0.0, 0.25, 4, 2) == pytest.approx(0.25 * 3, rel=1e-12)


def test_lsc_perturbation_moves_every_point_by_at_most_the_amplitude():
    x = np.array([0.0, 2.0, -1.0])
    for n in (1, 4, 9):
        dense = variation_service._perturbed_polygon(x, n)
        base = np.interp(np.arange(dense.size) / variation_service.LSC_SUBSTEPS, np.arange(x.size), x)
        assert np.max(np.abs(dense - base)) <= 2.0 ** -n
        vertices = dense[:: variation_service.LSC_SUBSTEPS]
        assert not np.array_equal(vertices, x)
        assert np.max(np.abs(vertices - x)) <= 2.0 ** -n


def test_lsc_needs_refinements():
    with pytest.raises(DomainException):
        lsc_probe([0, 1], 2, 0)
