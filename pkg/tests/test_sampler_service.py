import math

import numpy as np
import pytest

from services import sampler_service, settings
from services.sampler_service import SamplePath, increment, ramp_path, refine, reverse, sample, trial_seed
from utils.errors import BoundsException, CapacityException, DomainException
from utils.parallel import ordered_map


def _within_3se(estimate, target, se):
    return abs(estimate - target) <= 3 * se


# --- sample ---

def test_level_zero_has_three_anchored_values():
    path = sample(0, 123)
    assert path.values.shape == (3,)
    assert path.values[0] == 0.0


def test_sample_is_deterministic():
    assert np.array_equal(sample(10, 42).values, sample(10, 42).values)
    assert not np.array_equal(sample(10, 42).values, sample(10, 43).values)


def test_sample_values_are_read_only():
    with pytest.raises(ValueError):
        sample(3, 1).values[1] = 0.0


def test_parallel_and_serial_generation_agree():
    seeds = list(range(16))
    serial = ordered_map(lambda s: sample(8, s).values, seeds, 1)
    parallel = ordered_map(lambda s: sample(8, s).values, seeds, 8)
    assert all(np.array_equal(a, b) for a, b in zip(serial, parallel))


def test_capacity_cap(monkeypatch):
    with pytest.raises(CapacityException):
        sample(40, 0)
    monkeypatch.setenv("FRAMEPATH_MAX_LEVEL", "8")
    settings.clear_cache()
    assert sample(8, 0).level == 8
    with pytest.raises(CapacityException):
        sample(9, 0)


def test_negative_level_and_bad_seed():
    with pytest.raises(DomainException):
        sample(-1, 0)
    with pytest.raises(DomainException):
        sample(2, -5)


def test_path_rejects_unanchored_values():
    with pytest.raises(DomainException):
        SamplePath(0, np.array([1.0, 2.0, 3.0]))
    with pytest.raises(DomainException):
        SamplePath(1, np.zeros(3))


def test_endpoint_variance_is_two():
    trials = 2000
    ends = np.array([sample(4, trial_seed(11, i)).last for i in range(trials)])
    variance = ends.var(ddof=1)
    assert _within_3se(variance, 2.0, 2.0 * math.sqrt(2.0 / (trials - 1)))


@pytest.mark.slow
def test_endpoint_variance_is_two_at_acceptance_size():
    trials = 10_000
    ends = np.array([sample(12, trial_seed(12, i)).last for i in range(trials)])
    variance = ends.var(ddof=1)
    assert _within_3se(variance, 2.0, 2.0 * math.sqrt(2.0 / (trials - 1)))


def test_increment_variance_scales_with_level():
    level = 10
    steps = np.diff(sample(level, 5).values)
    target = 2.0 ** -level
    assert _within_3se(steps.var(ddof=1), target, target * math.sqrt(2.0 / (steps.size - 1)))


def test_disjoint_increments_are_uncorrelated():
    steps = np.diff(sample(10, 9).values)
    correlation = np.corrcoef(steps[:-1], steps[1:])[0, 1]
    assert abs(correlation) <= 3 / math.sqrt(steps.size - 1)


def test_normal_stream_depends_only_on_key_and_index():
    long = sampler_service.normal_stream(3, 5, sampler_service.SAMPLE_STREAM, 64)
    short = sampler_service.normal_stream(3, 5, sampler_service.SAMPLE_STREAM, 16)
    assert np.array_equal(long[:16], short)
    other = sampler_service.normal_stream(3, 5, sampler_service.REFINE_STREAM, 16)
    assert not np.array_equal(other, short)


def test_trial_seeds_are_distinct_64_bit():
    seeds = {trial_seed(1, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert all(0 <= s < 1 << 64 for s in seeds)


# --- refine ---

def test_refine_keeps_coarse_grid_bit_exact():
    path = sample(0, 4)
    fine = refine(path, 4)
    assert fine.level == 1
    assert np.array_equal(fine.values[::2], path.values)


def test_refine_twice():
    path = sample(3, 8)
    twice = refine(refine(path, 1), 2)
    assert twice.level == 5
    assert np.array_equal(twice.values[::4], path.values)


def test_bridge_midpoint_variance():
    trials = 10_000
    residuals = np.empty(trials)
    for i in range(trials):
        seed = trial_seed(21, i)
        fine = refine(sample(0, seed), seed)
        residuals[i] = fine.values[1] - 0.5 * (fine.values[0] + fine.values[2])
    target = 2.0 ** -2
    assert _within_3se(residuals.var(ddof=1), target, target * math.sqrt(2.0 / (trials - 1)))


def test_refine_respects_capacity(monkeypatch):
    monkeypatch.setenv("FRAMEPATH_MAX_LEVEL", "3")
    settings.clear_cache()
    with pytest.raises(CapacityException):
        refine(sample(3, 0), 0)


# --- reverse ---

def test_reverse_of_zero_path_is_zero():
    zero = SamplePath(3, np.zeros(17))
    assert np.array_equal(reverse(zero).values, np.zeros(17))


def test_reverse_of_ramp_is_identity_on_grid():
    level = 6
    reversed_path = reverse(ramp_path(level))
    assert np.array_equal(reversed_path.values, np.arange(reversed_path.values.size) / (1 << level))


def test_reverse_entrywise_and_twice():
    path = sample(6, 13)
    reversed_path = reverse(path)
    size = path.size
    assert reversed_path.values[0] == 0.0
    for k in (0, 1, 17, size):
        assert reversed_path.values[k] == path.last - path.values[size - k]
    np.testing.assert_allclose(reverse(reversed_path.as_path()).values, path.values, rtol=0, atol=1e-12)


# --- increment ---

def test_increment_examples():
    path = sample(5, 2)
    assert increment(path, 7, 7) == 0.0
    assert increment(path, 0, path.size) == path.last


def test_increment_matches_subtraction():
    path = sample(8, 3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b = sorted(rng.integers(0, path.size + 1, size=2))
        assert increment(path, int(a), int(b)) == path.values[b] - path.values[a]


@pytest.mark.parametrize("a,b", [(-1, 3), (0, 1 << 6), (5, 70)])
def test_increment_out_of_range(a, b):
    with pytest.raises(BoundsException):
        increment(sample(4, 1), a, b)
