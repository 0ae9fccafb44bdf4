import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relayplan.validation import (EmptySampleError, dkw_epsilon, empirical_cdf, ks_critical, ks_distance,
                                  mean_sinr_vs_distance, outage_percentile)

samples = st.lists(st.floats(-50, 50, allow_nan=False), min_size=1, max_size=40)


def test_single_value_step():
    F = empirical_cdf([3.0])
    assert F(2.999) == 0.0 and F(3.0) == 1.0 and F(10) == 1.0


def test_duplicated_sample_same_cdf():
    a = np.array([1.0, 4.0, 2.0, 2.0])
    assert ks_distance(empirical_cdf(a), empirical_cdf(np.concatenate([a, a]))) == 0.0


def test_empty_rejected():
    with pytest.raises(EmptySampleError):
        empirical_cdf([])
    with pytest.raises(ValueError):
        empirical_cdf([1.0, np.inf])


def test_uniform_within_dkw_band():
    rng = np.random.default_rng(0)
    n = 10_000
    F = empirical_cdf(rng.uniform(size=n))
    x = np.linspace(0, 1, 2001)
    assert np.max(np.abs(F(x) - x)) <= dkw_epsilon(n, 0.01)


def test_ks_examples():
    a = empirical_cdf([1.0, 2.0, 3.0])
    assert ks_distance(a, a) == 0.0
    assert ks_distance(a, empirical_cdf([10.0, 11.0])) == 1.0


def test_ks_two_seeds_same_distribution():
    rng = np.random.default_rng(1)
    a = empirical_cdf(rng.normal(size=10_000))
    b = empirical_cdf(rng.normal(size=10_000))
    d = ks_distance(a, b)
    assert d < ks_critical(10_000, 10_000, 0.01) < 0.03


@given(a=samples, b=samples, c=samples)
@settings(max_examples=150, deadline=None)
def test_ks_is_a_metric(a, b, c):
    A, B, C = map(empirical_cdf, (a, b, c))
    ab = ks_distance(A, B)
    assert ab == ks_distance(B, A)
    assert 0 <= ab <= 1
    assert ks_distance(A, A) == 0
    assert ks_distance(A, C) <= ab + ks_distance(B, C) + 1e-12


@given(a=samples, q=st.floats(1e-6, 1 - 1e-6))
@settings(max_examples=150, deadline=None)
def test_quantile_in_sample_range(a, q):
    v = outage_percentile(empirical_cdf(a), q)
    assert min(a) <= v <= max(a)
    # generalized inverse: F(v) >= q and F just below v < q
    F = empirical_cdf(a)
    assert F(v) >= q - 1e-12
    assert F(np.nextafter(v, -np.inf)) < q + 1e-12


def test_quantile_examples():
    F = empirical_cdf([5.0, 1.0, 3.0])
    assert outage_percentile(F, 0.5) == 3.0
    assert outage_percentile(F, 1e-9) == 1.0
    with pytest.raises(ValueError):
        F.quantile(0.0)


def test_steps():
    v, f = empirical_cdf([2.0, 1.0, 2.0, 4.0]).steps()
    assert list(v) == [1.0, 2.0, 4.0] and list(f) == [0.25, 0.75, 1.0]


def test_binned_mean_single_bin_is_global_mean():
    rng = np.random.default_rng(2)
    d, s = rng.uniform(0, 1, 300), rng.normal(size=300)
    b = mean_sinr_vs_distance(d, s, [0.0, 1.0])
    assert b.mean[0] == pytest.approx(s.mean()) and b.count[0] == 300


def test_binned_mean_monotone_field():
    d = np.linspace(0, 0.6, 1000)
    b = mean_sinr_vs_distance(d, 20 - 30 * d, np.arange(0, 0.61, 0.1))
    assert np.all(np.diff(b.mean) < 0)
    assert b.count.sum() == 1000  # last edge is closed


def test_binned_mean_empty_bins_flagged():
    b = mean_sinr_vs_distance([0.05, 0.06], [1.0, 2.0], [0.0, 0.1, 0.2])
    assert b.empty.tolist() == [False, True] and np.isnan(b.mean[1])
    assert np.allclose(b.centers, [0.05, 0.15])
    with pytest.raises(ValueError):
        mean_sinr_vs_distance([0.1], [1.0], [0.2, 0.1])
