import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats as sps

from gmsfit.errors import DomainError
from gmsfit.stats import (
    EmpiricalDistribution,
    ecdf,
    histogram,
    kolmogorov_sf,
    ks_one_sample,
    ks_two_sample,
)

samples = st.lists(st.floats(0, 1, allow_nan=False), min_size=1, max_size=60)


def uniform_cdf(t):
    return np.clip(t, 0.0, 1.0)


def test_ecdf_examples():
    dist = EmpiricalDistribution.from_samples([0.9, 0.2, 0.4])
    assert ecdf(dist, 0.5) == pytest.approx(2 / 3)
    assert ecdf(dist, 0.1) == 0.0
    assert ecdf(dist, 0.9) == 1.0
    assert dist.ecdf(2.0) == 1.0
    np.testing.assert_allclose(ecdf(dist, np.array([0.2, 0.39, 0.4])), [1 / 3, 1 / 3, 2 / 3])


def test_empty_distribution_rejected():
    with pytest.raises(DomainError):
        EmpiricalDistribution.from_samples([])


@settings(max_examples=100, deadline=None)
@given(xs=samples)
def test_ecdf_properties(xs):
    dist = EmpiricalDistribution.from_samples(xs)
    assert dist.n == len(xs)
    assert np.all(np.diff(dist.sorted_samples) >= 0)
    grid = np.linspace(-0.1, 1.1, 97)
    values = ecdf(dist, grid)
    assert np.all(np.diff(values) >= 0)
    assert ecdf(dist, min(xs) - 1e-9) == 0.0
    assert ecdf(dist, max(xs)) == 1.0
    for x in xs:
        # right-continuous: the jump at x is included at x
        assert ecdf(dist, x) == sum(v <= x for v in xs) / len(xs)


def test_ks_one_sample_examples():
    single = ks_one_sample(EmpiricalDistribution.from_samples([0.5]), uniform_cdf)
    assert single.statistic == pytest.approx(0.5)
    stuck = ks_one_sample(EmpiricalDistribution.from_samples([0.9] * 10), uniform_cdf)
    assert stuck.statistic == pytest.approx(0.9)
    assert stuck.n == 10


def test_ks_one_sample_matches_scipy():
    rng = np.random.default_rng(0)
    for n in (5, 50, 3000):
        x = rng.beta(2, 3, n)
        ours = ks_one_sample(EmpiricalDistribution.from_samples(x), lambda t: sps.beta.cdf(t, 2, 3))
        ref = sps.kstest(x, sps.beta(2, 3).cdf)
        assert ours.statistic == pytest.approx(ref.statistic, abs=1e-15)


def test_ks_one_sample_accepts_scalar_only_cdf():
    import math
    dist = EmpiricalDistribution.from_samples([0.1, 0.3, 0.8])
    scalar_cdf = lambda t: math.sqrt(t)  # noqa: E731
    report = ks_one_sample(dist, scalar_cdf)
    vector = ks_one_sample(dist, np.sqrt)
    assert report.statistic == vector.statistic


def test_ks_null_calibration():
    rng = np.random.default_rng(42)
    n = 100_000
    hits = 0
    for _ in range(20):
        report = ks_one_sample(EmpiricalDistribution.from_samples(rng.random(n)), uniform_cdf)
        hits += report.statistic < 1.358 / np.sqrt(n)
    assert hits >= 16


@settings(max_examples=60, deadline=None)
@given(xs=st.lists(st.floats(0.001, 0.999), min_size=1, max_size=40),
       power=st.floats(0.2, 5))
def test_ks_one_sample_invariant_under_increasing_relabeling(xs, power):
    base = ks_one_sample(EmpiricalDistribution.from_samples(xs), uniform_cdf)
    # y = x^power, with cdf G(y) = y^(1/power)
    ys = np.asarray(xs) ** power
    relabeled = ks_one_sample(EmpiricalDistribution.from_samples(ys),
                              lambda y: np.clip(y, 0, 1) ** (1 / power))
    assert relabeled.statistic == pytest.approx(base.statistic, abs=1e-9)


def test_ks_two_sample_examples():
    a = EmpiricalDistribution.from_samples([0.3, 0.1, 0.7])
    assert ks_two_sample(a, a).statistic == 0.0
    one = ks_two_sample(EmpiricalDistribution.from_samples([0.1]),
                        EmpiricalDistribution.from_samples([0.9]))
    assert one.statistic == 1.0
    assert one.n == pytest.approx(0.5)


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(1)
    for na, nb in [(10, 13), (400, 250), (5000, 5000)]:
        x, y = rng.normal(size=na), rng.normal(0.05, 1, size=nb)
        ours = ks_two_sample(EmpiricalDistribution.from_samples(x),
                             EmpiricalDistribution.from_samples(y))
        assert ours.statistic == pytest.approx(sps.ks_2samp(x, y).statistic, abs=1e-15)


def test_ks_two_sample_null_passes():
    rng_a, rng_b = np.random.default_rng(100), np.random.default_rng(200)
    report = ks_two_sample(EmpiricalDistribution.from_samples(rng_a.random(100_000)),
                           EmpiricalDistribution.from_samples(rng_b.random(100_000)))
    assert report.passed


def test_ks_two_sample_same_sampler_different_seeds():
    from gmsfit.excursion import sample_shortcut
    from gmsfit.fitness_law import ModelParams
    params = ModelParams(0.3, 2)
    a = [r.strongest_fitness for r in sample_shortcut(params, 100_000, seed=1)]
    b = [r.strongest_fitness for r in sample_shortcut(params, 100_000, seed=2)]
    assert ks_two_sample(EmpiricalDistribution.from_samples(a),
                         EmpiricalDistribution.from_samples(b), alpha=0.001).passed


@pytest.mark.parametrize("x", [0.05, 0.3, 0.6, 0.99, 1.0, 1.2, 1.36, 2.0, 3.5])
def test_kolmogorov_sf_matches_scipy(x):
    assert kolmogorov_sf(x) == pytest.approx(special.kolmogorov(x), abs=1e-14)


def test_kolmogorov_sf_edges():
    assert kolmogorov_sf(0.0) == 1.0
    assert 0.0 <= kolmogorov_sf(10.0) < 1e-80
    assert kolmogorov_sf(1.358) == pytest.approx(0.05, abs=1e-3)


def test_histogram_examples():
    h = histogram(EmpiricalDistribution.from_samples([0.1, 0.5, 0.9]), 2, 0, 1)
    assert h.counts.tolist() == [1, 2]
    assert h.out_of_range == 0
    h = histogram(EmpiricalDistribution.from_samples([-0.5, 0.2, 1.0, 1.5]), 4, 0, 1)
    assert h.counts.tolist() == [1, 0, 0, 1]
    assert h.out_of_range == 2
    single = histogram(EmpiricalDistribution.from_samples([0.0, 0.3, 1.0]), 1, 0, 1)
    assert single.counts.tolist() == [3]
    rows = list(single.rows())
    assert rows == [(0.0, 1.0, 3, 1.0)]


def test_histogram_left_closed_edges():
    h = histogram(EmpiricalDistribution.from_samples([0.25, 0.5, 0.75]), 4, 0, 1)
    assert h.counts.tolist() == [0, 1, 1, 1]


def test_histogram_domain():
    dist = EmpiricalDistribution.from_samples([0.5])
    with pytest.raises(DomainError):
        histogram(dist, 0, 0, 1)
    with pytest.raises(DomainError):
        histogram(dist, 3, 1, 1)


@settings(max_examples=100, deadline=None)
@given(xs=st.lists(st.floats(-1, 2, allow_nan=False), min_size=1, max_size=80),
       bins=st.integers(1, 30))
def test_histogram_counts_sum_to_in_range(xs, bins):
    h = histogram(EmpiricalDistribution.from_samples(xs), bins, 0.0, 1.0)
    in_range = sum(0.0 <= x <= 1.0 for x in xs)
    assert h.total == in_range
    assert h.total + h.out_of_range == len(xs)
    if in_range:
        assert h.frequencies.sum() == pytest.approx(1.0)
