import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab.env import (WeightDistribution, WeightField, distribution_constants, replica_seed,
                        sample_field)
from lpplab.errors import CapacityError, MissingMomentsError, ParameterError

N = 10**6


def test_exponential_field_is_reproducible():
    d = WeightDistribution.exponential(1.0)
    a = sample_field(d, 2, 2, 7)
    b = sample_field(d, 2, 2, 7)
    assert a.values.shape == (2, 2)
    assert np.all(a.values > 0)
    assert a.values.tobytes() == b.values.tobytes()


def test_distinct_seeds_give_distinct_fields():
    d = WeightDistribution.exponential(1.0)
    assert not np.array_equal(sample_field(d, 8, 8, 1).values, sample_field(d, 8, 8, 2).values)


def test_geometric_moments():
    v = sample_field(WeightDistribution.geometric(2.0), N, 1, 1).values.ravel()
    assert 1.99 <= v.mean() <= 2.01
    assert 1.95 <= v.var() <= 2.05
    assert v.min() >= 1
    assert np.all(v == np.round(v))


def test_bernoulli_max_atom():
    v = sample_field(WeightDistribution.bernoulli_max(0.95), N, 1, 3).values.ravel()
    frac = np.mean(v == 1.0)
    # binomial sd is sqrt(0.95*0.05/1e6) ~ 2.2e-4, the band is ~2.3 sd
    assert 0.9495 <= frac <= 0.9505
    assert v.max() <= 1.0
    assert v[v < 1].max() <= 0.5


@pytest.mark.parametrize("dist", [WeightDistribution.exponential(1.0), WeightDistribution.exponential(2.5),
                                  WeightDistribution.geometric(2.0), WeightDistribution.geometric(4.0),
                                  WeightDistribution.bernoulli_max(0.7)])
def test_moment_bands(dist):
    v = sample_field(dist, N, 1, 11).values.ravel()
    m, s = distribution_constants(dist)
    assert abs(v.mean() - m) <= 4 * s / math.sqrt(N)
    # standard error of the sample variance uses the fourth central moment
    mu4 = np.mean((v - v.mean()) ** 4)
    se = math.sqrt((mu4 - s**4) / N)
    assert abs(v.var() - s * s) <= 4 * se


def test_constants():
    assert distribution_constants(WeightDistribution.exponential(1.0)) == (1.0, 1.0)
    m, s = distribution_constants(WeightDistribution.geometric(2.0))
    assert m == 2.0 and s == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_geometric_degenerate_limit():
    for eps in (1e-2, 1e-4, 1e-6):
        _, s = distribution_constants(WeightDistribution.geometric(1 + eps))
        assert s < 2 * math.sqrt(eps)
    with pytest.raises(ParameterError):
        WeightDistribution.geometric(1.0)


def test_parameter_errors():
    with pytest.raises(ParameterError):
        WeightDistribution.exponential(0.0)
    with pytest.raises(ParameterError):
        WeightDistribution.bernoulli_max(1.0)
    with pytest.raises(ParameterError):
        WeightDistribution.bernoulli_max(0.5, (0.0, 1.0))
    with pytest.raises(ParameterError):
        sample_field(WeightDistribution.exponential(), 0, 3, 1)


def test_capacity_error():
    with pytest.raises(CapacityError):
        sample_field(WeightDistribution.exponential(), 10**6, 10**6, 1)


def test_custom_needs_moments():
    with pytest.raises(MissingMomentsError):
        distribution_constants(WeightDistribution.custom([1.0, 2.0]))
    m, s = distribution_constants(WeightDistribution.custom([1.0, 2.0], mean=1.5, variance=0.25))
    assert (m, s) == (1.5, 0.5)


def test_lag_one_correlation_vanishes():
    v = sample_field(WeightDistribution.exponential(), 1000, 1000, 5).values
    for a, b in ((v[:-1, :], v[1:, :]), (v[:, :-1], v[:, 1:])):
        r = np.corrcoef(a.ravel(), b.ravel())[0, 1]
        assert abs(r) < 4 / 1000


def test_cdf_left_limits():
    g = WeightDistribution.geometric(2.0)
    assert g.cdf(1.0) == 0.5 and g.left_cdf(1.0) == 0.0
    assert g.cdf(2.5) == 0.75 and g.left_cdf(2.5) == 0.75
    b = WeightDistribution.bernoulli_max(0.9)
    assert b.cdf(1.0) == 1.0 and b.left_cdf(1.0) == pytest.approx(0.1)


@given(st.integers(0, 2**63 - 1), st.integers(0, 10**6))
def test_replica_seed_is_pure(master, idx):
    assert replica_seed(master, idx) == replica_seed(master, idx)
    assert 0 <= replica_seed(master, idx) < 2**64


def test_transpose_roundtrip():
    f = sample_field(WeightDistribution.exponential(), 3, 5, 1)
    t = f.transpose()
    assert t.values.shape == (5, 3)
    assert np.array_equal(t.transpose().values, f.values)
    with pytest.raises(ValueError):
        f.values[0, 0] = 1.0
    assert isinstance(WeightField.constant(2, 2, 3.0).values[1, 1], np.floating)
