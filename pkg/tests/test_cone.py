import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab.cone import flat_edge_check, right_edge, survival_fraction
from lpplab.env import WeightDistribution, WeightField, sample_field
from lpplab.errors import ParameterError
from lpplab.lpp import compute_passage_table, passage_time


def test_all_open_sites():
    for init in ("half-line", "origin"):
        r = right_edge(1.0, 300, 1, init)
        assert np.array_equal(r.a, np.arange(301))
        assert r.beta_hat == 1.0


def test_beta_hat_self_consistency():
    short = np.array([right_edge(0.95, 2000, s).beta_hat for s in range(20)])
    long = np.array([right_edge(0.95, 4000, 100 + s).beta_hat for s in range(20)])
    assert short.std(ddof=1) <= 0.01
    assert abs(short.mean() - long.mean()) <= 0.01
    assert 0.5 < short.mean() < 1


def test_beta_hat_monotone_in_p1():
    for s in range(20):
        lo, hi = right_edge(0.9, 1000, s), right_edge(0.95, 1000, s)
        assert np.all(lo.a <= hi.a)


@given(st.floats(0.6, 0.99), st.integers(0, 10**6))
def test_half_line_front_never_dies(p, seed):
    r = right_edge(p, 200, seed)
    assert r.survived
    assert np.all(np.diff(r.a) <= 1)


def test_origin_restarts_and_survival():
    assert survival_fraction(0.95, 300, 30, 1) >= 0.9
    assert survival_fraction(0.5, 300, 30, 1) == 0.0
    r = right_edge(0.5, 300, 1, "origin", restarts=3)
    assert not r.survived and np.isnan(r.beta_hat) and r.restarts == 3
    with pytest.raises(ParameterError):
        right_edge(0.0, 10, 1)
    with pytest.raises(ParameterError):
        right_edge(0.9, 10, 1, "diamond")


def test_unit_field_is_flat():
    fld = WeightField.constant(251, 251, 1.0)
    assert passage_time(fld, (0, 0), (250, 250)) / 500 == 1.0


@given(st.floats(0.05, 0.99), st.integers(0, 10**6))
def test_upper_bound(p, seed):
    fld = sample_field(WeightDistribution.bernoulli_max(p), 40, 30, seed)
    G = compute_passage_table(fld).G
    i, j = np.indices(G.shape)
    assert np.all(G <= i + j)


def test_coupled_p1_never_lowers_g():
    for seed in range(5):
        G = [compute_passage_table(sample_field(WeightDistribution.bernoulli_max(p), 60, 60, seed)).G
             for p in (0.6, 0.8, 0.95)]
        assert np.all(G[0] <= G[1]) and np.all(G[1] <= G[2])


def test_flat_edge_small():
    r = flat_edge_check(0.95, (0.5, 0.5), 200, 5, 1, pilot_levels=200, pilot_seeds=20)
    assert r.supercritical
    assert 0.99 <= r.mean <= 1.0


def test_subcritical_warns():
    with pytest.warns(UserWarning):
        r = flat_edge_check(0.5, (0.5, 0.5), 50, 2, 1, pilot_levels=100, pilot_seeds=10)
    assert not r.supercritical
