import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from lpplab.env import WeightDistribution
from lpplab.errors import CouplingError, DataError, DomainError, StabilityError, UnsupportedDistributionError
from lpplab.queueing import (conservation_residual, coupled_monotone, departures, fixed_point_law,
                             idle_fraction, iterate_tandem, lindley_waits, monotone_violations,
                             queue_window_to_lpp, run_tandem, sojourn_mean, station_stats,
                             transpose_system)
from lpplab.stationary import BoundaryCocycle, build_gne
from lpplab.env import WeightField

GEO2 = WeightDistribution.geometric(2.0)
GEO3 = WeightDistribution.geometric(3.0)
EXP1 = WeightDistribution.exponential(1.0)
EXP2 = WeightDistribution.exponential(2.0)


def test_lindley_examples():
    assert lindley_waits([2.0], [1.0], 0.0)[1] == 0.0
    assert lindley_waits([1.0], [2.0], 1.0)[1] == 2.0
    with pytest.raises(DomainError):
        lindley_waits([-1.0], [1.0])
    with pytest.raises(DataError):
        lindley_waits([1.0, 2.0], [1.0])


def test_departure_examples():
    assert departures([5.0], [1.0, 2.0], [0.0])[0] == 6.0
    assert departures([1.0], [2.0, 1.0], [3.0])[0] == 1.0
    with pytest.raises(DataError):
        departures([1.0], [2.0], [3.0])


@given(arrays(np.float64, 60, elements=st.integers(0, 6).map(float)),
       arrays(np.float64, 61, elements=st.integers(0, 6).map(float)))
def test_conservation_on_integer_rows(A, S):
    W = lindley_waits(A, S[:-1])
    D = departures(A, S, W)
    assert conservation_residual(A, S, W, D) == 0.0


def test_waiting_time_is_sublinear():
    rng = np.random.default_rng(1)
    n = 10**5
    W = lindley_waits(rng.exponential(2.0, n), rng.exponential(1.0, n))
    k = np.arange(n // 2, n + 1)
    assert np.max(W[k] / k) <= 0.01


def test_stability_error():
    with pytest.raises(StabilityError):
        iterate_tandem(2.0, GEO2, 2000, 3, 1)
    with pytest.raises(StabilityError):
        coupled_monotone([1.5, 3.0], GEO2, 2000, 3, 1)


def test_tableau_identities_exact():
    tab = iterate_tandem(GEO3, GEO2, 20_000, 20, 4)
    assert tab.lindley_residual() == 0.0
    assert tab.conservation_residual() == 0.0
    assert tab.A.min() >= 0 and tab.W.min() >= 0


@pytest.mark.parametrize("A0,S,alpha", [(GEO3, GEO2, 3.0), (EXP2, EXP1, 2.0)])
def test_fixed_point_preserved(A0, S, alpha):
    n = 30_000
    tab = iterate_tandem(A0, S, n, 30, 2)
    law = fixed_point_law(S, alpha)
    sd = np.sqrt(alpha * (alpha - 1)) if S is GEO2 else alpha
    for st_ in station_stats(tab, [0, 10, 29], law):
        assert st_.ks.pvalue > 0.01
        # customers are correlated within a station, so allow a wider band
        assert abs(st_.mean - tab.arrivals(0).mean()) <= 4 * sd / np.sqrt(n) * 3


def test_deterministic_arrivals_converge():
    tab = iterate_tandem(3.0, GEO2, 100_000, 51, 0)
    d = [s.ks_distance for s in station_stats(tab, [1, 2, 5, 10, 20, 50], GEO3)]
    assert all(a > b for a, b in zip(d, d[1:]))


def test_sojourn_and_idle_small():
    tab = iterate_tandem(GEO3, GEO2, 50_000, 21, 7)
    assert sojourn_mean(tab, 20) == pytest.approx(4.0, abs=0.2)
    assert idle_fraction(tab, 20) == pytest.approx(0.5, abs=0.03)
    with pytest.raises(DomainError):
        sojourn_mean(tab, 3)
    with pytest.raises(DomainError):
        sojourn_mean(tab, 21)


def test_exponential_sojourn():
    tab = iterate_tandem(EXP2, EXP1, 50_000, 21, 8)
    assert sojourn_mean(tab, 20) == pytest.approx(2.0, abs=0.1)


def test_fixed_point_law_unsupported():
    with pytest.raises(UnsupportedDistributionError):
        fixed_point_law(WeightDistribution.bernoulli_max(0.5), 2.0)


def test_equal_alphas_give_identical_tableaux():
    a, b = coupled_monotone([3.0, 3.0], GEO2, 5000, 10, 3)
    assert np.array_equal(a.A, b.A) and np.array_equal(a.W, b.W)


def test_three_alphas_pairwise_monotone():
    tabs = coupled_monotone([2.2, 2.6, 3.5], GEO2, 20_000, 20, 5)
    for i in range(3):
        for j in range(i + 1, 3):
            assert monotone_violations(tabs[i], tabs[j]) == 0
    # the reverse order must be violated somewhere, or the check is vacuous
    assert monotone_violations(tabs[2], tabs[0]) > 0


def test_random_ordered_arrivals_stay_ordered():
    rng = np.random.default_rng(0)
    lo = rng.geometric(1 / 2.5, 5000).astype(float)
    hi = lo + rng.integers(0, 2, 5000)
    tabs = coupled_monotone([2.5, 3.0], GEO2, 5000, 10, 1, A0=[lo, hi])
    assert monotone_violations(*tabs) == 0
    with pytest.raises(CouplingError):
        coupled_monotone([2.5, 3.0], GEO2, 5000, 10, 1, A0=[hi, lo])


def test_run_tandem_shape_checks():
    with pytest.raises(DataError):
        run_tandem(np.ones(5), np.ones((5, 2)))
    with pytest.raises(DomainError):
        run_tandem(-np.ones(5), np.ones((6, 2)))


def test_transposed_system_is_a_queue():
    tab = iterate_tandem(GEO3, GEO2, 102_000, 112, 0)
    ts = transpose_system(tab, (2000, 102_000), (10, 110))
    assert ts.lindley_residual() == 0.0
    assert ts.departure_residual() == 0.0
    assert np.array_equal(ts.St, tab.S[2000:102_000, 10:110].T)
    assert ts.At.mean() == pytest.approx(4.0, abs=0.1)
    with pytest.raises(DomainError):
        transpose_system(tab, (2000, 2001), (10, 110))


def test_queue_matches_stationary_lpp():
    tab = iterate_tandem(GEO3, GEO2, 5000, 80, 3, warmup=500)
    w, B1, B2, h, v = queue_window_to_lpp(tab, (1500, 70), 64, 64)
    cf = build_gne(WeightField.from_array(w), BoundaryCocycle((0.5, 0.5), (64, 64), h, v, (3.0, 4.0), GEO2.kind))
    assert np.array_equal(cf.B1, B1)
    assert np.array_equal(cf.B2, B2)
    with pytest.raises(DomainError):
        queue_window_to_lpp(tab, (1500, 30), 64, 64)
