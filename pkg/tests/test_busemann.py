import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab.busemann import (busemann_stability, busemann_vs_exact, centered_cocycle_max,
                             direction_monotonicity_violation, estimate_busemann, field_for,
                             replicated_means, target_for)
from lpplab.env import WeightDistribution, WeightField, sample_field
from lpplab.errors import DomainError, UnsupportedDistributionError

EXP = WeightDistribution.exponential()
GEO = WeightDistribution.geometric(2.0)
WIN = (0, 0, 100, 100)  # 10^4 sites


@pytest.fixture(scope="module")
def diag_sample():
    fld = field_for(EXP, (0.5, 0.5), 4000, 1, WIN)
    return fld, estimate_busemann(fld, (0.5, 0.5), 4000, WIN)


def test_gradient_identities(diag_sample):
    _, b = diag_sample
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = tuple(rng.integers(0, 100, 2))
        y = tuple(rng.integers(0, 100, 2))
        z = tuple(rng.integers(0, 100, 2))
        assert b.path_increment(x, x) == 0.0
        assert b.path_increment(x, y) == -b.path_increment(y, x)
        assert b.path_increment(x, y) + b.path_increment(y, z) == pytest.approx(b.path_increment(x, z), abs=1e-9)
    assert b.recovery_residual() <= 1e-9
    assert b.additivity_residual() <= 1e-9


@given(st.integers(0, 10**6))
def test_geometric_identities_exact(seed):
    fld = field_for(GEO, (0.3, 0.7), 400, seed, (0, 0, 20, 20))
    b = estimate_busemann(fld, (0.3, 0.7), 400, (0, 0, 20, 20))
    assert b.recovery_residual() == 0.0
    assert b.additivity_residual() == 0.0
    # variational identity: max_i {w - B_i} = 0 at every site
    assert np.array_equal(np.maximum(b.w - b.B1, b.w - b.B2), np.zeros_like(b.w))


def test_proximity_error():
    fld = sample_field(EXP, 60, 60, 1)
    with pytest.raises(DomainError):
        estimate_busemann(fld, (0.5, 0.5), 100, (0, 0, 10, 10))
    with pytest.raises(DomainError):
        target_for((0.5, 0.5), 100, (0, 0, 2, 2), anchor="middle")


def test_targets():
    assert target_for((0.8, 0.2), 4000, WIN, "corner") == (3200, 800)
    assert target_for((0.8, 0.2), 4000, WIN) == (3250, 850)


def test_diagonal_window_mean(diag_sample):
    _, b = diag_sample
    assert b.means[0] == pytest.approx(2.0, abs=0.1)


def test_stability_n_vs_2n():
    fld = field_for(EXP, (0.5, 0.5), 8000, 2, (0, 0, 50, 50))
    rep = busemann_stability(fld, (0.5, 0.5), 4000, 8000, (0, 0, 50, 50))
    assert rep.sign_agreement >= 0.95


def test_constant_field_targets_agree():
    fld = WeightField.constant(300, 300, 1.5)
    for n in (200, 400, 500):
        b = estimate_busemann(fld, (0.5, 0.5), n, (0, 0, 10, 10))
        assert np.all(b.B1 == 1.5) and np.all(b.B2 == 1.5)


@given(st.floats(0.1, 0.45), st.floats(0.55, 0.9), st.integers(0, 1000))
def test_direction_monotonicity_pointwise(a, c, seed):
    fld = field_for(GEO, (c, 1 - a), 300, seed, (0, 0, 10, 10))
    assert direction_monotonicity_violation(fld, (a, 1 - a), (c, 1 - c), 300, (0, 0, 10, 10)) == 0.0


def test_window_means_monotone_in_direction():
    fld = sample_field(EXP, 2100, 2100, 3)
    grid = [0.2, 0.35, 0.5, 0.65, 0.8]
    m = [estimate_busemann(fld, (a, 1 - a), 2000, (0, 0, 40, 40)).means for a in grid]
    b1, b2 = zip(*m)
    assert all(x >= y for x, y in zip(b1, b1[1:]))
    assert all(x <= y for x, y in zip(b2, b2[1:]))


def test_exact_law_diagonal():
    r = replicated_means(EXP, (0.5, 0.5), 4000, WIN, 20, 5)
    assert np.allclose(-r.mean(0), (-2.0, -2.0), atol=0.1)
    fld = field_for(EXP, (0.5, 0.5), 4000, 6, WIN)
    cmp = busemann_vs_exact(estimate_busemann(fld, (0.5, 0.5), 4000, WIN), EXP)
    assert cmp.row.pvalue > 0.001 and cmp.column.pvalue > 0.001
    assert np.allclose(cmp.target_tilt, (-2.0, -2.0))


def test_exact_targets_off_diagonal():
    fld = field_for(EXP, (0.8, 0.2), 1000, 1, (0, 0, 20, 20))
    cmp = busemann_vs_exact(estimate_busemann(fld, (0.8, 0.2), 1000, (0, 0, 20, 20)), EXP)
    assert np.allclose(cmp.target_tilt, (-1.5, -3.0), atol=1e-12)
    with pytest.raises(UnsupportedDistributionError):
        busemann_vs_exact(estimate_busemann(fld, (0.8, 0.2), 1000, (0, 0, 20, 20)),
                          WeightDistribution.bernoulli_max(0.5))


def test_geometric_integer_increments():
    r = replicated_means(GEO, (0.5, 0.5), 2000, (0, 0, 50, 50), 20, 7)
    assert r.mean(0)[0] == pytest.approx(2 + math.sqrt(2), abs=0.1)
    fld = field_for(GEO, (0.5, 0.5), 2000, 1, (0, 0, 50, 50))
    b = estimate_busemann(fld, (0.5, 0.5), 2000, (0, 0, 50, 50))
    assert np.all(b.B1 == np.round(b.B1))


def test_centered_cocycle_is_sublinear():
    small = np.mean([centered_cocycle_max(EXP, (0.5, 0.5), 200, s) for s in range(10)])
    big = np.mean([centered_cocycle_max(EXP, (0.5, 0.5), 1600, s) for s in range(10)])
    assert big <= 0.7 * small
