"""Goodness-of-fit helpers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import stats as _st

from .errors import DataError


@dataclass(frozen=True)
class KSResult:
    statistic: float
    pvalue: float
    n: int


def ks_test(sample, cdf: Callable, left_cdf: Optional[Callable] = None, *,
            presorted: bool = True) -> KSResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    ``left_cdf(x) = P(X < x)`` makes the statistic exact for laws with atoms:
    the lower deviation at a data point is measured against F(x-) rather
    than F(x). Without it the law is treated as continuous.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1 or len(x) < 20:
        raise DataError(f"need a 1-D sample of size >= 20, got shape {x.shape}")
    if np.isnan(x).any():
        raise DataError("sample contains NaN")
    if presorted:
        if np.any(np.diff(x) < 0):
            raise DataError("sample is not sorted")
    else:
        x = np.sort(x)
    n = len(x)
    F = np.asarray(cdf(x), dtype=np.float64)
    Fm = F if left_cdf is None else np.asarray(left_cdf(x), dtype=np.float64)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - F)
    d_minus = np.max(Fm - (i - 1) / n)
    d = float(max(d_plus, d_minus, 0.0))
    p = float(_st.kstwobign.sf(np.sqrt(n) * d))
    return KSResult(d, p, n)


def ks_law(sample, dist) -> KSResult:
    """KS test of an unsorted sample against a ``WeightDistribution``-like law."""
    return ks_test(np.sort(np.ravel(sample)), dist.cdf, dist.left_cdf)


def cdf_distance(sample, cdf: Callable, left_cdf: Optional[Callable] = None) -> float:
    """Sup distance between the empirical CDF of ``sample`` and ``cdf``."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = len(x)
    F = np.asarray(cdf(x), dtype=np.float64)
    Fm = F if left_cdf is None else np.asarray(left_cdf(x), dtype=np.float64)
    # empirical CDF just after and just before each data point
    after = np.searchsorted(x, x, side="right") / n
    before = np.searchsorted(x, x, side="left") / n
    return float(max(np.max(np.abs(after - F)), np.max(np.abs(before - Fm))))


def mean_stderr(values) -> tuple:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2:
        return float(v.mean()), float("nan")
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(len(v)))
