"""Oriented site percolation right edge and the flat edge of the shape.

Sites are open independently with probability p1. A site on level n+1 is
reached if it is open and one of its two down-left neighbours was reached;
the starting set is always occupied.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .env import Kind, WeightDistribution, replica_seed, sample_field, substream
from .errors import ConfigurationError, DomainError, ParameterError
from .lpp import lattice_point

ORIGIN, HALF_LINE = "origin", "half-line"


@dataclass(frozen=True, eq=False)
class PercolationRun:
    p1: float
    levels: int
    initial: str
    a: np.ndarray = field(repr=False)  # a_n for n = 0..levels; meaningless after death
    survived: bool
    restarts: int = 0

    @property
    def beta_hat(self) -> float:
        """Mean of a_n / n over the last quartile of levels."""
        if not self.survived:
            return float("nan")
        n = np.arange(len(self.a))
        tail = n >= max(1, (3 * self.levels) // 4)
        return float(np.mean(self.a[tail] / n[tail]))


def _uniforms(seed: int, levels: int, width: int) -> np.ndarray:
    return np.random.default_rng(int(seed)).random((levels, width))


def _half_line(p1: float, levels: int, seed: int) -> PercolationRun:
    # start from columns k in [-L, 0]; a path from k0 < -L reaches at most
    # k0 + n < n - L on level n, so the edge is exact while a_n >= n - L
    L = levels
    while True:
        U = _uniforms(seed, levels, L + levels + 2)
        a = K.percolation_front(U, p1, L, 0, L)
        n = np.arange(levels + 1)
        if np.all(a >= n - L):
            return PercolationRun(p1, levels, HALF_LINE, a, True)
        L *= 2


def _origin(p1: float, levels: int, seed: int, restarts: int) -> PercolationRun:
    for r in range(restarts + 1):
        U = _uniforms(replica_seed(seed, r), levels, levels + 2)
        a = K.percolation_front(U, p1, 0, 0, 0)
        if a[-1] >= 0:
            return PercolationRun(p1, levels, ORIGIN, a, True, r)
    return PercolationRun(p1, levels, ORIGIN, a, False, restarts)


def right_edge(p1: float, levels: int, seed: int, initial: str = HALF_LINE,
               restarts: int = 100) -> PercolationRun:
    """Right edge a_n of the cluster; origin starts are redrawn on death.

    Matched seeds share uniforms, so raising p1 can only enlarge the cluster.
    """
    if not 0 < p1 <= 1:
        raise ParameterError(f"p1 must lie in (0, 1], got {p1}")
    if levels < 1:
        raise ParameterError("levels must be >= 1")
    if initial == HALF_LINE:
        return _half_line(p1, levels, seed)
    if initial == ORIGIN:
        return _origin(p1, levels, seed, restarts)
    raise ParameterError(f"unknown initial set {initial!r}")


def survival_fraction(p1: float, levels: int = 500, seeds: int = 100, seed: int = 0) -> float:
    """Fraction of origin-start runs alive at ``levels``, without restarts."""
    alive = 0
    for s in range(seeds):
        alive += right_edge(p1, levels, replica_seed(seed, s), ORIGIN, restarts=0).survived
    return alive / seeds


@dataclass
class FlatEdgeReport:
    p1: float
    xi: Tuple[float, float]
    n: int
    values: np.ndarray
    supercritical: bool
    survival: float

    @property
    def mean(self) -> float:
        return float(self.values.mean())

    @property
    def stderr(self) -> float:
        return float(self.values.std(ddof=1) / math.sqrt(len(self.values)))


def flat_edge_check(p1: float, xi: Sequence[float], n: int, replicas: int, seed: int,
                    sub_law: Tuple[float, float] = (0.0, 0.5), pilot_levels: int = 500,
                    pilot_seeds: int = 100) -> FlatEdgeReport:
    """n^-1 G_{0, floor(n xi)} for BernoulliMax weights, per replica.

    A survival pilot decides whether p1 is supercritical; if not, a warning
    is issued because no flat segment is expected.
    """
    if not (xi[0] > 0 and xi[1] > 0):
        raise DomainError(f"direction {tuple(xi)} is on the boundary of U")
    from .lpp import passage_time
    dist = WeightDistribution.bernoulli_max(p1, sub_law)
    surv = survival_fraction(p1, pilot_levels, pilot_seeds, seed)
    supercritical = surv >= 0.5
    if not supercritical:
        warnings.warn(f"p1 = {p1} failed the survival pilot ({surv:.2f}); flatness claim void")
    v = lattice_point(n, xi)
    vals = np.empty(replicas)
    for r in range(replicas):
        fld = sample_field(dist, v[0] + 1, v[1] + 1, replica_seed(seed, r))
        vals[r] = passage_time(fld, (0, 0), v) / (v[0] + v[1])
    return FlatEdgeReport(p1, tuple(map(float, xi)), n, vals, supercritical, surv)
