"""Tandem FIFO single-server queues in series.

Station k serves customers n = 0, 1, ... in order. ``A[n, k]`` is the time
between the arrivals of customers n and n+1 at station k, ``S[n, k]`` the
service time of customer n there and ``W[n, k]`` its waiting time. The
inter-departure times of station k are the inter-arrival times of k+1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels as K
from .env import Kind, WeightDistribution, distribution_constants, substream
from .errors import (CouplingError, DataError, DomainError, ParameterError, StabilityError,
                     UnsupportedDistributionError)
from .stats import KSResult, cdf_distance, ks_law

SERVICE_STREAM, ARRIVAL_STREAM = 0, 1
WARMUP_CUSTOMERS, WARMUP_STATIONS = 1000, 10


def lindley_waits(A, S, w0: float = 0.0) -> np.ndarray:
    """W[n+1] = (W[n] + S[n] - A[n])^+ from W[0] = w0; returns len(A)+1 values."""
    A = np.asarray(A, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    if A.shape != S.shape or A.ndim != 1:
        raise DataError("A and S must be 1-D arrays of equal length")
    if (A < 0).any() or (S < 0).any() or w0 < 0:
        raise DomainError("queue inputs must be nonnegative")
    return K.lindley(A, S, float(w0))


def departures(A, S, W) -> np.ndarray:
    """Inter-departure times (A[n] - S[n] - W[n])^+ + S[n+1].

    ``S`` carries one more entry than ``A`` (the service of the next customer).
    """
    A = np.asarray(A, dtype=np.float64)
    S = np.asarray(S, dtype=np.float64)
    W = np.asarray(W, dtype=np.float64)
    n = len(A)
    if len(S) != n + 1 or len(W) < n:
        raise DataError(f"need len(S) = len(A)+1 and len(W) >= len(A); got {len(A)}, {len(S)}, {len(W)}")
    out = np.maximum(A - S[:n] - W[:n], 0.0) + S[1:]
    return out


def conservation_residual(A, S, W, A_next) -> float:
    """max |W[n+1] + S[n+1] + A[n] - (W[n] + S[n] + A_next[n])|."""
    A, S, W, A_next = (np.asarray(x, dtype=np.float64) for x in (A, S, W, A_next))
    n = len(A)
    lhs = W[1:n + 1] + S[1:n + 1] + A
    rhs = W[:n] + S[:n] + A_next
    return float(np.max(np.abs(lhs - rhs))) if n else 0.0


ArrivalLaw = Union[float, WeightDistribution]


@dataclass(frozen=True, eq=False)
class QueueTableau:
    """A has shape (N, K+1), S and W shape (N+1, K)."""

    A: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    W: np.ndarray = field(repr=False)
    warmup: int = WARMUP_CUSTOMERS

    @property
    def n_customers(self) -> int:
        return self.A.shape[0]

    @property
    def n_stations(self) -> int:
        return self.S.shape[1]

    def lindley_residual(self) -> float:
        N = self.n_customers
        x = np.maximum(self.W[:N] + self.S[:N] - self.A[:, :-1], 0.0)
        return float(np.max(np.abs(self.W[1:] - x)))

    def conservation_residual(self) -> float:
        N = self.n_customers
        lhs = self.W[1:] + self.S[1:] + self.A[:, :-1]
        rhs = self.W[:N] + self.S[:N] + self.A[:, 1:]
        return float(np.max(np.abs(lhs - rhs)))

    def arrivals(self, k: int) -> np.ndarray:
        """Post-warmup inter-arrival times at station k."""
        self._check_station(k, self.n_stations + 1)
        return self.A[self.warmup:, k]

    def _check_station(self, k, limit):
        if not 0 <= k < limit:
            raise DomainError(f"station {k} out of range [0, {limit})")


def _arrival_draws(law: ArrivalLaw, n: int, rng) -> np.ndarray:
    if isinstance(law, WeightDistribution):
        return law.sample(rng, n)
    return np.full(n, float(law))


def _arrival_mean(law: ArrivalLaw) -> float:
    if isinstance(law, WeightDistribution):
        return distribution_constants(law)[0]
    return float(law)


def run_tandem(A0: np.ndarray, S: np.ndarray, warmup: int = WARMUP_CUSTOMERS) -> QueueTableau:
    A0 = np.ascontiguousarray(A0, dtype=np.float64)
    S = np.ascontiguousarray(S, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != len(A0) + 1:
        raise DataError(f"S must have shape (len(A0)+1, K); got {S.shape}")
    if (A0 < 0).any() or (S < 0).any():
        raise DomainError("queue inputs must be nonnegative")
    A, W = K.tandem(A0, S)
    for a in (A, S, W):
        a.setflags(write=False)
    return QueueTableau(A, S, W, warmup)


def sample_services(S_dist: WeightDistribution, n_customers: int, n_stations: int, seed: int) -> np.ndarray:
    return S_dist.sample(substream(seed, SERVICE_STREAM), (n_customers + 1, n_stations))


def iterate_tandem(A0_law: ArrivalLaw, S_dist: WeightDistribution, n_customers: int,
                   n_stations: int, seed: int, warmup: int = WARMUP_CUSTOMERS) -> QueueTableau:
    """Push an i.i.d. (or deterministic) arrival stream through the stations."""
    m, _ = distribution_constants(S_dist)
    if not _arrival_mean(A0_law) > m:
        raise StabilityError(f"mean inter-arrival {_arrival_mean(A0_law)} must exceed service mean {m}")
    if warmup >= n_customers:
        raise ParameterError("warmup leaves no customers")
    S = sample_services(S_dist, n_customers, n_stations, seed)
    A0 = _arrival_draws(A0_law, n_customers, substream(seed, ARRIVAL_STREAM))
    return run_tandem(A0, S, warmup)


@dataclass
class StationStats:
    station: int
    mean: float
    ks_distance: float
    ks: Optional[KSResult]


def fixed_point_law(S_dist: WeightDistribution, alpha: float) -> WeightDistribution:
    """Inter-arrival law preserved by a station with solvable services."""
    if S_dist.kind is Kind.EXPONENTIAL:
        return WeightDistribution.exponential(alpha)
    if S_dist.kind is Kind.GEOMETRIC:
        return WeightDistribution.geometric(alpha)
    raise UnsupportedDistributionError("fixed-point law known only for solvable services")


def station_stats(tab: QueueTableau, stations: Sequence[int], law: WeightDistribution) -> List[StationStats]:
    out = []
    for k in stations:
        a = tab.arrivals(k)
        out.append(StationStats(k, float(a.mean()), cdf_distance(a, law.cdf, law.left_cdf), ks_law(a, law)))
    return out


def cesaro_distance(tab: QueueTableau, law: WeightDistribution, upto: int) -> float:
    """CDF distance of the pooled arrivals at stations 1..upto to ``law``."""
    a = np.concatenate([tab.arrivals(k) for k in range(1, upto + 1)])
    return cdf_distance(a, law.cdf, law.left_cdf)


def sojourn_mean(tab: QueueTableau, k: int) -> float:
    """Mean of W + S at station k over post-warmup customers."""
    tab._check_station(k, tab.n_stations)
    if k < min(WARMUP_STATIONS, tab.n_stations - 1):
        raise DomainError(f"station {k} is inside the station warmup")
    w = tab.warmup
    return float((tab.W[w:, k] + tab.S[w:, k]).mean())


def idle_fraction(tab: QueueTableau, k: int) -> float:
    """Fraction of post-warmup customers at station k that do not wait."""
    tab._check_station(k, tab.n_stations)
    return float((tab.W[tab.warmup:, k] == 0).mean())


def coupled_monotone(alphas: Sequence[float], S_dist: WeightDistribution, n_customers: int,
                     n_stations: int, seed: int, A0: Optional[Sequence[np.ndarray]] = None
                     ) -> List[QueueTableau]:
    """Run one system per alpha on a shared service array.

    With no explicit ``A0`` the arrivals are deterministic, A0 = alpha. The
    orderings A^a <= A^b and W^a >= W^b for a < b are checked at every index.
    """
    alphas = list(alphas)
    if any(b < a for a, b in zip(alphas, alphas[1:])):
        raise ParameterError("alphas must be sorted")
    m, _ = distribution_constants(S_dist)
    if not alphas or min(alphas) <= m:
        raise StabilityError(f"every alpha must exceed service mean {m}")
    S = sample_services(S_dist, n_customers, n_stations, seed)
    if A0 is None:
        A0 = [np.full(n_customers, float(a)) for a in alphas]
    for a, b in zip(A0, A0[1:]):
        if np.any(np.asarray(a) > np.asarray(b)):
            raise CouplingError("initial arrival processes are not ordered")
    tabs = [run_tandem(a, S, min(WARMUP_CUSTOMERS, n_customers - 1)) for a in A0]
    for x, y in zip(tabs, tabs[1:]):
        if monotone_violations(x, y):
            raise CouplingError("coupled systems lost their ordering")
    return tabs


def monotone_violations(lo: QueueTableau, hi: QueueTableau) -> int:
    """Number of indices where A^lo > A^hi or W^lo < W^hi."""
    return int(np.count_nonzero(lo.A > hi.A) + np.count_nonzero(lo.W < hi.W))


@dataclass(frozen=True, eq=False)
class TransposedSystem:
    """Queues read along the other axis of the tableau.

    ``At[i, j] = W[j-1, i+1] + S[j-1, i+1]``, ``St[i, j] = S[j, i]`` and
    ``Wt[i, j] = A[j-1, i+1] - S[j, i]``, over the window ``n0 <= j < n1``,
    ``k0 <= i < k1`` of original customers and stations.
    """

    At: np.ndarray
    St: np.ndarray
    Wt: np.ndarray

    def lindley_residual(self) -> float:
        nxt = np.maximum(self.Wt[:-1, :] + self.St[:-1, :] - self.At[:-1, :], 0.0)
        return float(np.max(np.abs(self.Wt[1:, :] - nxt)))

    def departure_residual(self) -> float:
        nxt = np.maximum(self.At[:-1, :-1] - self.St[:-1, :-1] - self.Wt[:-1, :-1], 0.0) + self.St[1:, :-1]
        return float(np.max(np.abs(self.At[:-1, 1:] - nxt)))


def transpose_system(tab: QueueTableau, customers: Tuple[int, int], stations: Tuple[int, int]) -> TransposedSystem:
    """Transposed arrays on original customers [n0, n1) and stations [k0, k1).

    Transposed customer i is original station i, transposed station j is
    original customer j.
    """
    n0, n1 = customers
    k0, k1 = stations
    if n0 < 1 or k1 > tab.n_stations - 1 or n1 > tab.n_customers or k0 < 0:
        raise DomainError("window leaves the tableau")
    if n1 - n0 < 2 or k1 - k0 < 2:
        raise DomainError("window too small")
    i = np.arange(k0, k1)[:, None]
    j = np.arange(n0, n1)[None, :]
    At = tab.W[j - 1, i + 1] + tab.S[j - 1, i + 1]
    St = tab.S[j, i]
    Wt = tab.A[j - 1, i + 1] - tab.S[j, i]
    return TransposedSystem(At, St, Wt)


def queue_window_to_lpp(tab: QueueTableau, corner: Tuple[int, int], width: int, height: int):
    """Read an LPP window off a tableau.

    LPP site (p, q) is customer N0 - p at station K0 - q with ``corner =
    (N0, K0)``. Returns (weights, B1, B2, horiz, vert) where B1 has shape
    (width, height+1) and B2 shape (width+1, height) in the orientation used
    by the stationary module, and horiz/vert are the boundary increments
    toward the corner (width, height).
    """
    N0, K0 = corner
    p = np.arange(width + 1)[:, None]
    q = np.arange(height + 1)[None, :]
    if N0 - width - 1 < 0 or K0 - height + 1 < 0 or K0 + 1 > tab.n_stations or N0 > tab.n_customers - 1:
        raise DomainError("window leaves the tableau")
    n = N0 - p
    k = K0 - q
    w = tab.S[n[:width], k[:, :height]]
    B1 = tab.A[n[:width] - 1, k + 1]  # shape (width, height+1)
    B2 = tab.W[n, k[:, :height]] + tab.S[n, k[:, :height]]  # shape (width+1, height)
    horiz = B1[::-1, height]  # horiz[k] = B1(width-1-k, height)
    vert = B2[width, ::-1]
    return w, B1, B2, horiz.copy(), vert.copy()
