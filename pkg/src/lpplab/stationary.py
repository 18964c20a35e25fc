"""Stationary last-passage model driven by exact boundary cocycles.

For exponential and geometric weights the Busemann increments along the
north and east boundaries of a corner are i.i.d. with explicit laws. Feeding
them into the reversed recursion

    G(u) = w(u) + max(G(u + e1), G(u + e2))

produces a bulk increment field with the same joint law as the Busemann
function itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize
from scipy import stats as _st

from . import _kernels as K
from .duality import ClosedFormGamma
from .env import Kind, WeightDistribution, WeightField, distribution_constants, sample_field, substream
from .errors import ConfigurationError, DomainError, ParameterError, UnsupportedDistributionError
from .stats import KSResult, ks_law

BULK_STREAM, BOUNDARY_STREAM = 0, 1


def boundary_means(m: float, sigma: float, xi: Sequence[float]) -> Tuple[float, float]:
    if not (xi[0] > 0 and xi[1] > 0):
        raise DomainError(f"direction {tuple(xi)} is on the boundary of U")
    return m + sigma * math.sqrt(xi[1] / xi[0]), m + sigma * math.sqrt(xi[0] / xi[1])


def xi_of_alpha(m: float, sigma: float, alpha: float) -> Tuple[float, float]:
    """Direction whose horizontal boundary mean is alpha."""
    if not alpha > m:
        raise DomainError(f"alpha must exceed m = {m}")
    s = (sigma / (alpha - m)) ** 2
    return s / (1 + s), 1 / (1 + s)


def _law(kind: Kind, mean: float) -> WeightDistribution:
    if kind is Kind.EXPONENTIAL:
        return WeightDistribution.exponential(mean)
    return WeightDistribution.geometric(mean)


@dataclass(frozen=True, eq=False)
class BoundaryCocycle:
    """Increments along the north (``horiz``) and east (``vert``) boundary.

    ``horiz[k] = B(v - (k+1) e1, v - k e1)`` and ``vert[k]`` likewise along e2.
    """

    xi: Tuple[float, float]
    v: Tuple[int, int]
    horiz: np.ndarray = field(repr=False)
    vert: np.ndarray = field(repr=False)
    means: Tuple[float, float]
    kind: Kind


def sample_boundary(dist: WeightDistribution, xi: Sequence[float], length: Tuple[int, int],
                    seed: int, v: Tuple[int, int] = (0, 0)) -> BoundaryCocycle:
    """Draw independent i.i.d. boundary increments for direction ``xi``.

    ``length = (number of horizontal, number of vertical)`` increments.
    """
    if not dist.is_solvable:
        raise UnsupportedDistributionError(f"no exact cocycle law for {dist.kind.value} weights")
    m, sigma = distribution_constants(dist)
    mu1, mu2 = boundary_means(m, sigma, xi)
    rng = substream(seed, BOUNDARY_STREAM)
    horiz = _law(dist.kind, mu1).sample(rng, int(length[0]))
    vert = _law(dist.kind, mu2).sample(rng, int(length[1]))
    return BoundaryCocycle(tuple(map(float, xi)), tuple(v), horiz, vert, (mu1, mu2), dist.kind)


@dataclass(frozen=True, eq=False)
class CocycleField:
    """Bulk increments of the stationary model on a W x H box.

    ``G`` has shape (W+1, H+1) with the corner at index (W, H). ``B1[i, j] =
    G[i, j] - G[i+1, j]`` has shape (W, H+1) and ``B2`` shape (W+1, H).
    """

    weights: WeightField = field(repr=False)
    boundary: BoundaryCocycle = field(repr=False)
    G: np.ndarray = field(repr=False)
    B1: np.ndarray = field(repr=False)
    B2: np.ndarray = field(repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.weights.width, self.weights.height

    @property
    def tilt(self) -> np.ndarray:
        """h(B) = -(mean B1, mean B2) over the bulk."""
        W, H = self.shape
        return -np.array([self.B1[:, :H].mean(), self.B2[:W, :].mean()])

    def recovery_residual(self) -> float:
        W, H = self.shape
        return float(np.max(np.abs(np.minimum(self.B1[:, :H], self.B2[:W, :]) - self.weights.values)))

    def additivity_residual(self) -> float:
        W, H = self.shape
        lhs = self.B1[:, :H] + self.B2[1:, :]
        rhs = self.B2[:W, :] + self.B1[:, 1:]
        scale = np.maximum(1.0, np.abs(lhs))
        return float(np.max(np.abs(lhs - rhs) / scale))

    def variational_residual(self) -> float:
        """max_i {w_x - B_i(x)} at every bulk site, which must vanish."""
        W, H = self.shape
        w = self.weights.values
        return float(np.max(np.abs(np.maximum(w - self.B1[:, :H], w - self.B2[:W, :]))))


def build_gne(fld: WeightField, boundary: BoundaryCocycle) -> CocycleField:
    W, H = fld.width, fld.height
    if len(boundary.horiz) < W or len(boundary.vert) < H:
        raise DomainError(f"boundary ({len(boundary.horiz)}, {len(boundary.vert)}) shorter "
                          f"than box {W}x{H}")
    G = K.gne_table(fld.values, np.ascontiguousarray(boundary.horiz[:W], dtype=np.float64),
                    np.ascontiguousarray(boundary.vert[:H], dtype=np.float64))
    B1 = G[:-1, :] - G[1:, :]
    B2 = G[:, :-1] - G[:, 1:]
    for a in (G, B1, B2):
        a.setflags(write=False)
    return CocycleField(fld, boundary, G, B1, B2)


def stationary_field(dist: WeightDistribution, xi: Sequence[float], width: int, height: int,
                     seed: int) -> CocycleField:
    """Bulk and boundary drawn from disjoint streams of ``seed``."""
    rng = substream(seed, BULK_STREAM)
    vals = dist.sample(rng, (width, height))
    fld = WeightField(width, height, vals, int(seed), dist)
    bd = sample_boundary(dist, xi, (width, height), seed, v=(width, height))
    return build_gne(fld, bd)


def corner_independence_residual(cf: CocycleField) -> float:
    """Rebuild on the box shrunk by one site, fed by the big field's own
    increments on the new boundary, and compare the shared bulk increments.

    The increments inside a box do not depend on which corner the recursion
    started from, so the residual is exactly zero.
    """
    W, H = cf.shape
    if W < 2 or H < 2:
        raise DomainError("need at least a 2x2 box")
    horiz = cf.B1[::-1, H - 1][1:].copy()  # B1 along row H-1, walking west from (W-1, H-1)
    vert = cf.B2[W - 1, ::-1][1:].copy()
    sub = WeightField.from_array(cf.weights.values[: W - 1, : H - 1])
    bd = BoundaryCocycle(cf.boundary.xi, (W - 1, H - 1), horiz, vert, cf.boundary.means, cf.boundary.kind)
    small = build_gne(sub, bd)
    d1 = np.abs(small.B1 - cf.B1[: W - 1, : H]).max()
    d2 = np.abs(small.B2 - cf.B2[: W, : H - 1]).max()
    return float(max(d1, d2))


@dataclass
class BurkeReport:
    y: KSResult
    b1: KSResult
    b2: KSResult
    b1_mean: float
    b2_mean: float
    means: Tuple[float, float]

    def passes(self, level: float = 0.01) -> bool:
        return min(self.y.pvalue, self.b1.pvalue, self.b2.pvalue) > level


def burke_check(cf: CocycleField) -> BurkeReport:
    """KS tests for the Burke property of an exponential stationary field.

    The new weights ``Y_x = min(B1(x - e1), B2(x - e2))`` on the bulk should
    be i.i.d. Exp(m). B1 along the south row and B2 along the west column are
    i.i.d. with the boundary laws.
    """
    if cf.boundary.kind is not Kind.EXPONENTIAL:
        raise UnsupportedDistributionError("Burke check is implemented for exponential weights")
    W, H = cf.shape
    m, _ = distribution_constants(cf.weights.distribution)
    mu1, mu2 = cf.boundary.means
    # x ranges over [1, W] x [1, H]
    y = np.minimum(cf.B1[:, 1:], cf.B2[1:, :])
    b1 = cf.B1[:, 0]
    b2 = cf.B2[0, :]
    return BurkeReport(
        ks_law(y, WeightDistribution.exponential(m)),
        ks_law(b1, WeightDistribution.exponential(mu1)),
        ks_law(b2, WeightDistribution.exponential(mu2)),
        float(b1.mean()), float(b2.mean()), (mu1, mu2))


def stationarity_ks(cf: CocycleField, size: int) -> float:
    """Two-sample KS p-value between B1 on two disjoint congruent sub-boxes."""
    W, H = cf.shape
    if 2 * size > W or size > H:
        raise DomainError("sub-boxes do not fit")
    a = cf.B1[:size, :size].ravel()
    b = cf.B1[W - size:, H - size + 1:H + 1].ravel()
    return float(_st.ks_2samp(a, b).pvalue)


def maximizer_exit(cf: CocycleField, start: Tuple[int, int] = (0, 0)) -> Tuple[str, int]:
    """Follow the maximizing path of G from ``start`` to the boundary.

    Returns ("north", tau) when it first touches the row j = H at column
    W - tau, or ("east", tau) when it hits the column i = W at row H - tau.
    Ties go to e1.
    """
    G = cf.G
    W, H = cf.shape
    i, j = start
    while i < W and j < H:
        if G[i + 1, j] >= G[i, j + 1]:
            i += 1
        else:
            j += 1
    if j == H and i < W:
        return "north", W - i
    return "east", H - j


def exit_tau_star(model: ClosedFormGamma, alpha: float, s: float) -> float:
    """argmax over 0 <= tau <= s of alpha tau + gamma(s - tau)."""
    res = optimize.minimize_scalar(lambda t: -(alpha * t + model.gamma(s - t)),
                                   bounds=(0.0, s), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


@dataclass
class ExitReport:
    s: float
    r: float
    alpha: float
    north_frequency: float
    mean_normalized_entry: float
    stderr_entry: float
    tau_star: float
    target: float
    sides: List[str]
    taus: List[int]


def exit_point(dist: WeightDistribution, alpha: float, s: float, size: int, replicas: int,
               seed: int, assert_north: bool = True) -> ExitReport:
    """Exit statistics of the stationary maximizer toward v = size (s, 1)/(1+s).

    The boundary parameter alpha fixes the characteristic slope r through
    gamma'(r) = alpha. North exits are expected when s > r.
    """
    from .env import replica_seed
    m, sigma = distribution_constants(dist)
    model = ClosedFormGamma(m, sigma)
    r = (sigma / (alpha - m)) ** 2
    if assert_north and s <= r:
        raise ConfigurationError(f"s = {s} is not above the characteristic r = {r}")
    xi = xi_of_alpha(m, sigma, alpha)
    W = int(round(size * s / (1 + s)))
    H = size - W
    sides, taus = [], []
    for k in range(replicas):
        cf = stationary_field(dist, xi, W, H, replica_seed(seed, k))
        side, tau = maximizer_exit(cf)
        sides.append(side)
        taus.append(tau)
    norm = np.array([t if sd == "north" else 0 for sd, t in zip(sides, taus)], float) / size
    tau_star = exit_tau_star(model, alpha, s)
    se = float(norm.std(ddof=1) / math.sqrt(len(norm))) if replicas > 1 else float("nan")
    return ExitReport(s, r, alpha, sides.count("north") / replicas, float(norm.mean()), se,
                      tau_star, tau_star / (1 + s), sides, taus)


def _quantile(kind: Kind, mean: float, u: np.ndarray) -> np.ndarray:
    if kind is Kind.EXPONENTIAL:
        return -mean * np.log1p(-u)
    # geometric on {1, 2, ...}: smallest k with 1 - q^k >= u
    q = 1.0 - 1.0 / mean
    k = np.ceil(np.log1p(-u) / math.log(q))
    return np.maximum(k, 1.0)


def sample_coupled_boundaries(dist: WeightDistribution, xis: Sequence[Sequence[float]],
                              length: Tuple[int, int], seed: int) -> List[BoundaryCocycle]:
    """Boundaries for several directions from shared uniforms.

    Each boundary has the exact marginal law. Because quantile functions are
    monotone in the mean, a smaller xi.e1 gives pointwise larger horizontal
    and smaller vertical increments.
    """
    if not dist.is_solvable:
        raise UnsupportedDistributionError(f"no exact cocycle law for {dist.kind.value} weights")
    m, sigma = distribution_constants(dist)
    rng = substream(seed, BOUNDARY_STREAM)
    u1 = rng.random(int(length[0]))
    u2 = rng.random(int(length[1]))
    out = []
    for xi in xis:
        mu1, mu2 = boundary_means(m, sigma, xi)
        out.append(BoundaryCocycle(tuple(map(float, xi)), tuple(length), _quantile(dist.kind, mu1, u1),
                                   _quantile(dist.kind, mu2, u2), (mu1, mu2), dist.kind))
    return out
