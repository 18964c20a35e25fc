"""Busemann functions estimated as passage-time gradients toward a far target."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .duality import ClosedFormGamma, grad_gpp
from .env import Kind, WeightDistribution, WeightField, distribution_constants, replica_seed
from .errors import DomainError, UnsupportedDistributionError
from .lpp import lattice_point
from .stationary import boundary_means, stationary_field
from .stats import KSResult, ks_law

Rect = Tuple[int, int, int, int]


@dataclass(frozen=True, eq=False)
class BusemannSample:
    """Gradients of x -> G_{x, v} on ``window`` = (i0, j0, i1, j1), i1/j1 exclusive.

    ``B1[a, b] = G(x) - G(x + e1)`` and ``B2[a, b] = G(x) - G(x + e2)`` at
    x = (i0 + a, j0 + b); ``w`` holds the weights on the window.
    """

    xi: Tuple[float, float]
    n: int
    target: Tuple[int, int]
    window: Rect
    B1: np.ndarray = field(repr=False)
    B2: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    G: np.ndarray = field(repr=False)  # G_{x,v} on the window closure

    @property
    def means(self) -> Tuple[float, float]:
        return float(self.B1.mean()), float(self.B2.mean())

    @property
    def tilt(self) -> np.ndarray:
        return -np.array(self.means)

    def recovery_residual(self) -> float:
        return float(np.max(np.abs(np.minimum(self.B1, self.B2) - self.w)))

    def additivity_residual(self) -> float:
        # B1(x) + B2(x+e1) = B2(x) + B1(x+e2) on sites whose square fits
        lhs = self.B1[:-1, :-1] + self.B2[1:, :-1]
        rhs = self.B2[:-1, :-1] + self.B1[:-1, 1:]
        return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))))

    def path_increment(self, a: Tuple[int, int], b: Tuple[int, int]) -> float:
        """B(a, b) = G(a) - G(b) for window points a, b."""
        i0, j0 = self.window[:2]
        return float(self.G[a[0] - i0, a[1] - j0] - self.G[b[0] - i0, b[1] - j0])


def _window_ok(window: Rect, n: int):
    i0, j0, i1, j1 = window
    if i0 < 0 or j0 < 0 or i1 <= i0 or j1 <= j0:
        raise DomainError(f"bad window {window}")
    diam = (i1 - i0) + (j1 - j0)
    if diam > n / 10:
        raise DomainError(f"window diameter {diam} exceeds n/10 = {n / 10:g}; target too close")


def target_for(xi: Sequence[float], n: int, window: Rect, anchor: str = "center") -> Tuple[int, int]:
    """Target floor(n xi), measured from the window center or from its corner.

    Sites across the window see the target under slightly different
    directions; anchoring at the center cancels that shift to first order.
    """
    v = lattice_point(n, xi)
    if anchor == "corner":
        return v[0] + window[0], v[1] + window[1]
    if anchor != "center":
        raise DomainError(f"unknown anchor {anchor!r}")
    return v[0] + (window[0] + window[2]) // 2, v[1] + (window[1] + window[3]) // 2


def estimate_busemann(fld: WeightField, xi: Sequence[float], n: int, window: Rect,
                      anchor: str = "center") -> BusemannSample:
    _window_ok(window, n)
    v = target_for(xi, n, window, anchor)
    if v[0] >= fld.width or v[1] >= fld.height:
        raise DomainError(f"target {v} outside the {fld.width}x{fld.height} field")
    i0, j0, i1, j1 = window
    if i1 > v[0] or j1 > v[1]:
        raise DomainError("window not below-left of the target")
    Gt = K.reverse_table(fld.values, v[0], v[1])
    G = Gt[i0:i1 + 1, j0:j1 + 1].copy()
    B1 = G[:-1, :-1] - G[1:, :-1]
    B2 = G[:-1, :-1] - G[:-1, 1:]
    w = np.asarray(fld.values[i0:i1, j0:j1])
    return BusemannSample(tuple(map(float, xi)), n, v, tuple(window), B1, B2, w, G)


def field_for(dist: WeightDistribution, xi: Sequence[float], n: int, seed: int,
              window: Rect = (0, 0, 1, 1)) -> WeightField:
    from .env import sample_field
    v = target_for(xi, n, window)
    return sample_field(dist, v[0] + 1, v[1] + 1, seed)


@dataclass
class StabilityReport:
    n: int
    n2: int
    sign_agreement: float
    mean_abs_diff: Tuple[float, float]


def busemann_stability(fld: WeightField, xi: Sequence[float], n: int, n2: int, window: Rect) -> StabilityReport:
    """Compare gradients toward targets at distances n and n2 on one field."""
    a = estimate_busemann(fld, xi, n, window)
    b = estimate_busemann(fld, xi, n2, window)
    sa = np.sign(a.B1 - a.B2)
    sb = np.sign(b.B1 - b.B2)
    return StabilityReport(n, n2, float((sa == sb).mean()),
                           (float(np.abs(a.B1 - b.B1).mean()), float(np.abs(a.B2 - b.B2).mean())))


@dataclass
class ExactComparison:
    row: KSResult
    column: KSResult
    tilt: np.ndarray
    target_tilt: np.ndarray


def busemann_vs_exact(sample: BusemannSample, dist: WeightDistribution) -> ExactComparison:
    """KS of B1 along the bottom window row and B2 along the left column
    against the exact boundary laws, plus the tilt against -grad g_pp."""
    if not dist.is_solvable:
        raise UnsupportedDistributionError("exact Busemann laws need exponential or geometric weights")
    m, sigma = distribution_constants(dist)
    mu1, mu2 = boundary_means(m, sigma, sample.xi)
    law = WeightDistribution.exponential if dist.kind is Kind.EXPONENTIAL else WeightDistribution.geometric
    target = -grad_gpp(ClosedFormGamma(m, sigma), sample.xi)
    return ExactComparison(ks_law(sample.B1[:, 0], law(mu1)), ks_law(sample.B2[0, :], law(mu2)),
                           sample.tilt, target)


def replicated_means(dist: WeightDistribution, xi: Sequence[float], n: int, window: Rect,
                     replicas: int, seed: int) -> np.ndarray:
    """Window means (mean B1, mean B2) for independent fields; shape (replicas, 2)."""
    out = np.empty((replicas, 2))
    for r in range(replicas):
        fld = field_for(dist, xi, n, replica_seed(seed, r), window)
        out[r] = estimate_busemann(fld, xi, n, window).means
    return out


def direction_monotonicity_violation(fld: WeightField, xi: Sequence[float], zeta: Sequence[float],
                                     n: int, window: Rect) -> float:
    """Largest pointwise violation of B1(xi) >= B1(zeta), B2(xi) <= B2(zeta).

    For xi.e1 < zeta.e1 the target of zeta lies weakly right of and below
    that of xi, so the comparison holds site by site, not just on average.
    """
    a = estimate_busemann(fld, xi, n, window)
    b = estimate_busemann(fld, zeta, n, window)
    return float(max(0.0, (b.B1 - a.B1).max(), (a.B2 - b.B2).max()))


def centered_cocycle_max(dist: WeightDistribution, xi: Sequence[float], N: int, seed: int) -> float:
    """max over |x|_1 <= N of |B(0, x) - E B(0, x)| / N on an exact stationary field."""
    cf = stationary_field(dist, xi, N, N, seed)
    mu1, mu2 = cf.boundary.means
    i = np.arange(N + 1)[:, None]
    j = np.arange(N + 1)[None, :]
    F = (cf.G[0, 0] - cf.G) - (mu1 * i + mu2 * j)
    mask = (i + j) <= N
    return float(np.abs(F[mask]).max() / N)
