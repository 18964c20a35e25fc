"""Cocycle geodesics, coalescence, directedness and the competition interface."""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .env import WeightDistribution, WeightField, distribution_constants, replica_seed, sample_field
from .errors import DomainError, UnsupportedDistributionError
from .lpp import GeodesicPath
from .stationary import CocycleField, stationary_field
from .stats import ks_test


class TieRule(str, enum.Enum):
    """Step taken when B1(x) = B2(x)."""

    E1 = "e1"  # rightmost
    E2 = "e2"  # leftmost


@dataclass(frozen=True)
class CocyclePath:
    path: GeodesicPath
    truncated: bool  # stopped by max_len before leaving the bulk


def cocycle_geodesic(cf: CocycleField, start: Tuple[int, int], rule: TieRule = TieRule.E1,
                     max_len: Optional[int] = None) -> CocyclePath:
    """Follow the smaller of B1, B2 from ``start`` until the path leaves the bulk."""
    W, H = cf.shape
    if not (0 <= start[0] < W and 0 <= start[1] < H):
        raise DomainError(f"start {start} outside the {W}x{H} bulk")
    limit = W + H if max_len is None else int(max_len)
    pts = K.follow_min_gradient(cf.B1, cf.B2, int(start[0]), int(start[1]),
                                TieRule(rule) is TieRule.E2, limit)
    last = pts[-1]
    truncated = bool(last[0] < W and last[1] < H)
    return CocyclePath(GeodesicPath.from_points(pts, "leftmost" if rule is TieRule.E2 else "rightmost"),
                       truncated)


def first_meeting(a: np.ndarray, b: np.ndarray) -> Optional[int]:
    """Index into ``a`` of the first site shared with path ``b``, or None.

    Up-right paths meet on a common antidiagonal, so sites are matched by
    their level |x|_1.
    """
    la = a.sum(1)
    lb = b.sum(1)
    lo = max(la[0], lb[0])
    hi = min(la[-1], lb[-1])
    if hi < lo:
        return None
    ia = lo - la[0]
    ib = lo - lb[0]
    n = hi - lo + 1
    eq = np.all(a[ia:ia + n] == b[ib:ib + n], axis=1)
    k = np.flatnonzero(eq)
    return None if len(k) == 0 else int(ia + k[0])


def stay_together(a: np.ndarray, b: np.ndarray) -> bool:
    """Once the paths share a site, they agree until the shorter one ends."""
    k = first_meeting(a, b)
    if k is None:
        return True
    kb = int(a[k].sum() - b[0].sum())
    n = min(len(a) - k, len(b) - kb)
    return bool(np.all(a[k:k + n] == b[kb:kb + n]))


@dataclass
class CoalescenceReport:
    L: Tuple[int, ...]
    fraction: Tuple[float, ...]
    replicas: int
    separation: int


def coalescence_experiment(dist: WeightDistribution, xi: Sequence[float], L: Sequence[int],
                           separation: int, replicas: int, seed: int,
                           rule: TieRule = TieRule.E1) -> CoalescenceReport:
    """Fraction of replicas in which the cocycle geodesics from 0 and
    ``separation * e2`` meet before leaving the L x L box, for each L.

    One field on the largest box is built per replica; the smaller boxes are
    its lower-left corners, which are stationary fields in their own right
    (increments along the NE boundary of a sub-box lie on a down-right path).
    """
    Ls = tuple(sorted(int(x) for x in L))
    Lmax = Ls[-1]
    met = np.zeros((replicas, len(Ls)), bool)
    for r in range(replicas):
        cf = stationary_field(dist, xi, Lmax, Lmax, replica_seed(seed, r))
        a = cocycle_geodesic(cf, (0, 0), rule).path.points()
        b = cocycle_geodesic(cf, (0, separation), rule).path.points()
        if not stay_together(a, b):
            raise AssertionError("cocycle geodesics separated after meeting")
        k = first_meeting(a, b)
        for li, Lb in enumerate(Ls):
            met[r, li] = k is not None and a[k, 0] < Lb and a[k, 1] < Lb
    return CoalescenceReport(Ls, tuple(float(x) for x in met.mean(0)), replicas, separation)


@dataclass
class Direction:
    endpoint: Tuple[float, float]
    tail: Tuple[float, float]
    ci: float


def directedness(path: GeodesicPath, blocks: int = 10) -> Direction:
    """Endpoint direction x_N/|x_N|_1 and a tail estimate with a 95% CI.

    The tail estimate is the e1-fraction of the steps in the second half of
    the path; its CI comes from batch means over ``blocks`` tail blocks.
    """
    s = np.asarray(path.steps)
    if len(s) < 100:
        raise DomainError(f"path of length {len(s)} too short for a direction estimate")
    end = np.array(path.end, float) - np.array(path.start, float)
    tail = (s[len(s) // 2:] == 1).astype(float)
    bm = np.array([b.mean() for b in np.array_split(tail, blocks)])
    t1 = float(tail.mean())
    ci = float(1.96 * bm.std(ddof=1) / math.sqrt(blocks))
    return Direction(tuple(end / end.sum()), (t1, 1 - t1), ci)


@dataclass(frozen=True, eq=False)
class InterfaceTrace:
    """Dual-lattice path phi_0 = (1/2, 1/2), ..., phi_{n-1}; shape (n, 2)."""

    phi: np.ndarray = field(repr=False)
    variant: str  # "unique", "left" or "right"

    @property
    def terminal_direction(self) -> Tuple[float, float]:
        p = self.phi[-1]
        return float(p[0] / p.sum()), float(p[1] / p.sum())

    @property
    def theta(self) -> float:
        p = self.phi[-1]
        return math.atan2(p[1], p[0])


def interface_difference(fld: WeightField, n: int) -> np.ndarray:
    """D[l, k] = G_{e2,(k,l-k)} - G_{e1,(k,l-k)} for 1 <= l <= n; other entries NaN."""
    if n < 2:
        raise DomainError("competition interface needs n >= 2")
    if fld.width < n or fld.height < n:
        raise DomainError(f"field {fld.width}x{fld.height} does not cover level {n}")
    G1, G2 = K.interface_levels(np.ascontiguousarray(fld.values[:n, :n]), n)
    with np.errstate(invalid="ignore"):
        D = G2 - G1
    lv = np.arange(n + 1)[:, None]
    k = np.arange(n + 1)[None, :]
    D[(k > lv) | (lv == 0)] = np.nan
    return D


def _phi_from_levels(last_k: np.ndarray) -> np.ndarray:
    # at level l = 1..n the split is between (k, l-k) and (k+1, l-k-1)
    lv = np.arange(1, len(last_k) + 1)
    return np.stack([last_k + 0.5, lv - last_k - 0.5], axis=1)


def competition_interface(fld: WeightField, n: int, variant: str = "unique") -> InterfaceTrace:
    """Trace phi through levels 1..n.

    ``unique`` and ``right`` split after the last k with D > 0; ``left`` after
    the last k with D >= 0. The plateau D = 0 belongs to neither tree.
    """
    D = interface_difference(fld, n)
    last = []
    for l in range(1, n + 1):
        row = D[l, :l + 1]
        ok = row >= 0 if variant == "left" else row > 0
        last.append(int(np.flatnonzero(ok)[-1]))
    return InterfaceTrace(_phi_from_levels(np.array(last)), variant)


def interface_split(fld: WeightField, n: int) -> Tuple[int, int]:
    """(last k with D > 0, last k with D >= 0) on level n, rolling buffers only."""
    c1, c2 = K.interface_last_level(np.ascontiguousarray(fld.values[:n, :n]), n)
    with np.errstate(invalid="ignore"):
        D = c2 - c1
    return int(np.flatnonzero(D > 0)[-1]), int(np.flatnonzero(D >= 0)[-1])


def theta_of_split(k: int, n: int) -> float:
    return math.atan2(n - k - 0.5, k + 0.5)


def _sin_cos(t):
    # cos t as sin(pi/2 - t) keeps the law exactly symmetric about pi/4
    t = np.asarray(t, float)
    return np.sin(t), np.sin(np.pi / 2 - t)


def cif_cdf_exponential(t):
    sn, cs = _sin_cos(t)
    a = np.sqrt(sn)
    b = np.sqrt(cs)
    return a / (a + b)


def cif_cdf_geometric(t, p0: float, variant: str):
    sn, cs = _sin_cos(t)
    s = np.sqrt(sn)
    c = np.sqrt(np.maximum(cs, 0.0))
    r = math.sqrt(1 - p0)
    if variant == "right":
        return r * s / (r * s + c)
    if variant == "left":
        return s / (s + r * c)
    raise ValueError(f"unknown variant {variant!r}")


@dataclass
class CifLaw:
    thetas: Dict[str, np.ndarray]
    ks: Dict[str, float]
    cdfs: Dict[str, object]

    def empirical_cdf(self, variant: str, t):
        th = np.sort(self.thetas[variant])
        return np.searchsorted(th, t, side="right") / len(th)


def cif_direction_law(dist: WeightDistribution, n: int, replicas: int, seed: int,
                      threads: int = 1) -> CifLaw:
    if not dist.is_solvable:
        raise UnsupportedDistributionError("analytic interface law needs exponential or geometric weights")

    def one(r):
        fld = sample_field(dist, n, n, replica_seed(seed, r))
        return interface_split(fld, n)

    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            splits = list(ex.map(one, range(replicas)))
    else:
        splits = [one(r) for r in range(replicas)]
    splits = np.array(splits)
    right = np.array([theta_of_split(k, n) for k in splits[:, 0]])
    left = np.array([theta_of_split(k, n) for k in splits[:, 1]])
    if dist.is_integer_valued:
        p0 = 1.0 / dist.mean
        cdfs = {"right": lambda t: cif_cdf_geometric(t, p0, "right"),
                "left": lambda t: cif_cdf_geometric(t, p0, "left")}
        thetas = {"right": right, "left": left}
    else:
        cdfs = {"unique": cif_cdf_exponential}
        thetas = {"unique": right}
    ks = {k: ks_test(np.sort(v), cdfs[k]).statistic for k, v in thetas.items()}
    return CifLaw(thetas, ks, cdfs)
