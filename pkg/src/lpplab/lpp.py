"""Last-passage times, increment fields, geodesics and shape estimation.

Passage times follow the convention that the weight of the final vertex of a
path is excluded; ``Convention.INCLUDE_LAST`` instead drops the weight of the
starting vertex and keeps the final one.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels as K
from .env import WeightDistribution, WeightField, distribution_constants, replica_seed, sample_field
from .errors import DomainError, InsufficientMarginError, OrderingError, ParameterError

Point = Tuple[int, int]
Rect = Tuple[int, int, int, int]  # i0, j0, i1, j1 with i1, j1 exclusive


class Convention(str, enum.Enum):
    EXCLUDE_LAST = "exclude-last"
    INCLUDE_LAST = "include-last"


class Step(enum.IntEnum):
    SOURCE = K.SOURCE
    E1 = K.FROM_E1
    E2 = K.FROM_E2
    TIE = K.TIE
    UNREACHED = K.UNREACHED


@dataclass(frozen=True, eq=False)
class PassageTable:
    """Passage values from ``source`` to every site of ``rect``.

    ``G`` and ``step`` are indexed relative to the rectangle origin; sites not
    above-right of the source hold ``-inf`` / ``Step.UNREACHED``. ``step``
    records which predecessor (v - e1, v - e2 or both) attains the maximum.
    """

    field: WeightField = dc_field(repr=False)
    source: Point
    rect: Rect
    G: np.ndarray = dc_field(repr=False)
    step: np.ndarray = dc_field(repr=False)
    convention: Convention = Convention.EXCLUDE_LAST

    def local(self, v: Point) -> Point:
        i0, j0, i1, j1 = self.rect
        if not (i0 <= v[0] < i1 and j0 <= v[1] < j1):
            raise DomainError(f"{v} outside rectangle {self.rect}")
        return v[0] - i0, v[1] - j0

    def value(self, v: Point) -> float:
        return float(self.G[self.local(v)])


def _check_rect(fld: WeightField, rect: Optional[Rect]) -> Rect:
    if rect is None:
        return 0, 0, fld.width, fld.height
    i0, j0, i1, j1 = rect
    if not (0 <= i0 < i1 <= fld.width and 0 <= j0 < j1 <= fld.height):
        raise DomainError(f"rectangle {rect} not inside {fld.width}x{fld.height} field")
    return rect


def compute_passage_table(fld: WeightField, source: Point = (0, 0), rect: Optional[Rect] = None,
                          convention: Convention = Convention.EXCLUDE_LAST) -> PassageTable:
    rect = _check_rect(fld, rect)
    i0, j0, i1, j1 = rect
    if not (i0 <= source[0] < i1 and j0 <= source[1] < j1):
        raise DomainError(f"source {source} outside rectangle {rect}")
    w = np.ascontiguousarray(fld.values[i0:i1, j0:j1])
    si, sj = source[0] - i0, source[1] - j0
    G, step = K.forward_table(w, si, sj)
    if Convention(convention) is Convention.INCLUDE_LAST:
        reach = step != K.UNREACHED
        G = np.where(reach, G - w[si, sj] + w, G)
        G[si, sj] = 0.0
    return PassageTable(fld, tuple(source), rect, G, step, Convention(convention))


def passage_time(fld: WeightField, source: Point, target: Point) -> float:
    """G between two points, rolling buffer (no table kept)."""
    if source[0] > target[0] or source[1] > target[1]:
        raise OrderingError(f"{source} is not <= {target}")
    w = np.ascontiguousarray(fld.values[source[0]:target[0] + 1, source[1]:target[1] + 1])
    return float(K.corner_passage_time(w))


def passage_to_target(fld: WeightField, v: Point, origin: Point = (0, 0)) -> np.ndarray:
    """Array of G_{x,v} for origin <= x <= v, indexed relative to ``origin``."""
    if not (0 <= origin[0] <= v[0] < fld.width and 0 <= origin[1] <= v[1] < fld.height):
        raise DomainError(f"target {v} / origin {origin} outside field")
    w = np.ascontiguousarray(fld.values[origin[0]:v[0] + 1, origin[1]:v[1] + 1])
    return K.reverse_table(w, v[0] - origin[0], v[1] - origin[1])


def point_to_line(fld: WeightField, h: Sequence[float], n: int) -> float:
    """max over n-step up-right paths from 0 of (sum of weights, last excluded) + h.x_n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if fld.width < n + 1 or fld.height < n + 1:
        raise DomainError(f"field {fld.width}x{fld.height} does not cover level {n}")
    lv = K.level_values(np.ascontiguousarray(fld.values[: n + 1, : n + 1]), n)
    k = np.arange(n + 1)
    return float(np.max(lv + h[0] * k + h[1] * (n - k)))


@dataclass(frozen=True, eq=False)
class IncrementField:
    """I[x] = G_{x,v} - G_{x+e1,v} and J[y] = G_{y,v} - G_{y+e2,v}.

    Arrays are indexed relative to ``origin``; I has shape (vi, vj+1) and J
    shape (vi+1, vj) in local coordinates.
    """

    v: Point
    origin: Point
    G: np.ndarray = dc_field(repr=False)
    I: np.ndarray = dc_field(repr=False)
    J: np.ndarray = dc_field(repr=False)

    def crossing_residual(self) -> float:
        # I(x) + J(x+e1) - J(x) - I(x+e2) over x <= v - e1 - e2
        r = self.I[:, :-1] + self.J[1:, :] - self.J[:-1, :] - self.I[:, 1:]
        return float(np.max(np.abs(r))) if r.size else 0.0


def _increment_field(fld: WeightField, v: Point, origin: Point) -> IncrementField:
    Gt = passage_to_target(fld, v, origin)
    return IncrementField(tuple(v), tuple(origin), Gt, Gt[:-1, :] - Gt[1:, :], Gt[:, :-1] - Gt[:, 1:])


def increments(table: PassageTable, v: Point) -> IncrementField:
    """Gradients toward a fixed target v, by a reversed sweep from v."""
    i0, j0, i1, j1 = table.rect
    table.local(v)
    return _increment_field(table.field, v, (i0, j0))


def increment_monotonicity(table: PassageTable, v: Point) -> float:
    """Largest violation of I_{x,v+e2} >= I_{x,v} >= I_{x,v+e1} and
    J_{y,v+e2} <= J_{y,v} <= J_{y,v+e1} (0.0 when all hold)."""
    i0, j0, i1, j1 = table.rect
    if v[0] + 1 >= i1 or v[1] + 1 >= j1:
        raise InsufficientMarginError(f"{v} needs v+e1 and v+e2 inside {table.rect}")
    o = (i0, j0)
    base = _increment_field(table.field, v, o)
    up = _increment_field(table.field, (v[0], v[1] + 1), o)
    right = _increment_field(table.field, (v[0] + 1, v[1]), o)
    a, b = base.I.shape
    c, d = base.J.shape
    viol = [
        base.I - up.I[:a, :b],
        right.I[:a, :b] - base.I,
        up.J[:c, :d] - base.J,
        base.J - right.J[:c, :d],
    ]
    return float(max(0.0, max((x.max() for x in viol if x.size), default=0.0)))


@dataclass(frozen=True)
class GeodesicPath:
    start: Point
    steps: Tuple[int, ...]  # 1 for e1, 2 for e2
    tiebreak: str = "leftmost"

    def points(self) -> np.ndarray:
        pts = np.empty((len(self.steps) + 1, 2), dtype=np.int64)
        pts[0] = self.start
        if self.steps:
            s = np.asarray(self.steps)
            pts[1:, 0] = self.start[0] + np.cumsum(s == 1)
            pts[1:, 1] = self.start[1] + np.cumsum(s == 2)
        return pts

    @property
    def end(self) -> Point:
        p = self.points()[-1]
        return int(p[0]), int(p[1])

    def weight(self, fld: WeightField) -> float:
        """Path weight with the final vertex excluded."""
        p = self.points()[:-1]
        return float(fld.values[p[:, 0], p[:, 1]].sum())

    @classmethod
    def from_points(cls, pts, tiebreak: str = "leftmost") -> "GeodesicPath":
        pts = np.asarray(pts)
        d = np.diff(pts, axis=0)
        steps = tuple(int(s) for s in np.where(d[:, 0] == 1, 1, 2))
        return cls((int(pts[0, 0]), int(pts[0, 1])), steps, tiebreak)


def backtrack_geodesic(table: PassageTable, frm: Point, to: Point, tiebreak: str = "leftmost") -> GeodesicPath:
    """Geodesic between two points of the table's rectangle.

    ``leftmost`` returns the geodesic weakly left of all others (e2 preferred
    at the first step of any tie), ``rightmost`` the mirror image.
    """
    if tiebreak not in ("leftmost", "rightmost"):
        raise ParameterError(f"unknown tiebreak {tiebreak!r}")
    if frm[0] > to[0] or frm[1] > to[1]:
        raise OrderingError(f"{frm} is not <= {to}")
    if tuple(frm) != table.source:
        table = compute_passage_table(table.field, frm, table.rect, table.convention)
    si, sj = table.local(frm)
    i, j = table.local(to)
    st = table.step
    rev: List[int] = []
    # walking backwards: preferring the e1 predecessor keeps the path as far
    # left as possible, preferring e2 keeps it right
    prefer = K.FROM_E1 if tiebreak == "leftmost" else K.FROM_E2
    while (i, j) != (si, sj):
        s = st[i, j]
        if s == K.TIE:
            s = prefer
        if s == K.FROM_E1:
            rev.append(1)
            i -= 1
        else:
            rev.append(2)
            j -= 1
    return GeodesicPath(tuple(frm), tuple(reversed(rev)), tiebreak)


def lattice_point(n: int, xi: Sequence[float]) -> Point:
    """floor(n xi) coordinatewise; a 1e-9 guard absorbs binary rounding of n*xi."""
    return int(math.floor(n * xi[0] + 1e-9)), int(math.floor(n * xi[1] + 1e-9))


def gpp_closed_form(m: float, sigma: float, xi: Sequence[float]) -> float:
    return m * (xi[0] + xi[1]) + 2.0 * sigma * math.sqrt(xi[0] * xi[1])


@dataclass
class ShapeRow:
    xi: Tuple[float, float]
    n: int
    values: np.ndarray = dc_field(repr=False)
    target: Optional[float] = None

    @property
    def mean(self) -> float:
        return float(np.mean(self.values))

    @property
    def stderr(self) -> float:
        k = len(self.values)
        return float(np.std(self.values, ddof=1) / math.sqrt(k)) if k > 1 else float("nan")

    @property
    def ci(self) -> Tuple[float, float]:
        return self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr


@dataclass
class ShapeEstimate:
    dist: WeightDistribution
    rows: List[ShapeRow]


def _one_shape_sample(dist, v, seed, convention=Convention.EXCLUDE_LAST):
    fld = sample_field(dist, v[0] + 1, v[1] + 1, seed)
    g = K.corner_passage_time(fld.values)
    if convention is Convention.INCLUDE_LAST:
        g += fld.values[v] - fld.values[0, 0]
    return g


def estimate_shape(dist: WeightDistribution, directions: Sequence[Sequence[float]], n: int,
                   replicas: int, seed: int, threads: int = 1,
                   convention: Convention = Convention.EXCLUDE_LAST) -> ShapeEstimate:
    """Replica means of n^-1 G_{0, floor(n xi)} with the closed-form target when solvable."""
    if n < 32:
        raise ParameterError("shape estimation needs n >= 32")
    rows = []
    for d, xi in enumerate(directions):
        xi = (float(xi[0]), float(xi[1]))
        if not (xi[0] > 0 and xi[1] > 0):
            raise DomainError(f"direction {xi} is not strictly interior")
        v = lattice_point(n, xi)
        seeds = [replica_seed(seed, d * 1_000_003 + r) for r in range(replicas)]
        with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
            vals = np.fromiter(ex.map(lambda s: _one_shape_sample(dist, v, s, Convention(convention)), seeds), float, replicas)
        target = None
        if dist.is_solvable:
            m, sigma = distribution_constants(dist)
            target = gpp_closed_form(m, sigma, xi)
        rows.append(ShapeRow(xi, n, vals / n, target))
    return ShapeEstimate(dist, rows)
