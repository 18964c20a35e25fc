"""I.i.d. weight environments on a rectangle of the planar lattice.

Arrays are indexed ``values[i, j]`` with ``i`` the e1-coordinate and ``j``
the e2-coordinate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import CapacityError, MissingMomentsError, ParameterError

DEFAULT_MEMORY_BUDGET = 2 * 1024**3


class Kind(str, enum.Enum):
    EXPONENTIAL = "exp"
    GEOMETRIC = "geom"
    BERNOULLI_MAX = "bmax"
    CUSTOM = "custom"


@dataclass(frozen=True)
class WeightDistribution:
    """Law of a single weight.

    ``mean`` is the parameter for the exponential and geometric laws. For
    ``BERNOULLI_MAX`` the weight equals 1 with probability ``p1`` and is
    otherwise uniform on ``sub_law = (low, high)`` with ``high < 1``. For
    ``CUSTOM`` weights are resampled uniformly from ``values``; moments have
    to be given explicitly.
    """

    kind: Kind
    mean: Optional[float] = None
    variance: Optional[float] = None
    p1: Optional[float] = None
    sub_law: Tuple[float, float] = (0.0, 0.5)
    values: Optional[Tuple[float, ...]] = None

    @classmethod
    def exponential(cls, mean: float = 1.0) -> "WeightDistribution":
        return cls(Kind.EXPONENTIAL, mean=float(mean)).validated()

    @classmethod
    def geometric(cls, mean: float = 2.0) -> "WeightDistribution":
        return cls(Kind.GEOMETRIC, mean=float(mean)).validated()

    @classmethod
    def bernoulli_max(cls, p1: float, sub_law: Tuple[float, float] = (0.0, 0.5)) -> "WeightDistribution":
        return cls(Kind.BERNOULLI_MAX, p1=float(p1), sub_law=tuple(map(float, sub_law))).validated()

    @classmethod
    def custom(cls, values: Sequence[float], mean: Optional[float] = None,
               variance: Optional[float] = None) -> "WeightDistribution":
        return cls(Kind.CUSTOM, mean=mean, variance=variance,
                   values=tuple(float(v) for v in values)).validated()

    def validated(self) -> "WeightDistribution":
        k = self.kind
        if k is Kind.EXPONENTIAL:
            if self.mean is None or not self.mean > 0:
                raise ParameterError(f"exponential mean must be > 0, got {self.mean}")
        elif k is Kind.GEOMETRIC:
            # m = 1 is the degenerate point mass (variance m(m-1) = 0)
            if self.mean is None or not self.mean > 1:
                raise ParameterError(f"geometric mean must be > 1, got {self.mean}")
        elif k is Kind.BERNOULLI_MAX:
            if self.p1 is None or not 0 < self.p1 < 1:
                raise ParameterError(f"p1 must lie in (0, 1), got {self.p1}")
            lo, hi = self.sub_law
            if not lo < hi < 1:
                raise ParameterError(f"sub_law support must satisfy low < high < 1, got {self.sub_law}")
        elif k is Kind.CUSTOM:
            if not self.values:
                raise ParameterError("custom distribution needs at least one value")
            if self.variance is not None and not self.variance > 0:
                raise ParameterError("custom variance must be > 0")
        return self

    @property
    def is_solvable(self) -> bool:
        return self.kind in (Kind.EXPONENTIAL, Kind.GEOMETRIC)

    @property
    def is_integer_valued(self) -> bool:
        return self.kind is Kind.GEOMETRIC

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        k = self.kind
        if k is Kind.EXPONENTIAL:
            return rng.exponential(self.mean, size)
        if k is Kind.GEOMETRIC:
            return rng.geometric(1.0 / self.mean, size).astype(np.float64)
        if k is Kind.BERNOULLI_MAX:
            # both uniforms are always drawn so that fields with different p1
            # but the same seed are monotonically coupled
            u = rng.random(size)
            lo, hi = self.sub_law
            sub = rng.uniform(lo, hi, size)
            return np.where(u < self.p1, 1.0, sub)
        vals = np.asarray(self.values, dtype=np.float64)
        return vals[rng.integers(0, len(vals), size)]

    def cdf(self, x):
        """Distribution function F(x) = P(w <= x)."""
        x = np.asarray(x, dtype=np.float64)
        k = self.kind
        if k is Kind.EXPONENTIAL:
            return np.where(x > 0, -np.expm1(-np.maximum(x, 0) / self.mean), 0.0)
        if k is Kind.GEOMETRIC:
            q = 1.0 - 1.0 / self.mean
            fl = np.floor(x)
            return np.where(fl >= 1, 1.0 - q ** np.maximum(fl, 0), 0.0)
        if k is Kind.BERNOULLI_MAX:
            lo, hi = self.sub_law
            sub = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
            return np.where(x >= 1, 1.0, (1 - self.p1) * sub)
        vals = np.sort(np.asarray(self.values))
        return np.searchsorted(vals, x, side="right") / len(vals)

    def left_cdf(self, x):
        """Left limit F(x-) = P(w < x); differs from ``cdf`` only at atoms."""
        x = np.asarray(x, dtype=np.float64)
        k = self.kind
        if k is Kind.GEOMETRIC:
            return self.cdf(np.ceil(x) - 1.0)
        if k is Kind.BERNOULLI_MAX:
            lo, hi = self.sub_law
            sub = np.clip((x - lo) / (hi - lo), 0.0, 1.0)
            return np.where(x > 1, 1.0, (1 - self.p1) * sub)
        if k is Kind.CUSTOM:
            vals = np.sort(np.asarray(self.values))
            return np.searchsorted(vals, x, side="left") / len(vals)
        return self.cdf(x)


def distribution_constants(dist: WeightDistribution) -> Tuple[float, float]:
    """Analytic mean and standard deviation of one weight."""
    k = dist.kind
    if k is Kind.EXPONENTIAL:
        return dist.mean, dist.mean
    if k is Kind.GEOMETRIC:
        m = dist.mean
        return m, math.sqrt(m * (m - 1.0))
    if k is Kind.BERNOULLI_MAX:
        p, (a, b) = dist.p1, dist.sub_law
        mean = p + (1 - p) * (a + b) / 2
        second = p + (1 - p) * (a * a + a * b + b * b) / 3
        return mean, math.sqrt(second - mean * mean)
    if dist.mean is None or dist.variance is None:
        raise MissingMomentsError("custom distribution needs explicit mean and variance")
    return float(dist.mean), math.sqrt(dist.variance)


def replica_seed(master: int, index: int) -> int:
    """64-bit seed of replica ``index`` under ``master``; independent of scheduling."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(int(index),))
    return int(ss.generate_state(1, np.uint64)[0])


def substream(seed: int, tag: int) -> np.random.Generator:
    """Generator for a named sub-stream of ``seed`` (e.g. bulk vs boundary draws)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(int(tag),)))


@dataclass(frozen=True, eq=False)
class WeightField:
    width: int
    height: int
    values: np.ndarray = field(repr=False)
    seed: Optional[int] = None
    distribution: Optional[WeightDistribution] = None

    def __post_init__(self):
        if self.values.shape != (self.width, self.height):
            raise ParameterError(f"values shape {self.values.shape} != {(self.width, self.height)}")
        self.values.setflags(write=False)

    @classmethod
    def from_array(cls, values, distribution: Optional[WeightDistribution] = None) -> "WeightField":
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ParameterError("weight array must be two-dimensional")
        return cls(arr.shape[0], arr.shape[1], arr, None, distribution)

    @classmethod
    def constant(cls, width: int, height: int, c: float) -> "WeightField":
        return cls.from_array(np.full((width, height), float(c)))

    def __getitem__(self, idx):
        return self.values[idx]

    def transpose(self) -> "WeightField":
        return WeightField(self.height, self.width, self.values.T.copy(), self.seed, self.distribution)


def sample_field(dist: WeightDistribution, width: int, height: int, seed: int,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET) -> WeightField:
    """Draw an i.i.d. field; the result depends only on (dist, width, height, seed)."""
    dist.validated()
    if width < 1 or height < 1:
        raise ParameterError(f"field dimensions must be >= 1, got {width}x{height}")
    if width * height * 8 > memory_budget:
        raise CapacityError(f"{width}x{height} field needs {width * height * 8} bytes "
                            f"> budget {memory_budget}")
    rng = np.random.default_rng(int(seed))
    values = dist.sample(rng, (width, height))
    return WeightField(width, height, values, int(seed), dist)
