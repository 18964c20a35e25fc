"""Shape function on a single variable, its conjugate, and tilt/velocity duality.

``gamma(s) = g_pp(1, s)`` for s >= 0 and ``f(alpha) = sup_s {gamma(s) - s*alpha}``
for alpha > m. The gradient of g_pp at xi is (gamma'(s), f(gamma'(s))) with
s = xi1/xi2, and a tilt h is dual to xi when h = -grad + t(1, 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class ClosedFormGamma:
    """gamma(s) = m(1+s) + 2 sigma sqrt(s), the exponential/geometric shape."""

    m: float
    sigma: float

    def gamma(self, s: float) -> float:
        return self.m * (1.0 + s) + 2.0 * self.sigma * math.sqrt(s)

    def dgamma(self, s: float, side: int = +1) -> float:
        if s <= 0:
            return math.inf
        return self.m + self.sigma / math.sqrt(s)

    def f(self, alpha: float) -> float:
        # maximizer s* = (sigma / (alpha - m))^2 of gamma(s) - s*alpha
        u = alpha - self.m
        s = (self.sigma / u) ** 2
        return self.gamma(s) - s * alpha

    def s_of_alpha(self, alpha: float) -> Tuple[float, float]:
        s = (self.sigma / (alpha - self.m)) ** 2
        return s, s


def _upper_hull(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Indices of the least concave majorant's vertices (monotone chain)."""
    hull = []
    for k in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or below the chord a -> k
            if (y[b] - y[a]) * (x[k] - x[a]) <= (y[k] - y[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(k)
    return np.asarray(hull)


@dataclass(frozen=True)
class EmpiricalGamma:
    """Tabulated gamma made concave by its least concave majorant.

    Evaluation is linear interpolation between hull vertices, so gamma is
    concave and piecewise linear on [s[0], s[-1]]; the conjugate is then an
    exact maximum over vertices. ``s_grid[0]`` must be 0 (gamma(0) = m).
    """

    s_grid: Tuple[float, ...]
    values: Tuple[float, ...]
    hull_s: np.ndarray = field(init=False, repr=False)
    hull_g: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        s = np.asarray(self.s_grid, float)
        g = np.asarray(self.values, float)
        if s.ndim != 1 or s.shape != g.shape or len(s) < 3:
            raise ParameterError("need matching 1-D s-grid and values with >= 3 points")
        if s[0] != 0 or np.any(np.diff(s) <= 0):
            raise ParameterError("s-grid must start at 0 and increase strictly")
        h = _upper_hull(s, g)
        object.__setattr__(self, "hull_s", s[h])
        object.__setattr__(self, "hull_g", g[h])

    @property
    def m(self) -> float:
        return float(self.hull_g[0])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.hull_g) / np.diff(self.hull_s)

    def gamma(self, s: float) -> float:
        if s > self.hull_s[-1]:
            raise DomainError(f"s={s} beyond tabulated range {self.hull_s[-1]}")
        return float(np.interp(s, self.hull_s, self.hull_g))

    def dgamma(self, s: float, side: int = +1) -> float:
        """One-sided derivative of the piecewise-linear majorant."""
        sl = self.slopes
        k = np.searchsorted(self.hull_s, s, side="right" if side > 0 else "left") - 1
        if side > 0:
            if k >= len(sl):
                raise DomainError("right derivative at the end of the table")
            return float(sl[max(k, 0)])
        if k < 0 or s <= self.hull_s[0]:
            return math.inf
        return float(sl[min(k, len(sl) - 1)])

    def f(self, alpha: float) -> float:
        # sup of a concave piecewise-linear function minus a line: at a vertex.
        # Valid for alpha >= last slope; beyond the table gamma is unknown.
        if alpha < self.slopes[-1]:
            raise DomainError(f"alpha={alpha} below the last tabulated slope {self.slopes[-1]:.4g}")
        return float(np.max(self.hull_g - self.hull_s * alpha))

    def s_of_alpha(self, alpha: float) -> Tuple[float, float]:
        """Range of s whose super-gradient interval contains alpha."""
        vals = self.hull_g - self.hull_s * alpha
        best = vals.max()
        idx = np.flatnonzero(vals >= best - 1e-12 * max(1.0, abs(best)))
        return float(self.hull_s[idx[0]]), float(self.hull_s[idx[-1]])


GammaModel = object  # ClosedFormGamma | EmpiricalGamma


def gamma(model, s: float) -> float:
    if s < 0:
        raise DomainError(f"gamma is defined for s >= 0, got {s}")
    return model.gamma(s)


def conjugate_f(model, alpha: float) -> float:
    if not alpha > model.m:
        raise DomainError(f"f diverges for alpha <= m = {model.m}")
    return model.f(alpha)


def gamma_from_conjugate(model, s: float) -> float:
    """inf over alpha > m of f(alpha) + s*alpha, by bounded scalar minimization."""
    m = model.m
    if isinstance(model, EmpiricalGamma):
        alphas = model.slopes
        alphas = alphas[alphas > m]
        return float(min(model.f(a) + s * a for a in alphas))
    a0 = model.dgamma(s) if s > 0 else m + 1e6
    res = optimize.minimize_scalar(lambda a: model.f(a) + s * a,
                                   bracket=(m + (a0 - m) / 2, a0, m + 2 * (a0 - m)),
                                   tol=1e-12)
    return float(res.fun)


def _s_of_xi(xi: Sequence[float]) -> float:
    if not (xi[0] > 0 and xi[1] > 0):
        raise DomainError(f"direction {tuple(xi)} is on the boundary of U")
    return xi[0] / xi[1]


def gpp(model, xi: Sequence[float]) -> float:
    """g_pp by 1-homogeneity: xi2 * gamma(xi1/xi2)."""
    if xi[1] == 0:
        return model.m * xi[0]
    return xi[1] * model.gamma(xi[0] / xi[1])


def grad_gpp(model, xi: Sequence[float], side: int = +1) -> np.ndarray:
    s = _s_of_xi(xi)
    a = model.dgamma(s, side)
    return np.array([a, model.f(a)])


def xi_of_s(s: float) -> Tuple[float, float]:
    return s / (1.0 + s), 1.0 / (1.0 + s)


@dataclass
class DualityRecord:
    xi: Tuple[float, float]
    s: float
    alpha: float
    f_alpha: float
    grad: np.ndarray
    h: np.ndarray
    t: float
    segment: Tuple[Tuple[float, float], Tuple[float, float]]


def alpha_of_tilt(model, h: Sequence[float]) -> Tuple[float, float]:
    """Unique (alpha, t) with h = -(alpha, f(alpha)) + t(1, 1).

    alpha - f(alpha) = h2 - h1 is strictly increasing from -inf to +inf.
    """
    m = model.m
    d = float(h[1] - h[0])
    phi = lambda a: a - model.f(a) - d
    scale = max(1.0, abs(m), abs(d))
    lo = m + scale
    while phi(lo) > 0:
        lo = m + (lo - m) / 16
    hi = m + scale
    while phi(hi) < 0:
        hi = m + 4 * (hi - m)
    if isinstance(model, EmpiricalGamma):
        lo = max(lo, float(model.slopes[-1]))
    alpha = optimize.brentq(phi, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    return alpha, float(h[0]) + alpha


def tilt_velocity(model, h: Sequence[float]) -> DualityRecord:
    alpha, t = alpha_of_tilt(model, h)
    fa = model.f(alpha)
    s_lo, s_hi = model.s_of_alpha(alpha)
    xi_lo, xi_hi = xi_of_s(s_lo), xi_of_s(s_hi)
    s = 0.5 * (s_lo + s_hi)
    return DualityRecord(xi_of_s(s), s, alpha, fa, np.array([alpha, fa]),
                         np.asarray(h, float), t, (xi_lo, xi_hi))


def tilt_of_direction(model, xi: Sequence[float], t: float = 0.0, side: int = +1) -> np.ndarray:
    return -grad_gpp(model, xi, side) + t * np.ones(2)


def point_to_line_limit(model, h: Sequence[float]) -> float:
    """g_pl(h) = t(h) from the tilt decomposition."""
    return alpha_of_tilt(model, h)[1]


def point_to_line_sup(model, h: Sequence[float], grid: int = 20001) -> float:
    """sup over xi in U of g_pp(xi) + h.xi on a grid refined by a bounded search."""
    a = np.linspace(0.0, 1.0, grid)
    vals = np.array([gpp(model, (x, 1 - x)) + h[0] * x + h[1] * (1 - x) for x in a])
    k = int(np.argmax(vals))
    lo, hi = a[max(k - 1, 0)], a[min(k + 1, grid - 1)]
    res = optimize.minimize_scalar(lambda x: -(gpp(model, (x, 1 - x)) + h[0] * x + h[1] * (1 - x)),
                                   bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
    return float(max(vals[k], -res.fun))


def secant_derivatives(s_grid: Sequence[float], values: Sequence[float]):
    """Symmetric secant slopes of tabulated gamma with an O(ds) error bar."""
    s = np.asarray(s_grid, float)
    g = np.asarray(values, float)
    d = (g[2:] - g[:-2]) / (s[2:] - s[:-2])
    err = np.abs(np.diff(np.diff(g) / np.diff(s)))  # slope jump across each node
    return s[1:-1], d, err
