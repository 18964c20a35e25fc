"""Exhaustive reference computations for small grids.

These enumerate paths explicitly and share no code with the dynamic
programs, so agreement between the two is a meaningful check.
"""
from __future__ import annotations

from itertools import combinations
from typing import Iterator, List, Tuple

import numpy as np


def up_right_paths(start: Tuple[int, int], end: Tuple[int, int]) -> Iterator[np.ndarray]:
    """Every up-right lattice path from start to end as an array of sites."""
    a, b = end[0] - start[0], end[1] - start[1]
    if a < 0 or b < 0:
        return
    n = a + b
    for e1_at in combinations(range(n), a):
        steps = np.full(n, 2)
        steps[list(e1_at)] = 1
        pts = np.empty((n + 1, 2), dtype=np.int64)
        pts[0] = start
        pts[1:, 0] = start[0] + np.cumsum(steps == 1)
        pts[1:, 1] = start[1] + np.cumsum(steps == 2)
        yield pts


def path_weight(w: np.ndarray, pts: np.ndarray) -> float:
    """Sum of weights along the path, last vertex excluded."""
    p = pts[:-1]
    return float(w[p[:, 0], p[:, 1]].sum())


def optimal_paths(w: np.ndarray, start, end) -> Tuple[float, List[np.ndarray]]:
    best = -np.inf
    arg: List[np.ndarray] = []
    for pts in up_right_paths(start, end):
        s = path_weight(w, pts)
        if s > best:
            best, arg = s, [pts]
        elif s == best:
            arg.append(pts)
    return best, arg


def brute_passage(w: np.ndarray, start, end) -> float:
    return optimal_paths(w, start, end)[0]


def first_steps_of_optima(w: np.ndarray, end) -> set:
    """Set of first steps (1 for e1, 2 for e2) over all geodesics 0 -> end."""
    _, arg = optimal_paths(w, (0, 0), end)
    return {1 if p[1, 0] == 1 else 2 for p in arg}


def is_weakly_left(p: np.ndarray, q: np.ndarray) -> bool:
    """p lies weakly above-left of q: on every level its e1-coordinate is <=."""
    return bool(np.all(p[:, 0] <= q[:, 0]))
