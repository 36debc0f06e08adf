"""Small deterministic 1-d minimizers shared by the bound constructors."""

from __future__ import annotations

import math
from typing import Callable

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-6,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Golden-section minimum of f on [lo, hi]; returns (argmin, min).

    Assumes unimodality on the bracket; the endpoints are also evaluated so a
    boundary minimum is never missed.
    """
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) <= tol * (abs(a) + abs(b) + 1e-30):
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    candidates = [(f(lo), lo), (f(hi), hi), (fc, c), (fd, d)]
    best_val, best_x = min(candidates, key=lambda t: (t[0], t[1]))
    return best_x, best_val


def grid_seeded_log_min(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    grid_points: int = 20,
    tol: float = 1e-4,
) -> tuple[float, float]:
    """Minimize f over [lo, hi] (lo > 0): coarse log-spaced grid, then a
    golden-section refinement in log space around the best grid cell.
    """
    if not 0.0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    log_lo, log_hi = math.log(lo), math.log(hi)
    step = (log_hi - log_lo) / (grid_points - 1)
    grid = [log_lo + i * step for i in range(grid_points)]
    values = [f(math.exp(g)) for g in grid]
    i_best = min(range(grid_points), key=lambda i: (values[i], i))
    a = grid[max(i_best - 1, 0)]
    b = grid[min(i_best + 1, grid_points - 1)]
    x_log, val = golden_section_min(lambda g: f(math.exp(g)), a, b, tol=tol)
    if values[i_best] < val:
        return math.exp(grid[i_best]), values[i_best]
    return math.exp(x_log), val
