"""Local refinement with a separable quadratic model and a line search."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boxes import GOLDEN_SMALL

FD_REL_STEP = 1e-3
FALLBACK_STEP = 0.1
MAX_EXPANSIONS = 3
SHRINK_STEPS = 6


@dataclass
class LocalSearchResult:
    x: np.ndarray
    f: float
    steps: int
    evaluations: int


def _fd_model(evaluator, problem, x, f0):
    """Gradient and diagonal curvature of ``f`` at ``x`` from 3-point fits.

    Each coordinate is probed at ``x ± h``; at a bound the probes move to
    the inner side (``h`` and ``2h``). Returns the model and the best probe.
    """
    u, v = problem.lower, problem.upper
    n = x.size
    g = np.zeros(n)
    c = np.zeros(n)
    best_x, best_f = x, f0
    for i in range(n):
        h = FD_REL_STEP * (v[i] - u[i])
        if problem.integer_mask[i]:
            h = max(h, 1.0)
        offs = [h, -h]
        if x[i] + h > v[i]:
            offs = [-h, -2 * h]
        elif x[i] - h < u[i]:
            offs = [h, 2 * h]
        ts, fs = [], []
        for t in offs:
            y = x.copy()
            y[i] = np.clip(x[i] + t, u[i], v[i])
            t_eff = y[i] - x[i]
            if t_eff == 0.0 or any(t_eff == s for s in ts):
                continue
            fy = evaluator(y)
            ts.append(t_eff)
            fs.append(fy)
            if fy < best_f:
                best_x, best_f = y, fy
        if len(ts) == 1:
            g[i] = (fs[0] - f0) / ts[0]
        elif len(ts) == 2:
            (t1, t2), (f1, f2) = ts, fs
            a = np.array([[t1, 0.5 * t1 * t1], [t2, 0.5 * t2 * t2]])
            g[i], c[i] = np.linalg.solve(a, [f1 - f0, f2 - f0])
    return g, c, best_x, best_f


def _direction(problem, g, c):
    d = np.zeros_like(g)
    rng = problem.upper - problem.lower
    newton = c > 0
    d[newton] = -g[newton] / c[newton]
    other = ~newton & (g != 0)
    d[other] = -np.sign(g[other]) * FALLBACK_STEP * rng[other]
    return d


def _line_search(evaluator, problem, x, f0, d):
    """Best point along ``x + t d`` (clamped) from expansion then golden shrinking."""
    def point(t):
        return problem.clip(x + t * d)

    best_t, best_f = 0.0, f0
    t = 1.0
    ft = evaluator(point(t))
    if ft < best_f:
        best_t, best_f = t, ft
        for _ in range(MAX_EXPANSIONS):
            t *= 2.0
            y = point(t)
            if np.array_equal(y, point(best_t)):
                break
            ft = evaluator(y)
            if ft >= best_f:
                break
            best_t, best_f = t, ft
    else:
        lo, hi = 0.0, 1.0
        for _ in range(SHRINK_STEPS):
            t = lo + GOLDEN_SMALL * (hi - lo)
            ft = evaluator(point(t))
            if ft < best_f:
                best_t, best_f = t, ft
                break
            hi = t
    return point(best_t), best_f


def local_search(evaluator, problem, x, f, config) -> LocalSearchResult:
    """Refine ``(x, f)`` by model steps until progress stalls.

    A step builds the finite-difference model, moves along its descent
    direction and keeps the best point seen. The search stops after
    ``config.local_max_steps`` steps, when a step brings no improvement, or
    when a step improves the value by less than ``local_gamma`` relative to
    the value before it (absolute when that value is 0). The first step is
    exempt from the relative test.
    """
    start = evaluator.count
    x = np.asarray(x, dtype=float).copy()
    steps = 0
    gamma = config.local_gamma
    while steps < config.local_max_steps:
        f_prev = f
        g, c, bx, bf = _fd_model(evaluator, problem, x, f)
        d = _direction(problem, g, c)
        if np.any(d != 0):
            lx, lf = _line_search(evaluator, problem, x, f, d)
            if lf < bf:
                bx, bf = lx, lf
        steps += 1
        if not bf < f_prev:
            break
        x, f = np.asarray(bx, dtype=float).copy(), bf
        if steps > 1:
            scale = abs(f_prev) if f_prev != 0 else 1.0
            if abs(f - f_prev) < gamma * scale:
                break
    return LocalSearchResult(x, f, steps, evaluator.count - start)
