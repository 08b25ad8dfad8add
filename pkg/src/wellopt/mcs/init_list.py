"""Initialization lists: fixed formulas and the line-search variant."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..core import Evaluator
from ..errors import BudgetExhausted, MissingGuess
from .boxes import GOLDEN_SMALL
from .config import (BOUNDARY_GUESS, BOUNDARY_MID, GUESS_STRATEGIES, INTERIOR, INTERIOR_GUESS,
                     LINE_SEARCH, McsConfig)

GUESS_MARGIN = 1e-6


@dataclass
class InitializationList:
    """Per-coordinate sorted list points and the incumbent to start from.

    ``start_index[i]`` is the position of ``start[i]`` in ``points[i]`` when
    it belongs to the list, else -1. ``values`` caches objective values of
    list points gathered while the list was built (line-search variant).
    """

    points: list
    start: np.ndarray
    start_index: list
    values: Optional[list] = None
    evaluations: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def lengths(self):
        return [len(p) for p in self.points]


def _clamp_guess(x0, u, v):
    w = v - u
    return np.clip(x0, u + GUESS_MARGIN * w, v - GUESS_MARGIN * w)


def _sorted_list(values, start_value):
    pts = np.unique(np.asarray(values, dtype=float))
    idx = np.flatnonzero(pts == start_value)
    return pts, int(idx[0]) if idx.size else -1


def build_init_list(problem, config: McsConfig, evaluator: Evaluator = None) -> InitializationList:
    """Initialization list for the configured strategy.

    The line-search strategy spends objective evaluations and therefore
    needs ``evaluator``; the formula-based strategies evaluate nothing.
    """
    u, v = problem.lower, problem.upper
    strategy = config.init_strategy
    if strategy == LINE_SEARCH:
        if evaluator is None:
            evaluator = Evaluator(problem)
        return line_search_init(problem, config, evaluator)
    x0 = config.initial_guess
    if x0 is None and strategy in GUESS_STRATEGIES:
        x0 = problem.initial_guess
    if strategy in GUESS_STRATEGIES and x0 is None:
        raise MissingGuess(f"strategy {strategy!r} requires an initial guess")
    mid = 0.5 * (u + v)
    if strategy in GUESS_STRATEGIES:
        mid = _clamp_guess(np.asarray(x0, dtype=float), u, v)
    points, index = [], []
    for i in range(problem.dimension):
        if strategy in (BOUNDARY_MID, BOUNDARY_GUESS):
            cand = [u[i], mid[i], v[i]]
        elif strategy in (INTERIOR, INTERIOR_GUESS):
            cand = [(5 * u[i] + v[i]) / 6, mid[i], (u[i] + 5 * v[i]) / 6]
        else:  # pragma: no cover - config validation rejects others
            raise ValueError(strategy)
        pts, k = _sorted_list(cand, mid[i])
        if pts.size < 3:
            # guess coincides with a formula point: fill the widest gap
            pts = _pad(list(pts), u[i], v[i])
            k = int(np.flatnonzero(pts == mid[i])[0])
        points.append(pts)
        index.append(k)
    return InitializationList(points, mid.copy(), index)


def _pad(pts, lo, hi, minimum=3):
    pts = sorted(set(float(p) for p in pts))
    if not pts:
        pts = [lo, hi]
    while len(pts) < minimum:
        edges = [lo] + pts + [hi]
        gaps = [edges[k + 1] - edges[k] for k in range(len(edges) - 1)]
        k = int(np.argmax(gaps))
        pts = sorted(set(pts + [0.5 * (edges[k] + edges[k + 1])]))
    return np.asarray(pts, dtype=float)


def _min_abs_point(u, v):
    """Componentwise point of smallest absolute value in ``[u, v]``."""
    return np.where((u <= 0) & (v >= 0), 0.0, np.where(np.abs(u) < np.abs(v), u, v))


def _line_minima(evaluator, x, i, lo, hi, config):
    """Sample coordinate ``i`` of ``x`` on a grid, refine the discrete minima.

    Uses at most ``smaxls`` evaluations (the current point, if already
    evaluated, comes from the cache). Returns the sampled positions with
    values and the refined local minimizers.
    """
    budget_start = evaluator.count
    limit = config.smaxls
    sampled = {}

    def f_at(t):
        if t in sampled:
            return sampled[t]
        if evaluator.count - budget_start >= limit:
            return None
        y = x.copy()
        y[i] = t
        sampled[t] = evaluator(y)
        return sampled[t]

    f_at(float(x[i]))
    n_grid = max(3, min(limit // 2 + 1, limit - 1))
    for t in np.linspace(lo, hi, n_grid):
        if f_at(float(t)) is None:
            break
    pos = sorted(sampled)
    vals = [sampled[t] for t in pos]
    brackets = []
    for k in range(len(pos)):
        left = vals[k - 1] if k > 0 else np.inf
        right = vals[k + 1] if k + 1 < len(pos) else np.inf
        if vals[k] < left and vals[k] < right:
            a = pos[k - 1] if k > 0 else pos[k]
            b = pos[k + 1] if k + 1 < len(pos) else pos[k]
            brackets.append([a, pos[k], b])
    brackets.sort(key=lambda br: (sampled[br[1]], br[1]))
    brackets = brackets[:config.nloc]
    # golden-section refinement, one evaluation per bracket in turn
    active = list(range(len(brackets)))
    while active and evaluator.count - budget_start < limit:
        nxt = []
        for b_idx in active:
            a, m, b = brackets[b_idx]
            if m - a >= b - m:
                t = m - GOLDEN_SMALL * (m - a)
            else:
                t = m + GOLDEN_SMALL * (b - m)
            if min(abs(t - m), abs(b - a)) <= 1e-9 * (hi - lo):
                continue
            ft = f_at(t)
            if ft is None:
                break
            fm = sampled[m]
            if ft < fm:
                brackets[b_idx] = [a, t, m] if t < m else [m, t, b]
            else:
                brackets[b_idx] = [t, m, b] if t < m else [a, m, t]
            nxt.append(b_idx)
        active = nxt
    minima = sorted({br[1] for br in brackets})
    return sampled, minima


def line_search_init(problem, config: McsConfig, evaluator: Evaluator) -> InitializationList:
    """Initialization list from coordinate line searches.

    Starts at the supplied guess, or at the point of minimal absolute value
    in the box, and searches each coordinate in turn for up to ``nloc``
    local minima within ``smaxls`` evaluations. The best point found is the
    start for the next coordinate. On budget exhaustion the remaining
    coordinates fall back to boundary-and-midpoint lists.
    """
    u, v = problem.lower, problem.upper
    n = problem.dimension
    x0 = config.initial_guess if config.initial_guess is not None else problem.initial_guess
    x = problem.clip(np.asarray(x0, dtype=float)) if x0 is not None else _min_abs_point(u, v)
    start = x.copy()
    first = evaluator.count
    points, values, index = [], [], []
    exhausted = False
    for i in range(n):
        if exhausted:
            pts = np.array([u[i], 0.5 * (u[i] + v[i]), v[i]])
            points.append(pts)
            values.append([None] * 3)
            index.append(-1)
            continue
        try:
            sampled, minima = _line_minima(evaluator, x, i, u[i], v[i], config)
        except BudgetExhausted:
            exhausted = True
            sampled, minima = {}, []
        chosen = list(minima)
        if len(chosen) < config.nloc and sampled:
            pos = sorted(sampled)
            chosen += [pos[0], pos[-1]]
        if len(set(chosen)) < 3:
            chosen.append(float(x[i]))
        if not sampled:
            chosen = [u[i], 0.5 * (u[i] + v[i]), v[i]]
        pts = _pad(chosen, u[i], v[i])
        points.append(pts)
        values.append([sampled.get(float(t)) for t in pts])
        if sampled:
            best_t = min(sampled, key=lambda t: (sampled[t], t))
            if sampled[best_t] <= sampled.get(float(x[i]), np.inf):
                x[i] = best_t
        k = np.flatnonzero(pts == x[i])
        index.append(int(k[0]) if k.size else -1)
    return InitializationList(points, start, index, values, evaluator.count - first,
                              notes={"incumbent": x.copy()})
