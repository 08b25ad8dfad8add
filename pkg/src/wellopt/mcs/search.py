"""Multilevel coordinate search driver."""
from __future__ import annotations

import numpy as np

from ..core import Evaluator, RunResult
from ..errors import BudgetExhausted
from .boxes import (SweepState, bump_level, golden_splits, model_samples, quadratic_min,
                    split_box, split_decision)
from .config import LINE_SEARCH, McsConfig
from .init_list import InitializationList, build_init_list
from .local_search import local_search

POSITION_TOL = 1e-12


def _new_state(problem, config) -> SweepState:
    return SweepState(problem.dimension, config.s_max, problem.lower.copy(), problem.upper.copy(),
                      np.asarray(problem.integer_mask, dtype=bool))


def initialize(problem, init: InitializationList, evaluator: Evaluator, config: McsConfig,
               state: SweepState = None) -> SweepState:
    """Coordinate-wise initialization sweep over the list points.

    For each coordinate the incumbent is varied over the list, the current
    box is split at those positions, and the sweep continues in the child
    holding the best variant. Boxes never split along a coordinate borrow
    the list samples of that coordinate for their quadratic models.
    """
    n = problem.dimension
    if state is None:
        state = _new_state(problem, config)
    x = problem.clip(np.asarray(init.start, dtype=float))
    state.init_samples = [() for _ in range(n)]
    current = None
    try:
        for i in range(n):
            pts = [float(t) for t in init.points[i]]
            vals = []
            for t in pts:
                y = x.copy()
                y[i] = t
                vals.append(evaluator(y))
            j = min(range(len(pts)), key=lambda k: (vals[k], k))
            state.init_samples[i] = tuple(zip(pts, vals))
            if current is None:
                base = x.copy()
                base[i] = pts[j]
                current = state.new_box(problem.lower, problem.upper, base, vals[j], 1,
                                        np.zeros(n, dtype=int), [() for _ in range(n)])
            # the variant set replaces the parent base along coordinate i
            current.base[i] = pts[j]
            current.value = vals[j]
            children = split_box(state, current, i, pts, vals)
            x[i] = pts[j]
            current = next(c for c in children if c.base[i] == pts[j])
    except BudgetExhausted:
        pass
    finally:
        _fill_samples(state)
    return state


def _fill_samples(state: SweepState):
    if state.init_samples is None:
        return
    for box in state.boxes:
        box.samples = [box.samples[i] if box.samples[i] else state.init_samples[i]
                       for i in range(state.n)]


def _evaluate_along(evaluator, box, i, t):
    y = box.base.copy()
    y[i] = t
    return evaluator(y)


def split_by_rank(state: SweepState, box, i: int, evaluator: Evaluator):
    """Split along ``i`` at the golden-section points of the box extent."""
    lo, hi = float(box.lower[i]), float(box.upper[i])
    tol = POSITION_TOL * (state.domain_upper[i] - state.domain_lower[i])
    pos = [float(box.base[i])]
    vals = [box.value]
    for t in golden_splits(lo, hi):
        if all(abs(t - p) > tol for p in pos):
            pos.append(float(t))
            vals.append(_evaluate_along(evaluator, box, i, t))
    if len(pos) == 1:
        return [bump_level(state, box)]
    return split_box(state, box, i, pos, vals)


def expected_gain(state: SweepState, box, i: int, evaluator: Evaluator):
    """Model minimiser ``(t, f_exp)`` along ``i`` within the box extent.

    Fits the quadratic through the base value and the two most recent
    samples at other positions. With fewer samples, golden-section points
    of the box extent are evaluated to complete the fit.
    """
    lo, hi = float(box.lower[i]), float(box.upper[i])
    tol = POSITION_TOL * (state.domain_upper[i] - state.domain_lower[i])
    pts = model_samples(box, i, tol)
    if len(pts) < 3:
        extra = list(box.samples[i])
        for t in golden_splits(lo, hi):
            if len(pts) == 3:
                break
            if all(abs(t - p) > tol for p, _ in pts):
                f = _evaluate_along(evaluator, box, i, t)
                extra.append((float(t), f))
                pts.append((float(t), f))
        box.samples = list(box.samples)
        box.samples[i] = tuple(extra)
    if len(pts) < 3:
        return float(box.base[i]), box.value
    ts, fs = zip(*pts)
    return quadratic_min(ts, fs, lo, hi)


def split_by_gain(state: SweepState, box, evaluator: Evaluator, candidates):
    """Split where the separable model predicts a new best, else bump the level."""
    f_best = evaluator.best_f
    tol_of = lambda i: POSITION_TOL * (state.domain_upper[i] - state.domain_lower[i])
    best = None
    for i in candidates:
        t, f_exp = expected_gain(state, box, i, evaluator)
        if abs(t - box.base[i]) <= tol_of(i):
            continue
        if best is None or f_exp < best[2]:
            best = (i, t, f_exp)
    if best is None or not best[2] < min(f_best, evaluator.best_f):
        return [bump_level(state, box)]
    i, t, _ = best
    f_new = _evaluate_along(evaluator, box, i, t)
    return split_box(state, box, i, [float(box.base[i]), float(t)], [box.value, f_new])


def _maybe_local_search(state, boxes, evaluator, problem, config):
    if not config.local_search_active:
        return
    for box in sorted(boxes, key=lambda b: (b.value, b.index)):
        key = box.base.tobytes()
        f_best = evaluator.best_f
        if key in state.seeded:
            continue
        if box.value - f_best > config.local_trigger * max(abs(f_best), 1e-300):
            continue
        state.seeded.add(key)
        local_search(evaluator, problem, box.base, box.value, config)


def sweep(state: SweepState, evaluator: Evaluator, problem, config: McsConfig) -> int:
    """One pass over levels 2..s_max-1; returns the number of boxes processed."""
    processed = 0
    finished = []
    for level in range(2, state.s_max):
        box = state.pop_best(level)
        if box is None:
            continue
        processed += 1
        candidates = state.splittable(box)
        if not candidates:
            box.level = state.s_max
            continue
        kind, i = split_decision(box, state.n, candidates)
        if kind == "rank":
            new = split_by_rank(state, box, i, evaluator)
        else:
            new = split_by_gain(state, box, evaluator, candidates)
        finished.extend(b for b in new if b.level >= state.s_max and b.alive)
    _maybe_local_search(state, finished, evaluator, problem, config)
    return processed


def run_mcs(problem, config: McsConfig, seed=None) -> RunResult:
    """Minimise ``problem`` (in its own sense) with multilevel coordinate search."""
    evaluator = Evaluator(problem)
    state = None
    try:
        if config.init_strategy == LINE_SEARCH:
            init = build_init_list(problem, config, evaluator)
        else:
            init = build_init_list(problem, config)
        state = initialize(problem, init, evaluator, config)
        while not evaluator.exhausted and state.has_open_boxes():
            if sweep(state, evaluator, problem, config) == 0:
                break
    except BudgetExhausted:
        pass
    result = evaluator.result(seed)
    result.info["state"] = state
    return result
