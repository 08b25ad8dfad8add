"""Generalized pattern search over the 2n coordinate directions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Evaluator, RunResult
from ..errors import BudgetExhausted


@dataclass(frozen=True)
class GpsConfig:
    expansion: float = 2.0
    contraction: float = 0.5
    initial_step: float = 0.25
    min_step: float = 1e-8

    def __post_init__(self):
        if not self.expansion > 1.0 > self.contraction > 0.0:
            raise ValueError("need expansion > 1 > contraction > 0")
        if not 0 < self.initial_step <= 1 or self.min_step <= 0:
            raise ValueError("initial_step must lie in (0, 1] and min_step be positive")


def poll_directions(n: int) -> np.ndarray:
    """The positive spanning set ``+e1, -e1, ..., +en, -en`` in poll order."""
    d = np.zeros((2 * n, n))
    for i in range(n):
        d[2 * i, i] = 1.0
        d[2 * i + 1, i] = -1.0
    return d


def run_gps(problem, config: GpsConfig = GpsConfig(), start=None, seed=None) -> RunResult:
    """Opportunistic compass search.

    The first improving poll point becomes the new centre and the step
    expands; a poll without improvement contracts the step. Steps are kept
    per coordinate as fractions of the bound range. Stops on budget or
    once the relative step drops below ``min_step``.
    """
    ev = Evaluator(problem)
    rng = problem.upper - problem.lower
    x = problem.clip(np.asarray(start if start is not None else
                                (problem.initial_guess if problem.initial_guess is not None
                                 else 0.5 * (problem.lower + problem.upper)), dtype=float))
    dirs = poll_directions(problem.dimension)
    frac = config.initial_step
    try:
        f = ev(x)
        while frac >= config.min_step:
            improved = False
            for d in dirs:
                y = problem.clip(x + frac * rng * d)
                if np.array_equal(y, x):
                    continue
                fy = ev(y)
                if fy < f:
                    x, f = y, fy
                    improved = True
                    break
            frac = min(frac * config.expansion, 1.0) if improved else frac * config.contraction
    except BudgetExhausted:
        pass
    return ev.result(seed)
