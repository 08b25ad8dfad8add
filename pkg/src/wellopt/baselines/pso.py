"""Global-best particle swarm optimization."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core import Evaluator, RunResult
from ..errors import BudgetExhausted

VELOCITY_CLAMP = 0.5
# generations in a row without a new evaluation before the swarm counts as stalled
STALL_GENERATIONS = 50


@dataclass(frozen=True)
class PsoConfig:
    population: int = 50
    inertia: float = 0.9
    cognitive: float = 0.5
    social: float = 1.25
    seed: Optional[int] = None

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be at least 2")
        if min(self.inertia, self.cognitive, self.social) < 0:
            raise ValueError("PSO weights must be non-negative")


def run_pso(problem, config: PsoConfig = PsoConfig(), start=None, seed=None) -> RunResult:
    """Particle swarm with ``v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)``.

    ``r1`` and ``r2`` are scalars drawn per particle and generation. The
    swarm is drawn uniformly in the bounds with ``start`` injected as
    particle 0 and zero initial velocities. Positions leaving the box are
    clamped and the velocity of a clamped coordinate is zeroed. A swarm
    that only revisits known points for ``STALL_GENERATIONS`` generations
    has stopped moving and the run ends early.
    """
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng(seed)
    ev = Evaluator(problem)
    lo, hi = problem.lower, problem.upper
    n, m = problem.dimension, config.population
    vmax = VELOCITY_CLAMP * (hi - lo)
    x = lo + rng.random((m, n)) * (hi - lo)
    if start is None:
        start = problem.initial_guess
    if start is not None:
        x[0] = problem.clip(np.asarray(start, dtype=float))
    v = np.zeros((m, n))
    pbest = x.copy()
    pbest_f = np.full(m, np.inf)
    g_idx = 0
    try:
        for k in range(m):
            pbest_f[k] = ev(x[k])
        g_idx = int(np.argmin(pbest_f))
        stalled = 0
        while stalled < STALL_GENERATIONS:
            before = ev.count
            # one cognitive and one social draw per particle
            r1 = rng.random((m, 1))
            r2 = rng.random((m, 1))
            v = (config.inertia * v + config.cognitive * r1 * (pbest - x)
                 + config.social * r2 * (pbest[g_idx] - x))
            v = np.clip(v, -vmax, vmax)
            x = x + v
            clipped = (x < lo) | (x > hi)
            x = np.clip(x, lo, hi)
            v[clipped] = 0.0
            for k in range(m):
                fk = ev(x[k])
                if fk < pbest_f[k]:
                    pbest_f[k] = fk
                    pbest[k] = x[k]
            g_idx = int(np.argmin(pbest_f))
            stalled = stalled + 1 if ev.count == before else 0
    except BudgetExhausted:
        pass
    return ev.result(seed)
