"""Joint placement and control optimization: simultaneous and sequential procedures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algorithms import canonical, run_algorithm
from .core import Bounds, EvaluationTrace, Problem, RunResult
from .objectives.scenarios import CONTROL, JOINT, PLACEMENT

STAGE_TAGS = {PLACEMENT: 1, CONTROL: 2}


@dataclass(frozen=True)
class SequentialPlan:
    """Alternating placement/control stages with fixed per-stage budgets."""

    placement_algorithm: str = "mcs-1"
    control_algorithm: str = "mcs-1"
    placement_stage_budget: int = 60
    control_stage_budget: int = 140
    total_budget: int = 5000
    seed: int = 0

    def __post_init__(self):
        canonical(self.placement_algorithm)
        canonical(self.control_algorithm)
        if self.placement_stage_budget < 1 or self.control_stage_budget < 1:
            raise ValueError("stage budgets must be positive")
        if self.total_budget < self.placement_stage_budget + self.control_stage_budget:
            raise ValueError("total budget must cover at least one placement and one control stage")

    @property
    def iteration_budget(self) -> int:
        return self.placement_stage_budget + self.control_stage_budget

    @property
    def full_iterations(self) -> int:
        return self.total_budget // self.iteration_budget


def stage_seed(master, iteration: int, stage: str) -> int:
    """Reproducible seed for one stage of a sequential run."""
    seq = np.random.SeedSequence([int(master or 0), int(iteration), STAGE_TAGS[stage]])
    return int(seq.generate_state(1)[0])


def run_simultaneous(problem: Problem, algorithm: str, seed=None) -> RunResult:
    """One optimizer run over the concatenated placement and control vector."""
    return run_algorithm(algorithm, problem, seed=seed)


class _Embedded:
    """Objective over a coordinate subset; the rest is frozen at ``base``."""

    def __init__(self, objective, base, index):
        self.objective = objective
        self.base = np.array(base, dtype=float)
        self.index = np.asarray(index, dtype=int)

    def full(self, xs):
        x = self.base.copy()
        x[self.index] = xs
        return x

    def __call__(self, xs):
        return self.objective(self.full(xs))


def _stage_problem(joint: Problem, incumbent, index, budget, name):
    sub = _Embedded(joint.objective, incumbent, index)
    bounds = Bounds(joint.lower[index], joint.upper[index])
    return Problem(bounds, sub, budget, sense=joint.sense, integer_mask=joint.integer_mask[index],
                   initial_guess=incumbent[index], name=name), sub


@dataclass
class StageRecord:
    iteration: int
    stage: str
    algorithm: str
    evaluations: int
    best_value: float
    improved: bool


def run_sequential(joint: Problem, plan: SequentialPlan, seed=None) -> RunResult:
    """Alternate placement-only and control-only stages on a joint problem.

    ``joint`` comes from ``make_problem(..., "joint", ...)``. Each stage
    starts from the incumbent, which seeds the stage optimizer, and the
    incumbent is replaced only on strict improvement. The number of
    iterations is fixed by the budgets: ``total // (placement + control)``
    full iterations plus one partial iteration for any remainder. The
    returned trace holds full joint vectors and a best-so-far that is
    monotone across stage boundaries.
    """
    layout = joint.objective.layout
    if layout.scenario != JOINT:
        raise ValueError("sequential optimization needs a joint-scenario problem")
    master = plan.seed if seed is None else seed
    index = {PLACEMENT: layout.indices(PLACEMENT), CONTROL: layout.indices(CONTROL)}
    algorithm = {PLACEMENT: plan.placement_algorithm, CONTROL: plan.control_algorithm}
    budgets = {PLACEMENT: plan.placement_stage_budget, CONTROL: plan.control_stage_budget}
    incumbent = joint.clip(joint.initial_guess if joint.initial_guess is not None
                           else 0.5 * (joint.lower + joint.upper))
    incumbent = joint.prepare(incumbent)
    best_value = None
    trace = EvaluationTrace()
    stages = []
    remaining = plan.total_budget
    n_iter = plan.full_iterations + (1 if plan.total_budget % plan.iteration_budget else 0)
    for iteration in range(n_iter):
        for stage in (PLACEMENT, CONTROL):
            budget = min(budgets[stage], remaining)
            if budget <= 0 or index[stage].size == 0:
                continue
            problem, sub = _stage_problem(joint, incumbent, index[stage], budget,
                                          f"{joint.name}:{stage}:{iteration}")
            result = run_algorithm(algorithm[stage], problem, seed=stage_seed(master, iteration, stage),
                                   start=incumbent[index[stage]])
            for rec in result.trace:
                trace.append(sub.full(rec.point), rec.value, joint.sense)
            remaining -= result.evals_used
            improved = best_value is None or joint.better(result.best_value, best_value)
            if improved:
                best_value = result.best_value
                incumbent = sub.full(result.best_point)
            stages.append(StageRecord(iteration, stage, canonical(algorithm[stage]), result.evals_used,
                                      result.best_value, improved))
    best = trace.records[-1].best_so_far
    point = next(r.point for r in trace.records if r.value == best)
    full = sum(1 for k in range(n_iter)
               if sum(s.evaluations for s in stages if s.iteration == k) == plan.iteration_budget)
    return RunResult(point.copy(), best, trace, len(trace), master,
                     info={"iterations": n_iter, "full_iterations": full, "stages": stages})
