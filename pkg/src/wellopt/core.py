"""Problem definition, budgeted evaluation with tracing, and trial statistics.

Every optimizer in the package minimizes. A :class:`Problem` with
``sense="maximize"`` is handled by negating the objective inside
:func:`evaluate`; the trace always stores values in the problem's own sense.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import BudgetExhausted, EmptyInput, EmptyTrace, OutOfBounds

BOUND_TOL = 1e-12


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.shape != upper.shape or lower.size == 0:
            raise ValueError("lower and upper bounds must be non-empty and of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ValueError("bounds must be finite")
        if np.any(lower >= upper):
            raise ValueError("lower bound must be strictly below upper bound in every coordinate")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __len__(self):
        return self.lower.size


def round_half_away(x):
    """Round to the nearest integer, ties away from zero (2.5 -> 3, -2.5 -> -3)."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


@dataclass
class Problem:
    """A bound-constrained black-box problem with an evaluation budget.

    ``integer_mask`` marks coordinates rounded before the objective sees them
    (grid-block well coordinates). ``initial_guess`` is the optional
    physically reasonable starting point used by GPS, CMA-ES, PSO and the
    guess-based MCS configurations.
    """

    bounds: Bounds
    objective: Callable[[np.ndarray], float]
    budget: int
    sense: str = "minimize"
    integer_mask: Optional[np.ndarray] = None
    initial_guess: Optional[np.ndarray] = None
    name: str = "problem"

    def __post_init__(self):
        if not isinstance(self.bounds, Bounds):
            self.bounds = Bounds(*self.bounds)
        if self.sense not in ("minimize", "maximize"):
            raise ValueError(f"sense must be 'minimize' or 'maximize', got {self.sense!r}")
        if int(self.budget) < 1:
            raise ValueError("budget must be at least 1")
        self.budget = int(self.budget)
        n = len(self.bounds)
        if self.integer_mask is None:
            self.integer_mask = np.zeros(n, dtype=bool)
        else:
            self.integer_mask = np.asarray(self.integer_mask, dtype=bool).ravel()
            if self.integer_mask.size != n:
                raise ValueError("integer_mask length differs from problem dimension")
        if self.initial_guess is not None:
            guess = np.asarray(self.initial_guess, dtype=float).ravel()
            if guess.size != n:
                raise ValueError("initial_guess length differs from problem dimension")
            self.initial_guess = np.clip(guess, self.bounds.lower, self.bounds.upper)

    @property
    def dimension(self) -> int:
        return len(self.bounds)

    @property
    def lower(self) -> np.ndarray:
        return self.bounds.lower

    @property
    def upper(self) -> np.ndarray:
        return self.bounds.upper

    def clip(self, x) -> np.ndarray:
        return np.clip(np.asarray(x, dtype=float), self.bounds.lower, self.bounds.upper)

    def prepare(self, point) -> np.ndarray:
        """Validate ``point`` against the bounds and apply integer rounding."""
        x = np.asarray(point, dtype=float).ravel()
        if x.size != self.dimension:
            raise OutOfBounds(f"point has {x.size} coordinates, problem has {self.dimension}")
        lo, hi = self.bounds.lower, self.bounds.upper
        if np.any(x < lo - BOUND_TOL) or np.any(x > hi + BOUND_TOL) or not np.all(np.isfinite(x)):
            raise OutOfBounds(f"point {x} violates bounds")
        x = np.clip(x, lo, hi)
        if self.integer_mask.any():
            m = self.integer_mask
            r = round_half_away(x[m])
            # non-integer bounds: pull rounded values back onto the feasible integers
            r = np.clip(r, np.ceil(lo[m]), np.floor(hi[m]))
            x = x.copy()
            x[m] = r
        return x

    def with_budget(self, budget: int) -> "Problem":
        return dataclasses.replace(self, budget=budget)

    def better(self, a: float, b: float) -> bool:
        """True when value ``a`` is strictly better than ``b`` under the problem sense."""
        return a > b if self.sense == "maximize" else a < b


class TraceRecord(NamedTuple):
    eval_index: int
    point: np.ndarray
    value: float
    best_so_far: float


@dataclass
class EvaluationTrace:
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, point, value, sense="minimize"):
        if self.records:
            prev = self.records[-1].best_so_far
            if sense == "maximize":
                best = value if value > prev else prev
            else:
                best = value if value < prev else prev
        else:
            best = value
        self.records.append(TraceRecord(len(self.records) + 1, point, value, best))

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.records], dtype=float)

    @property
    def best_so_far(self) -> np.ndarray:
        return np.array([r.best_so_far for r in self.records], dtype=float)

    @property
    def points(self) -> np.ndarray:
        return np.array([r.point for r in self.records], dtype=float)


@dataclass
class RunResult:
    best_point: np.ndarray
    best_value: float
    trace: EvaluationTrace
    evals_used: int
    seed: Optional[int] = None
    info: dict = field(default_factory=dict)


@dataclass(frozen=True)
class TrialStatistics:
    max: float
    min: float
    mean: float
    median: float
    std: float
    trials: int


def evaluate(problem: Problem, point, trace: EvaluationTrace) -> float:
    """Evaluate ``problem`` at ``point``, record the call, and return the value to minimize.

    The trace doubles as the evaluation counter: a call made when
    ``len(trace) == problem.budget`` raises :class:`BudgetExhausted`.
    """
    if len(trace) >= problem.budget:
        raise BudgetExhausted(f"budget of {problem.budget} evaluations exhausted")
    x = problem.prepare(point)
    value = float(problem.objective(x.copy()))
    trace.append(x, value, problem.sense)
    return -value if problem.sense == "maximize" else value


class Evaluator:
    """Stateful wrapper around :func:`evaluate` used by the optimizers.

    Tracks the incumbent in minimization form and, when ``cache`` is set,
    answers repeated requests for the same (rounded) point without spending
    budget.
    """

    def __init__(self, problem: Problem, cache: bool = True):
        self.problem = problem
        self.trace = EvaluationTrace()
        self.cache = {} if cache else None
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf

    @property
    def count(self) -> int:
        return len(self.trace)

    @property
    def remaining(self) -> int:
        return self.problem.budget - len(self.trace)

    @property
    def exhausted(self) -> bool:
        return self.remaining <= 0

    def __call__(self, point) -> float:
        x = self.problem.prepare(point)
        key = x.tobytes() if self.cache is not None else None
        if key is not None and key in self.cache:
            return self.cache[key]
        f = evaluate(self.problem, x, self.trace)
        if key is not None:
            self.cache[key] = f
        if f < self.best_f:
            self.best_f = f
            self.best_x = x
        return f

    def result(self, seed: Optional[int] = None) -> RunResult:
        if not self.trace.records:
            raise EmptyTrace("no evaluations were made")
        best = self.trace.records[-1].best_so_far
        # first record attaining the final best
        point = next(r.point for r in self.trace.records if r.value == best)
        return RunResult(point.copy(), best, self.trace, len(self.trace), seed)


def aggregate_trials(results: Sequence[RunResult]) -> TrialStatistics:
    values = [r.best_value for r in results]
    if not values:
        raise EmptyInput("at least one run result is required")
    return statistics_of(values)


def statistics_of(values: Sequence[float]) -> TrialStatistics:
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise EmptyInput("at least one value is required")
    std = float(np.std(v, ddof=1)) if v.size > 1 else 0.0
    return TrialStatistics(
        max=float(v.max()), min=float(v.min()), mean=float(v.mean()),
        median=float(np.median(v)), std=std, trials=int(v.size),
    )


def best_at_budget(trace: EvaluationTrace, k: int) -> float:
    """Best-so-far value after ``k`` evaluations (clamped to the trace length)."""
    if not trace.records:
        raise EmptyTrace("trace is empty")
    if k < 1:
        raise ValueError("k must be at least 1")
    return trace.records[min(k, len(trace)) - 1].best_so_far
