"""Multilevel coordinate search and derivative-free baselines for well placement and control."""
from .core import (Bounds, EvaluationTrace, Evaluator, Problem, RunResult, TrialStatistics,
                   aggregate_trials, best_at_budget, evaluate)
from .mcs import McsConfig, preset, run_mcs

__version__ = "0.1.0"

__all__ = ["Bounds", "EvaluationTrace", "Evaluator", "Problem", "RunResult", "TrialStatistics",
           "aggregate_trials", "best_at_budget", "evaluate", "McsConfig", "preset", "run_mcs"]
