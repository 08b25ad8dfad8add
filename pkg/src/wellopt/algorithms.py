"""Registry of optimizer identifiers shared by the joint procedures and the CLI."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .baselines import CmaesConfig, GpsConfig, PsoConfig, run_cmaes, run_gps, run_pso
from .core import RunResult
from .mcs import preset, run_mcs

ALIASES = {"mcs": "mcs-1", "cma-es": "cmaes", "cma": "cmaes"}


@dataclass(frozen=True)
class AlgorithmSpec:
    id: str
    description: str
    stochastic: bool
    runner: Callable


def _mcs_runner(number):
    def run(problem, seed=None, start=None):
        x0 = start if start is not None else problem.initial_guess
        config = preset(number, problem.dimension, x0=x0)
        if start is not None:
            config = config.with_guess(start)
        return run_mcs(problem, config, seed=seed)
    return run


_MCS_TEXT = {
    1: "boundary and midpoint list", 2: "interior sixths list", 3: "line-search list",
    4: "boundaries and initial guess", 5: "interior sixths and initial guess",
    6: "as mcs-4 with s_max = 10n", 7: "as mcs-4 without local search",
}

ALGORITHMS = {f"mcs-{k}": AlgorithmSpec(f"mcs-{k}", f"multilevel coordinate search, {text}", False,
                                        _mcs_runner(k)) for k, text in _MCS_TEXT.items()}
ALGORITHMS["gps"] = AlgorithmSpec("gps", "generalized pattern search, 2n compass poll", False,
                                  lambda p, seed=None, start=None: run_gps(p, GpsConfig(), start, seed))
ALGORITHMS["pso"] = AlgorithmSpec("pso", "particle swarm, 50 particles, w=0.9 c1=0.5 c2=1.25", True,
                                  lambda p, seed=None, start=None: run_pso(p, PsoConfig(), start, seed))
ALGORITHMS["cmaes"] = AlgorithmSpec(
    "cmaes", "CMA-ES with default strategy parameters", True,
    lambda p, seed=None, start=None: run_cmaes(p, CmaesConfig.for_dimension(p.dimension), start, seed))


def canonical(name: str) -> str:
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in ALGORITHMS:
        raise KeyError(f"unknown algorithm {name!r}; known: {', '.join(ALGORITHMS)}")
    return key


def parse_algorithm(text: str):
    """Single id, or a ``first-second`` pair for sequential runs.

    Ids themselves contain hyphens (``mcs-1``), so every split point is
    tried and exactly one must yield two known ids.
    """
    try:
        return (canonical(text),)
    except KeyError:
        pass
    parts = text.strip().lower().split("-")
    found = []
    for cut in range(1, len(parts)):
        left, right = "-".join(parts[:cut]), "-".join(parts[cut:])
        try:
            found.append((canonical(left), canonical(right)))
        except KeyError:
            continue
    if len(found) != 1:
        reason = "is ambiguous" if found else "is not a known algorithm or pair"
        raise KeyError(f"algorithm {text!r} {reason}")
    return found[0]


def is_stochastic(alg_id: str) -> bool:
    return ALGORITHMS[canonical(alg_id)].stochastic


def run_algorithm(alg_id: str, problem, seed=None, start=None) -> RunResult:
    spec = ALGORITHMS[canonical(alg_id)]
    return spec.runner(problem, seed=seed if spec.stochastic else None, start=start)
