"""Analytic test functions with their conventional bounds."""
import numpy as np

from ..core import Bounds, Problem


def six_hump_camel(x):
    """Six-hump camel back function.

    Uses the canonical form ``x1^2 (4 - 2.1 x1^2 + x1^4 / 3) + x1 x2 + (-4 + 4 x2^2) x2^2``.
    Global minima at (0.0898, -0.7126) and (-0.0898, 0.7126), value -1.0316.
    """
    x1, x2 = float(x[0]), float(x[1])
    return x1 * x1 * (4.0 - 2.1 * x1 * x1 + x1 ** 4 / 3.0) + x1 * x2 + (-4.0 + 4.0 * x2 * x2) * x2 * x2


def sphere(x):
    x = np.asarray(x, dtype=float)
    return float(np.dot(x, x))


def rosenbrock(x):
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def rastrigin(x):
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


# name -> (function, default lower, default upper, default dimension or None for fixed)
BENCHMARKS = {
    "six_hump_camel": (six_hump_camel, [-3.0, -2.0], [3.0, 2.0], 2),
    "sphere": (sphere, -5.0, 5.0, None),
    "rosenbrock": (rosenbrock, -2.048, 2.048, None),
    "rastrigin": (rastrigin, -5.12, 5.12, None),
}


def benchmark_problem(name, budget, dimension=None, x0=None):
    """Build a minimization :class:`Problem` for a named benchmark."""
    try:
        fn, lo, hi, fixed_n = BENCHMARKS[name]
    except KeyError:
        raise KeyError(f"unknown benchmark {name!r}; choose from {sorted(BENCHMARKS)}") from None
    if fixed_n is not None:
        if dimension not in (None, fixed_n):
            raise ValueError(f"{name} is defined for dimension {fixed_n} only")
        lower, upper = np.asarray(lo, float), np.asarray(hi, float)
    else:
        n = 10 if dimension is None else int(dimension)
        lower, upper = np.full(n, float(lo)), np.full(n, float(hi))
    if x0 is None:
        x0 = 0.5 * (lower + upper)
    return Problem(Bounds(lower, upper), fn, budget, sense="minimize", initial_guess=x0, name=name)
