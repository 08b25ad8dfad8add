import numpy as np
import pytest

from wellopt.core import Bounds, Problem
from wellopt.objectives.benchmarks import benchmark_problem


@pytest.fixture
def camel():
    def make(budget=200, x0=(0.0, 0.0)):
        return benchmark_problem("six_hump_camel", budget, x0=np.asarray(x0, float))
    return make


def quadratic_problem(budget=500, n=3, center=0.3, lo=-1.0, hi=1.0):
    c = np.full(n, center)
    return Problem(Bounds(np.full(n, lo), np.full(n, hi)),
                   lambda x: float(np.sum((x - c) ** 2)), budget, name="quad")


def traces_equal(a, b):
    if len(a) != len(b):
        return False
    return all(np.array_equal(r.point, s.point) and r.value == s.value
               for r, s in zip(a.records, b.records))


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
