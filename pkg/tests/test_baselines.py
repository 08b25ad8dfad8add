import math

import numpy as np
import pytest

from wellopt.baselines import CmaesConfig, GpsConfig, PsoConfig, poll_directions, run_cmaes, run_gps, run_pso
from wellopt.errors import ConfigInconsistent
from wellopt.objectives.benchmarks import benchmark_problem

from conftest import quadratic_problem, traces_equal


def _random_start(seed, n=10):
    return np.random.default_rng(1000 + seed).uniform(-5.0, 5.0, n)


def _sphere(budget, seed=0, n=10):
    return benchmark_problem("sphere", budget, dimension=n, x0=_random_start(seed, n))


def test_poll_directions():
    np.testing.assert_array_equal(poll_directions(2), [[1, 0], [-1, 0], [0, 1], [0, -1]])


def test_gps_convex_quadratic():
    p = quadratic_problem(budget=5000, n=3)
    res = run_gps(p, start=np.array([-0.9, 0.8, 0.0]))
    assert np.max(np.abs(res.best_point - 0.3)) < 1e-6


def test_gps_camel(camel):
    res = run_gps(camel(600), start=np.zeros(2))
    assert res.best_value <= -1.02 and len(res.trace) <= 600


def test_gps_deterministic(camel):
    assert traces_equal(run_gps(camel(300)).trace, run_gps(camel(300)).trace)


def test_cmaes_table_values():
    c = CmaesConfig.for_dimension(12)
    assert c.lam == 4 + math.floor(3 * math.log(12)) == 11 and c.mu == 5
    c2 = CmaesConfig.for_dimension(2)
    assert c2.c_c == pytest.approx(0.6667, abs=1e-4)
    assert c2.mu_eff == pytest.approx(1.0 / np.sum(np.square(c2.weights)))
    assert sum(c2.weights) == pytest.approx(1.0)
    assert all(a > b for a, b in zip(c2.weights, c2.weights[1:]))


def test_cmaes_inconsistent_mu_eff():
    with pytest.raises(ConfigInconsistent):
        CmaesConfig.for_dimension(5, mu_eff=10.0)


def test_cmaes_seeded_identical():
    a = run_cmaes(_sphere(400), seed=3)
    b = run_cmaes(_sphere(400), seed=3)
    c = run_cmaes(_sphere(400), seed=4)
    assert traces_equal(a.trace, b.trace) and not traces_equal(a.trace, c.trace)


def test_cmaes_sphere_single_seed():
    res = run_cmaes(_sphere(3000, seed=1), seed=1)
    assert res.best_value < 1e-6


def test_cmaes_evaluates_start_first():
    p = _sphere(50)
    res = run_cmaes(p, start=p.initial_guess, seed=0)
    np.testing.assert_array_equal(res.trace.records[0].point, p.initial_guess)


def test_pso_frozen_swarm():
    p = _sphere(500, n=3)
    cfg = PsoConfig(population=10, inertia=0.0, cognitive=0.0, social=0.0)
    res = run_pso(p, cfg, seed=5)
    first = min(r.value for r in res.trace.records[:10])
    assert res.best_value == first


def test_pso_seeded_identical():
    a = run_pso(_sphere(600), seed=9)
    b = run_pso(_sphere(600), seed=9)
    assert traces_equal(a.trace, b.trace)


def test_pso_start_is_first_particle():
    p = _sphere(60)
    res = run_pso(p, start=p.initial_guess, seed=0)
    np.testing.assert_array_equal(res.trace.records[0].point, p.initial_guess)


@pytest.mark.xfail(strict=True, reason="50 particles at budget 1000 give about 20 generations; "
                                       "the swarm has not contracted to 1e-2 yet")
def test_pso_sphere_budget_1000():
    vals = [run_pso(_sphere(1000, s), start=_random_start(s), seed=s).best_value for s in range(10)]
    assert np.median(vals) <= 1e-2


@pytest.mark.parametrize("run", [run_gps, run_pso, run_cmaes])
def test_points_feasible(run):
    p = _sphere(400, n=4)
    res = run(p, seed=2)
    pts = res.trace.points
    assert np.all(pts >= -5.0) and np.all(pts <= 5.0)


def test_gps_config_validation():
    with pytest.raises(ValueError):
        GpsConfig(expansion=0.5)
