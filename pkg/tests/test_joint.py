import numpy as np
import pytest

from wellopt.joint import SequentialPlan, run_sequential, run_simultaneous, stage_seed
from wellopt.objectives.scenarios import CONTROL, JOINT, PLACEMENT, load_case

from conftest import traces_equal


@pytest.fixture(scope="module")
def joint():
    return load_case("builtin:joint_4").problem(JOINT, 10_000)


def _stage_slices(result):
    pos = 0
    for s in result.info["stages"]:
        yield s, pos, pos + s.evaluations
        pos += s.evaluations


def check_sequential_invariants(joint, result, plan):
    """Stage isolation and global monotonicity of a sequential run."""
    layout = joint.objective.layout
    idx = {PLACEMENT: layout.indices(PLACEMENT), CONTROL: layout.indices(CONTROL)}
    other = {PLACEMENT: CONTROL, CONTROL: PLACEMENT}
    recs = result.trace.records
    incumbent = joint.prepare(joint.initial_guess)
    best = None
    for stage, a, b in _stage_slices(result):
        fixed = idx[other[stage.stage]]
        for r in recs[a:b]:
            assert np.array_equal(r.point[fixed], incumbent[fixed])
        stage_best = max(recs[a:b], key=lambda r: r.value)
        if best is None or stage_best.value > best:
            best = stage_best.value
            incumbent = next(r.point for r in recs[a:b] if r.value == stage_best.value)
    bsf = result.trace.best_so_far
    assert np.all(np.diff(bsf) >= 0)
    assert len(result.trace) <= plan.total_budget
    assert result.best_value == bsf[-1]


def test_plan_iteration_count():
    plan = SequentialPlan(total_budget=5000)
    assert plan.full_iterations == 25 and plan.iteration_budget == 200
    with pytest.raises(ValueError):
        SequentialPlan(total_budget=100)


def test_stage_seeds_distinct_and_stable():
    seeds = {stage_seed(7, k, s) for k in range(5) for s in (PLACEMENT, CONTROL)}
    assert len(seeds) == 10
    assert stage_seed(7, 2, CONTROL) == stage_seed(7, 2, CONTROL)


@pytest.mark.parametrize("algs", [("mcs-1", "mcs-1"), ("gps", "cmaes"), ("pso", "mcs-4")])
def test_sequential_invariants(joint, algs):
    plan = SequentialPlan(*algs, placement_stage_budget=12, control_stage_budget=18, total_budget=75, seed=3)
    res = run_sequential(joint, plan)
    check_sequential_invariants(joint, res, plan)
    assert res.info["iterations"] == 3 and res.info["full_iterations"] == 2
    assert res.best_value >= joint.objective(joint.prepare(joint.initial_guess))


def test_equal_trace_lengths_across_pairs(joint):
    plan_a = SequentialPlan("mcs-1", "mcs-1", 10, 20, 60)
    plan_b = SequentialPlan("mcs-1", "cmaes", 10, 20, 60)
    a, b = run_sequential(joint, plan_a), run_sequential(joint, plan_b, seed=1)
    assert len(a.trace) == len(b.trace) == 60


def test_sequential_reproducible(joint):
    plan = SequentialPlan("pso", "cmaes", 10, 15, 50, seed=5)
    assert traces_equal(run_sequential(joint, plan).trace, run_sequential(joint, plan).trace)


def test_sequential_needs_joint_problem():
    p = load_case("builtin:joint_4").problem(CONTROL, 50)
    with pytest.raises(ValueError):
        run_sequential(p, SequentialPlan(total_budget=400))


def test_simultaneous(joint):
    p = joint.with_budget(40)
    a, b = run_simultaneous(p, "mcs-1"), run_simultaneous(p, "mcs-1")
    assert p.dimension == 28 and len(a.trace) == 40
    assert traces_equal(a.trace, b.trace)
