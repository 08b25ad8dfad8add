import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wellopt.errors import DimensionMismatch, NegativeRate
from wellopt.objectives.benchmarks import six_hump_camel
from wellopt.objectives.economics import EconomicParams, ProductionSeries, npv
from wellopt.objectives.reservoir import ReservoirModel
from wellopt.objectives.scenarios import (CONTROL, JOINT, PLACEMENT, ReservoirCase, VariableLayout,
                                          load_case, make_problem)
from wellopt.objectives.simulator import simulate
from wellopt.objectives.wells import AngledWell, ControlSchedule, VerticalWell, well_to_cells

NO_COST = dict(gas_revenue=0.0, water_production_cost=0.0, water_injection_cost=0.0)


def _series(q_op, t=(365.0,), q_wp=None, q_wi=None):
    q_op = np.atleast_2d(q_op)
    z = np.zeros_like(q_op, dtype=float)
    return ProductionSeries(np.asarray(t, float), q_op, z if q_wp is None else q_wp,
                            z if q_wi is None else q_wi)


# economics

def test_npv_hand_checks():
    s = _series([[10.0]])
    assert npv(s, EconomicParams(oil_revenue=500.0, **NO_COST)) == pytest.approx(1_825_000.0, rel=1e-9)
    disc = EconomicParams(oil_revenue=500.0, discount_rate=0.1, **NO_COST)
    assert npv(s, disc) == pytest.approx(1_825_000.0 / 1.1, rel=1e-9)
    assert npv(_series([[0.0]]), EconomicParams()) == 0.0


def test_npv_empty_and_negative():
    assert npv(ProductionSeries(np.zeros(0), np.zeros((1, 0)), np.zeros((1, 0)), np.zeros((1, 0))),
               EconomicParams()) == 0.0
    with pytest.raises(NegativeRate):
        npv(_series([[-1.0]]), EconomicParams())


def test_injection_cost_charged_on_injectors():
    s = _series([[0.0], [0.0]], q_wi=np.array([[0.0], [4.0]]))
    e = EconomicParams(oil_revenue=0.0, gas_revenue=0.0, water_production_cost=0.0, water_injection_cost=2.0)
    assert npv(s, e) == pytest.approx(-2.0 * 4.0 * 365.0)


_rates = st.lists(st.floats(0.0, 1e3), min_size=1, max_size=12)


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_npv_undiscounted_equals_sum(data):
    k = data.draw(st.integers(1, 12))
    w = data.draw(st.integers(1, 3))
    arr = lambda: np.array(data.draw(st.lists(st.floats(0, 1e3), min_size=w * k, max_size=w * k))).reshape(w, k)
    dt = np.array(data.draw(st.lists(st.floats(0.5, 100.0), min_size=k, max_size=k)))
    q_op, q_wp, q_wi = arr(), arr(), arr()
    s = ProductionSeries(np.cumsum(dt), q_op, q_wp, q_wi)
    e = EconomicParams(500.0, 0.5, 80.0, 10.0, 0.0)
    direct = sum(dt[j] * (500 * q_op[:, j].sum() - 80 * q_wp[:, j].sum() - 10 * q_wi[:, j].sum())
                 for j in range(k))
    assert npv(s, e) == pytest.approx(direct, rel=1e-9, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(_rates, st.floats(0.01, 100.0), st.floats(0.0, 0.3))
def test_npv_price_linearity(q, alpha, b):
    k = len(q)
    s = ProductionSeries(30.0 * np.arange(1, k + 1), np.array([q]), 0.3 * np.array([q]), np.zeros((1, k)))
    e = EconomicParams(500.0, 0.5, 80.0, 0.0, b)
    assert npv(s, e.scaled(alpha)) == pytest.approx(alpha * npv(s, e), rel=1e-9, abs=1e-9)


# camel

def test_camel_values():
    assert six_hump_camel([0.0898, -0.7127]) == pytest.approx(-1.0316, abs=1e-3)
    assert six_hump_camel([0.0, 0.0]) == 0.0


@given(st.floats(-3, 3), st.floats(-2, 2))
def test_camel_point_symmetry(a, b):
    assert six_hump_camel([a, b]) == pytest.approx(six_hump_camel([-a, -b]), abs=1e-12)


# simulator

def _homog(nx=11, steps=40, horizon=400.0):
    return ReservoirModel(nx, nx, 20.0, 20.0, 5.0, 200.0, 0.2, horizon_days=horizon, report_steps=steps)


def _fivespot(model, rate_p0=20.0, mode="rate"):
    c = (model.nx + 1) // 2
    ws = [VerticalWell("I", "injector", c, c, ControlSchedule("bhp", [300.0]))]
    corners = [(1, 1), (model.nx, 1), (model.nx, model.ny), (1, model.ny)]
    for k, (x, y) in enumerate(corners):
        ctrl = ControlSchedule(mode, [rate_p0 if k == 0 else 20.0] if mode == "rate" else [120.0])
        ws.append(VerticalWell(f"P{k}", "producer", x, y, ctrl))
    return ws


def test_rates_balance_every_step():
    m = _homog()
    s = simulate(m, _fivespot(m))
    np.testing.assert_allclose(s.q_wi.sum(axis=0), (s.q_op + s.q_wp).sum(axis=0), rtol=1e-9)


def test_symmetric_producers_agree():
    m = _homog()
    s = simulate(m, _fivespot(m, mode="bhp"))
    cum = s.cumulative(s.q_op)[1:]
    assert np.max(np.abs(cum - cum.mean())) <= 1e-6 * cum.mean()


def test_breakthrough_earlier_at_double_rate():
    m = _homog(steps=120, horizon=600.0)

    def breakthrough(rate):
        s = simulate(m, _fivespot(m, rate_p0=rate))
        wc = s.q_wp[1] / (s.q_wp[1] + s.q_op[1])
        return s.t[np.argmax(wc > 1e-3)]

    assert breakthrough(40.0) < breakthrough(20.0)


def test_saturation_in_unit_interval_and_balance():
    m = _homog(steps=20)
    s, state = simulate(m, _fivespot(m), full_output=True)
    assert np.all(state.water_saturation >= 0) and np.all(state.water_saturation <= 1)
    moved = np.sum((state.water_saturation - m.initial_water_saturation) * m.pore_volume)
    assert abs(moved - (state.injected_water - state.produced_water)) <= 1e-8 * m.total_pore_volume


def test_off_grid_well_is_shut():
    m = _homog()
    ws = _fivespot(m, mode="bhp")
    ws.append(VerticalWell("X", "producer", 40, 40, ControlSchedule("bhp", [50.0])))
    s = simulate(m, ws)
    assert np.all(s.q_op[-1] == 0) and np.all(s.q_wp[-1] == 0)


# perforations

def _model3d():
    return ReservoirModel(10, 10, 30.0, 30.0, 4.0, 100.0, 0.2, nz=5)


def _angled(x, y, z, length, az, inc):
    return AngledWell("A", "producer", x, y, z, length, az, inc, ControlSchedule("bhp", [100.0]),
                      length_bounds=(1.0, 1e4))


def test_vertical_column():
    m = _model3d()
    cells = well_to_cells(_angled(3, 4, 1, 3 * m.dz, 0.0, math.pi / 2), m)
    assert cells == [(2, 3, 0), (2, 3, 1), (2, 3, 2)]


def test_horizontal_along_x():
    m = _model3d()
    cells = well_to_cells(_angled(2, 2, 2, 3 * m.dx, 0.0, 0.0), m)
    # from the cell centre a 3-cell run touches four cells
    assert cells == [(1, 1, 1), (2, 1, 1), (3, 1, 1), (4, 1, 1)]


def test_toe_beyond_boundary_truncated():
    m = _model3d()
    cells = well_to_cells(_angled(9, 5, 1, 10 * m.dx, 0.0, 0.0), m)
    assert cells == [(8, 4, 0), (9, 4, 0)]


def _sampled_cells(well, m, n=20000):
    seg = well.segment(m)
    size = np.array([m.dx, m.dy, m.dz])
    ts = (np.arange(n) + 0.5) / n
    pts = seg.heel + np.outer(ts, seg.toe - seg.heel)
    idx = np.floor(pts / size).astype(int)
    inside = np.all((idx >= 0) & (idx < [m.nx, m.ny, m.nz]), axis=1)
    return {tuple(c) for c in idx[inside]}


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.integers(1, 10), st.integers(1, 5), st.floats(5.0, 250.0),
       st.floats(0.0, 2 * math.pi), st.floats(0.0, math.pi / 2))
def test_perforation_path_connected_and_matches_sampling(x, y, z, length, az, inc):
    m = _model3d()
    w = _angled(x, y, z, length, az, inc)
    cells = well_to_cells(w, m)
    for a, b in zip(cells, cells[1:]):
        assert sum(abs(p - q) for p, q in zip(a, b)) == 1
    assert len(set(cells)) == len(cells)
    # dense sampling may skip cells grazed at an edge, never the other way round
    assert _sampled_cells(w, m) <= set(cells)


# problems

@pytest.mark.parametrize("case,scenario,dim", [("placement_6", PLACEMENT, 12), ("angled_12", PLACEMENT, 72),
                                               ("fivespot_51", CONTROL, 32), ("joint_4", JOINT, 28)])
def test_dimensions(case, scenario, dim):
    p = load_case(f"builtin:{case}").problem(scenario, 10)
    assert p.dimension == dim
    assert p.sense == "maximize"
    assert p.integer_mask.sum() == {12: 12, 72: 36, 32: 0, 28: 8}[dim]


def test_control_scenario_rejects_infinite_bounds():
    m = _homog()
    ws = _fivespot(m)
    with pytest.raises(DimensionMismatch):
        make_problem(m, ws, EconomicParams(), CONTROL, 10)


@pytest.mark.parametrize("case", ["placement_6", "angled_12", "fivespot_51", "joint_4"])
@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 31))
def test_pack_unpack_round_trip(case, seed):
    c = load_case(f"builtin:{case}")
    layout = VariableLayout.build(c.wells, JOINT)
    lo, hi = layout.bounds(c.model)
    x = np.random.default_rng(seed).uniform(lo, hi)
    p, u = layout.unpack(x)
    np.testing.assert_array_equal(layout.pack(p, u), x)
    p2, u2 = layout.unpack(layout.pack(p, u))
    assert all(np.array_equal(a, b) for a, b in zip(p + u, p2 + u2))


def test_joint_layout_order_wells_outer():
    c = load_case("builtin:joint_4")
    layout = VariableLayout.build(c.wells, JOINT)
    kinds = [(b.well, b.kind) for b in layout.blocks]
    assert kinds == [(w, k) for w in range(4) for k in (PLACEMENT, CONTROL)]


def test_case_dict_round_trip():
    c = load_case("builtin:joint_4")
    c2 = ReservoirCase.from_dict(c.to_dict())
    p1, p2 = c.problem(JOINT, 5), c2.problem(JOINT, 5)
    np.testing.assert_array_equal(p1.initial_guess, p2.initial_guess)
    assert p1.objective(p1.initial_guess) == p2.objective(p2.initial_guess)
