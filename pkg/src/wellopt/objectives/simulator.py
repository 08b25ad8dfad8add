"""Incompressible two-phase (oil-water) IMPES simulator.

Per report step: total mobility is frozen, the pressure equation is solved
with two-point flux approximation and Peaceman well connections, then water
saturation is advanced explicitly with upwind fractional flow in CFL-limited
substeps. No capillarity, gravity or compressibility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import scipy.linalg as sla

from ..errors import EmptyPerforation, InfeasibleRates, NonConvergedPressure
from .economics import ProductionSeries
from .kernels import get_kernel
from .wells import INJECTOR

CFL_SAFETY = 0.9
BANDED_MAX_WIDTH = 400


@dataclass
class SimulationState:
    """Final reservoir state and bookkeeping returned with ``full_output=True``."""

    water_saturation: np.ndarray
    pressure: np.ndarray
    injected_water: float
    produced_water: float
    produced_oil: float
    substeps: int


def report_times(model, wells):
    """Uniform report grid merged with every control period boundary."""
    horizon = model.horizon_days
    times = [horizon * np.arange(1, model.report_steps + 1) / model.report_steps]
    for w in wells:
        times.append(w.control.ends(horizon))
    t = np.unique(np.round(np.concatenate(times), 9))
    return t[(t > 0) & (t <= horizon + 1e-9)]


def _perforations(model, wells):
    cells, owner, wi = [], [], []
    for w_idx, w in enumerate(wells):
        try:
            ijk = w.cells(model)
        except EmptyPerforation:
            continue  # a well outside the grid cannot flow
        for i, j, k in ijk:
            cells.append(model.cell_index(i, j, k))
            owner.append(w_idx)
            wi.append(model.well_index(i, j, k))
    return np.asarray(cells, dtype=np.intp), np.asarray(owner, dtype=np.intp), np.asarray(wi, dtype=float)


def _solve_pressure(model, wells, controls, lam_t, perf_cell, perf_owner, perf_wi, t):
    """Return cell pressures, perforation rates (m3/day, + into reservoir) and face fluxes."""
    n = model.n_cells
    fa, fb, tg = model.connections
    tf = tg * 0.5 * (lam_t[fa] + lam_t[fb])
    n_w = len(wells)
    is_inj = np.array([w.role == INJECTOR for w in wells], dtype=bool)
    is_bhp = np.array([w.control.mode == "bhp" for w in wells], dtype=bool)
    perf_lam = perf_wi * lam_t[perf_cell]
    active = np.ones(perf_cell.size, dtype=bool)
    targets = np.array(controls, dtype=float)
    rate_wells = [w for w in range(n_w) if not is_bhp[w] and np.any(perf_owner == w)]
    has_bhp = bool(np.any(is_bhp[perf_owner])) if perf_owner.size else False

    if not has_bhp and rate_wells:
        prod = sum(targets[w] for w in rate_wells if not is_inj[w])
        cap = sum(targets[w] for w in rate_wells if is_inj[w])
        if prod > cap * (1.0 + 1e-12) + 1e-12:
            raise InfeasibleRates(
                f"t={t:g} d: production {prod:g} m3/d exceeds injection capacity {cap:g} m3/d")
        # voidage replacement: injectors deliver exactly what is produced
        ratio = prod / cap if cap > 0 else 0.0
        for w in rate_wells:
            if is_inj[w]:
                targets[w] *= ratio

    for _ in range(perf_cell.size + 1):
        p, p_well, q_perf = _assemble_and_solve(
            model, n, fa, fb, tf, perf_cell, perf_owner, perf_lam * active, targets,
            is_inj, is_bhp, rate_wells, has_bhp)
        bad = active & is_bhp[perf_owner] & np.where(is_inj[perf_owner], q_perf < -1e-12, q_perf > 1e-12)
        if not bad.any():
            break
        active &= ~bad  # cross-flow disabled: shut perforations flowing the wrong way
        has_bhp = bool(np.any(active & is_bhp[perf_owner]))
    else:
        raise NonConvergedPressure(f"t={t:g} d: perforation status did not settle")
    flux = tf * (p[fa] - p[fb])
    return p, q_perf * active, flux


def _cell_solve(n, fa, fb, tf, diag, pin, rhs):
    """Solve ``K x = rhs`` for the symmetric positive definite cell matrix ``K``.

    ``K`` has ``diag`` on the diagonal and ``-tf`` on each connection. When
    ``pin`` is set, row and column 0 are replaced by the identity. A banded
    Cholesky factorization is used for narrow bandwidths, sparse LU otherwise.
    """
    if pin:
        keep = (fa != 0) & (fb != 0)
        fa, fb, tf = fa[keep], fb[keep], tf[keep]
        diag = diag.copy()
        diag[0] = 1.0
    width = int(np.max(np.abs(fb - fa))) if fa.size else 0
    try:
        if width <= BANDED_MAX_WIDTH:
            ab = np.zeros((width + 1, n))
            ab[width] = diag
            lo, hi = np.minimum(fa, fb), np.maximum(fa, fb)
            np.add.at(ab, (width - (hi - lo), hi), -tf)
            factor = sla.cholesky_banded(ab, lower=False, check_finite=False)
            out = sla.cho_solve_banded((factor, False), rhs, check_finite=False)
        else:
            K = sp.csc_matrix((np.concatenate([diag, -tf, -tf]),
                               (np.concatenate([np.arange(n), fa, fb]), np.concatenate([np.arange(n), fb, fa]))),
                              shape=(n, n))
            out = spla.splu(K, permc_spec="MMD_AT_PLUS_A").solve(rhs)
    except (np.linalg.LinAlgError, RuntimeError) as exc:
        raise NonConvergedPressure(f"pressure matrix could not be factorized: {exc}") from exc
    return out


def _assemble_and_solve(model, n, fa, fb, tf, perf_cell, perf_owner, perf_lam, targets,
                        is_inj, is_bhp, rate_wells, has_bhp):
    n_r = len(rate_wells)
    diag = np.bincount(fa, weights=tf, minlength=n) + np.bincount(fb, weights=tf, minlength=n)
    diag += np.bincount(perf_cell, weights=perf_lam, minlength=n)
    bhp_perf = is_bhp[perf_owner]
    rhs = np.bincount(perf_cell[bhp_perf], weights=perf_lam[bhp_perf] * targets[perf_owner[bhp_perf]],
                      minlength=n).astype(float)
    # coupling of rate-well bottom-hole pressures to cells: K p + B p_w = rhs, B^T p + D p_w = rhs_w
    B = np.zeros((n, n_r))
    D = np.zeros(n_r)
    rhs_w = np.zeros(n_r)
    for r, w in enumerate(rate_wells):
        mine = perf_owner == w
        np.add.at(B[:, r], perf_cell[mine], -perf_lam[mine])
        D[r] = perf_lam[mine].sum()
        rhs_w[r] = targets[w] if is_inj[w] else -targets[w]
    pin = not has_bhp
    if pin:
        # closed system: the pressure level is fixed by pinning cell 0
        p0 = model.initial_pressure
        nb = np.concatenate([fb[fa == 0], fa[fb == 0]])
        tn = np.concatenate([tf[fa == 0], tf[fb == 0]])
        np.add.at(rhs, nb, tn * p0)
        rhs_w -= B[0] * p0
        B[0] = 0.0
        rhs[0] = p0
    sol = _cell_solve(n, fa, fb, tf, diag, pin, np.column_stack([rhs, B]))
    z, Y = sol[:, 0], sol[:, 1:]
    if n_r:
        S = np.diag(D) - B.T @ Y
        try:
            pw_rate = np.linalg.solve(S, rhs_w - B.T @ z)
        except np.linalg.LinAlgError as exc:
            raise NonConvergedPressure(f"well equations are singular: {exc}") from exc
        p = z - Y @ pw_rate
    else:
        pw_rate = np.zeros(0)
        p = z
    if not np.all(np.isfinite(p)):
        raise NonConvergedPressure("pressure solve produced non-finite values")
    p_well = np.array(targets, dtype=float)
    for r, w in enumerate(rate_wells):
        p_well[w] = pw_rate[r]
    q_perf = perf_lam * (p_well[perf_owner] - p[perf_cell])
    return p, p_well, q_perf


def simulate(model, wells, backend=None, full_output=False, observer=None):
    """Run the forecast and return per-well, per-report-step phase rates.

    Rates are averages over each report step in m3/day. Wells whose
    trajectory misses the grid are treated as shut. With ``full_output`` a
    :class:`SimulationState` is returned alongside the series.
    ``observer(k, t, sw)``, if given, is called after every report step with
    a read-only view of the water saturation.
    """
    kernel = get_kernel(backend)
    times = report_times(model, wells)
    n_steps = times.size
    n_w = len(wells)
    perf_cell, perf_owner, perf_wi = _perforations(model, wells)
    fa, fb, _ = model.connections
    pv = model.pore_volume
    sw = np.full(model.n_cells, model.initial_water_saturation, dtype=float)
    fluid = (model.swc, model.sor, model.n_w, model.n_o, model.krw_end, model.kro_end,
             model.mu_w, model.mu_o)
    dfds = model.max_dfdsw
    q_op = np.zeros((n_w, n_steps))
    q_wp = np.zeros((n_w, n_steps))
    q_wi = np.zeros((n_w, n_steps))
    p = np.full(model.n_cells, model.initial_pressure)
    t_prev = 0.0
    substeps = 0
    for k, t in enumerate(times):
        dt = t - t_prev
        mid = 0.5 * (t + t_prev)
        t_prev = t
        if perf_cell.size == 0:
            if observer is not None:
                observer(k, t, sw)
            continue
        controls = [w.control.value_at(mid, model.horizon_days) for w in wells]
        lam_w, lam_o = model.mobilities(sw)
        lam_t = lam_w + lam_o
        p, q_perf, flux = _solve_pressure(model, wells, controls, lam_t, perf_cell, perf_owner, perf_wi, t)
        outflow = (np.bincount(np.where(flux > 0, fa, fb), weights=np.abs(flux), minlength=model.n_cells)
                   + np.bincount(perf_cell, weights=np.maximum(-q_perf, 0.0), minlength=model.n_cells))
        inflow = (np.bincount(np.where(flux > 0, fb, fa), weights=np.abs(flux), minlength=model.n_cells)
                  + np.bincount(perf_cell, weights=np.maximum(q_perf, 0.0), minlength=model.n_cells))
        throughput = np.maximum(outflow, inflow) * dfds / pv
        rate = float(throughput.max()) if throughput.size else 0.0
        n_sub = max(1, math.ceil(dt * rate / CFL_SAFETY)) if rate > 0 else 1
        water_out = np.zeros(perf_cell.size)
        oil_out = np.zeros(perf_cell.size)
        water_in = np.zeros(perf_cell.size)
        kernel(sw, pv, fa, fb, flux, perf_cell, q_perf, n_sub, dt / n_sub, fluid, water_out, oil_out, water_in)
        substeps += n_sub
        q_op[:, k] = np.bincount(perf_owner, weights=oil_out, minlength=n_w) / dt
        q_wp[:, k] = np.bincount(perf_owner, weights=water_out, minlength=n_w) / dt
        q_wi[:, k] = np.bincount(perf_owner, weights=water_in, minlength=n_w) / dt
        if observer is not None:
            view = sw.view()
            view.flags.writeable = False
            observer(k, t, view)
    # clean rounding-level negatives (e.g. oil from a fully flooded cell)
    for arr in (q_op, q_wp, q_wi):
        arr[(arr < 0) & (arr > -1e-9)] = 0.0
    series = ProductionSeries(times, q_op, q_wp, q_wi, well_names=[w.name for w in wells])
    if not full_output:
        return series
    dt = series.dt
    state = SimulationState(sw, p, float(q_wi.sum(axis=0) @ dt), float(q_wp.sum(axis=0) @ dt),
                            float(q_op.sum(axis=0) @ dt), substeps)
    return series, state
