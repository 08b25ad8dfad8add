"""Explicit upwind water-saturation transport, numpy implementation.

Reference implementation of the kernel compiled in ``_transport_ext.pyx``;
both must produce the same results to rounding.
"""
import numpy as np


def _fractional_flow(sw, swc, sor, n_w, n_o, krw_end, kro_end, mu_w, mu_o):
    se = np.clip((sw - swc) / (1.0 - swc - sor), 0.0, 1.0)
    lw = krw_end * se ** n_w / mu_w
    lo = kro_end * (1.0 - se) ** n_o / mu_o
    return lw / (lw + lo)


def advance_saturation(sw, pv, face_a, face_b, flux, perf_cell, perf_q, n_sub, dt_sub,
                       fluid, water_out, oil_out, water_in):
    """Advance ``sw`` in place through ``n_sub`` substeps of length ``dt_sub`` days.

    ``flux[f]`` is the total flux from ``face_a[f]`` to ``face_b[f]`` and
    ``perf_q[p]`` the perforation rate (positive into the reservoir), all in
    m3/day and frozen over the substeps. Produced water/oil and injected water
    volumes are accumulated per perforation into the output arrays.
    """
    swc, sor, n_w, n_o, krw_end, kro_end, mu_w, mu_o = fluid
    n = sw.size
    forward = flux > 0
    up = np.where(forward, face_a, face_b)
    down = np.where(forward, face_b, face_a)
    mag = np.abs(flux)
    inj = perf_q > 0
    inj_cell, inj_q = perf_cell[inj], perf_q[inj]
    prod_idx = np.nonzero(~inj)[0]
    prod_cell, prod_q = perf_cell[prod_idx], -perf_q[prod_idx]
    inj_source = np.bincount(inj_cell, weights=inj_q, minlength=n)
    scale = dt_sub / pv
    wout = np.zeros(prod_idx.size)
    for _ in range(n_sub):
        fw = _fractional_flow(sw, swc, sor, n_w, n_o, krw_end, kro_end, mu_w, mu_o)
        w = fw[up] * mag
        wprod = fw[prod_cell] * prod_q
        dv = (np.bincount(down, weights=w, minlength=n) - np.bincount(up, weights=w, minlength=n)
              + inj_source - np.bincount(prod_cell, weights=wprod, minlength=n))
        sw += scale * dv
        wout += wprod
    t = n_sub * dt_sub
    water_out[prod_idx] += wout * dt_sub
    oil_out[prod_idx] += prod_q * t - wout * dt_sub
    water_in[inj] += inj_q * t
