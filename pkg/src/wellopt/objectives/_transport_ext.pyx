# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Explicit upwind water-saturation transport, compiled kernel.

Same contract as ``advance_saturation`` in ``_transport_py``.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport pow

cnp.import_array()


cdef inline double _frac(double s, double swc, double span, double n_w, double n_o,
                         double krw_end, double kro_end, double mu_w, double mu_o) nogil:
    cdef double se = (s - swc) / span
    if se < 0.0:
        se = 0.0
    elif se > 1.0:
        se = 1.0
    cdef double lw, lo
    if n_w == 2.0:
        lw = krw_end * se * se / mu_w
    else:
        lw = krw_end * pow(se, n_w) / mu_w
    if n_o == 2.0:
        lo = kro_end * (1.0 - se) * (1.0 - se) / mu_o
    else:
        lo = kro_end * pow(1.0 - se, n_o) / mu_o
    return lw / (lw + lo)


def advance_saturation(double[::1] sw, const double[::1] pv, const cnp.intp_t[::1] face_a,
                       const cnp.intp_t[::1] face_b, const double[::1] flux,
                       const cnp.intp_t[::1] perf_cell, const double[::1] perf_q,
                       long n_sub, double dt_sub, tuple fluid,
                       double[::1] water_out, double[::1] oil_out, double[::1] water_in):
    cdef double swc = fluid[0], sor = fluid[1], n_w = fluid[2], n_o = fluid[3]
    cdef double krw_end = fluid[4], kro_end = fluid[5], mu_w = fluid[6], mu_o = fluid[7]
    cdef double span = 1.0 - swc - sor
    cdef Py_ssize_t n = sw.shape[0], nf = flux.shape[0], npf = perf_q.shape[0]
    cdef double[::1] fw = np.empty(n)
    cdef double[::1] dv = np.empty(n)
    cdef double[::1] wacc = np.zeros(npf)
    cdef Py_ssize_t c, f, p, a, b
    cdef long it
    cdef double q, w
    with nogil:
        for it in range(n_sub):
            for c in range(n):
                fw[c] = _frac(sw[c], swc, span, n_w, n_o, krw_end, kro_end, mu_w, mu_o)
                dv[c] = 0.0
            for f in range(nf):
                q = flux[f]
                a = face_a[f]
                b = face_b[f]
                if q > 0.0:
                    w = fw[a] * q
                    dv[a] -= w
                    dv[b] += w
                else:
                    w = fw[b] * (-q)
                    dv[b] -= w
                    dv[a] += w
            for p in range(npf):
                q = perf_q[p]
                c = perf_cell[p]
                if q > 0.0:
                    dv[c] += q
                else:
                    w = fw[c] * (-q)
                    dv[c] -= w
                    wacc[p] += w
            for c in range(n):
                sw[c] += dt_sub * dv[c] / pv[c]
        for p in range(npf):
            q = perf_q[p]
            if q > 0.0:
                water_in[p] += q * n_sub * dt_sub
            else:
                water_out[p] += wacc[p] * dt_sub
                oil_out[p] += (-q) * n_sub * dt_sub - wacc[p] * dt_sub
