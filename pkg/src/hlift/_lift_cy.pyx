# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cython RK4 lifting backend; arithmetic mirrors _lift_py exactly."""

import numpy as np

from libc.math cimport sin, cos, M_PI

cdef double BUMP_LO = 0.1
cdef double BUMP_WIDTH = 0.8


cdef inline double _bump(int mode, double t) nogil:
    cdef double s = (t - BUMP_LO) / BUMP_WIDTH
    cdef double sp
    if s <= 0.0 or s >= 1.0:
        return 0.0
    sp = sin(M_PI * s)
    return sp * sp * sin(mode * M_PI * s)


cdef inline double _bump_deriv(int mode, double t) nogil:
    cdef double s = (t - BUMP_LO) / BUMP_WIDTH
    cdef double sp
    if s <= 0.0 or s >= 1.0:
        return 0.0
    sp = sin(M_PI * s)
    return (M_PI * sin(2.0 * M_PI * s) * sin(mode * M_PI * s)
            + mode * M_PI * sp * sp * cos(mode * M_PI * s)) / BUMP_WIDTH


cdef void _control(int kind, double[:, ::1] pc, double[::1] br,
                   double[:, :, ::1] sc, int[::1] bch, int[::1] bmode,
                   double[::1] bamp, int l, double t, double* u,
                   double* du) nogil:
    cdef int j, k, lo, hi, mid, b
    cdef double val, dval, s, c0, c1, c2, c3, tt
    if kind == 0:
        for j in range(l):
            val = 0.0
            dval = 0.0
            for k in range(pc.shape[1]):
                dval = dval * t + val
                val = val * t + pc[j, k]
            u[j] = val
            du[j] = dval
    else:
        tt = t
        if tt < br[0]:
            tt = br[0]
        if tt > br[br.shape[0] - 1]:
            tt = br[br.shape[0] - 1]
        lo = 0
        hi = br.shape[0] - 2
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if br[mid] <= tt:
                lo = mid
            else:
                hi = mid - 1
        s = tt - br[lo]
        for j in range(l):
            c0 = sc[j, 0, lo]
            c1 = sc[j, 1, lo]
            c2 = sc[j, 2, lo]
            c3 = sc[j, 3, lo]
            u[j] = ((c0 * s + c1) * s + c2) * s + c3
            du[j] = (3.0 * c0 * s + 2.0 * c1) * s + c2
    for b in range(bch.shape[0]):
        u[bch[b]] += bamp[b] * _bump(bmode[b], t)
        du[bch[b]] += bamp[b] * _bump_deriv(bmode[b], t)


cdef void _rhs(int[::1] offsets, int[:, ::1] exps, double[::1] coefs,
               int m, int l, double* u, double* y, double* du,
               double* out) nogil:
    cdef int m_l = m - l
    cdef int i, j, t_idx, v, e, p, base
    cdef double acc, fval, term, duj
    for i in range(m_l):
        acc = 0.0
        for j in range(l):
            duj = du[j]
            if duj == 0.0:
                continue
            base = i * l + j
            fval = 0.0
            for t_idx in range(offsets[base], offsets[base + 1]):
                term = coefs[t_idx]
                for v in range(l):
                    e = exps[t_idx, v]
                    for p in range(e):
                        term *= u[v]
                for v in range(m_l):
                    e = exps[t_idx, l + v]
                    for p in range(e):
                        term *= y[v]
                fval += term
            acc += fval * duj
        out[i] = acc


cdef void _rk4_step(int[::1] offsets, int[:, ::1] exps, double[::1] coefs,
                    int m, int l, int kind, double[:, ::1] pc, double[::1] br,
                    double[:, :, ::1] sc, int[::1] bch, int[::1] bmode,
                    double[::1] bamp, double t, double* y, double h,
                    double* u, double* du, double* k1, double* k2,
                    double* k3, double* k4, double* ytmp,
                    double* yout) nogil:
    cdef int m_l = m - l
    cdef int i
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t, u, du)
    _rhs(offsets, exps, coefs, m, l, u, y, du, k1)
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t + 0.5 * h, u, du)
    for i in range(m_l):
        ytmp[i] = y[i] + 0.5 * h * k1[i]
    _rhs(offsets, exps, coefs, m, l, u, ytmp, du, k2)
    for i in range(m_l):
        ytmp[i] = y[i] + 0.5 * h * k2[i]
    _rhs(offsets, exps, coefs, m, l, u, ytmp, du, k3)
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t + h, u, du)
    for i in range(m_l):
        ytmp[i] = y[i] + h * k3[i]
    _rhs(offsets, exps, coefs, m, l, u, ytmp, du, k4)
    for i in range(m_l):
        yout[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


def lift_rk4(offsets, exps, coefs, int m, int l, int kind, poly_coefs,
             breaks, spline_coefs, bump_channel, bump_mode, bump_amp, y0,
             int n_steps, double t_end):
    cdef int[::1] offs = np.ascontiguousarray(offsets, dtype=np.int32)
    cdef int[:, ::1] ex = np.ascontiguousarray(exps, dtype=np.int32).reshape(-1, m)
    cdef double[::1] co = np.ascontiguousarray(coefs, dtype=np.float64)
    cdef double[:, ::1] pc = np.ascontiguousarray(poly_coefs, dtype=np.float64)
    cdef double[::1] br = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef double[:, :, ::1] sc = np.ascontiguousarray(spline_coefs,
                                                     dtype=np.float64)
    cdef int[::1] bch = np.ascontiguousarray(bump_channel, dtype=np.int32)
    cdef int[::1] bmode = np.ascontiguousarray(bump_mode, dtype=np.int32)
    cdef double[::1] bamp = np.ascontiguousarray(bump_amp, dtype=np.float64)

    cdef int m_l = m - l
    cdef double h = t_end / n_steps
    states_arr = np.empty((n_steps + 1, m), dtype=np.float64)
    defects_arr = np.empty((n_steps, m_l), dtype=np.float64)
    cdef double[:, ::1] states = states_arr
    cdef double[:, ::1] defects = defects_arr

    cdef double[::1] y_v = np.ascontiguousarray(y0, dtype=np.float64).copy()
    scratch_arr = np.zeros((9, max(m, 4)), dtype=np.float64)
    cdef double[:, ::1] s9 = scratch_arr
    cdef double* u = &s9[0, 0]
    cdef double* du = &s9[1, 0]
    cdef double* k1 = &s9[2, 0]
    cdef double* k2 = &s9[3, 0]
    cdef double* k3 = &s9[4, 0]
    cdef double* k4 = &s9[5, 0]
    cdef double* ytmp = &s9[6, 0]
    cdef double* yfull = &s9[7, 0]
    cdef double* yhalf = &s9[8, 0]
    cdef double* y = &y_v[0]

    cdef int step, i
    cdef double t, t_next

    _control(kind, pc, br, sc, bch, bmode, bamp, l, 0.0, u, du)
    for i in range(l):
        states[0, i] = u[i]
    for i in range(m_l):
        states[0, l + i] = y[i]

    with nogil:
        for step in range(n_steps):
            t = step * h
            _rk4_step(offs, ex, co, m, l, kind, pc, br, sc, bch, bmode, bamp,
                      t, y, h, u, du, k1, k2, k3, k4, ytmp, yfull)
            _rk4_step(offs, ex, co, m, l, kind, pc, br, sc, bch, bmode, bamp,
                      t, y, 0.5 * h, u, du, k1, k2, k3, k4, ytmp, yhalf)
            _rk4_step(offs, ex, co, m, l, kind, pc, br, sc, bch, bmode, bamp,
                      t + 0.5 * h, yhalf, 0.5 * h, u, du, k1, k2, k3, k4,
                      ytmp, y)
            for i in range(m_l):
                defects[step, i] = abs(yfull[i] - y[i])
            t_next = (step + 1) * h
            _control(kind, pc, br, sc, bch, bmode, bamp, l, t_next, u, du)
            for i in range(l):
                states[step + 1, i] = u[i]
            for i in range(m_l):
                states[step + 1, l + i] = y[i]
    return states_arr, defects_arr
