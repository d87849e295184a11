"""Pure-Python RK4 lifting backend.

Mirrors _lift_cy (same arithmetic, same step layout) so the two backends
are interchangeable.  The polynomial tables are preprocessed into nested
tuples once per table and the bump profile evaluates value and derivative
in one pass; plain float lists keep the inner loop free of per-element
numpy overhead.
"""

from __future__ import annotations

import math

import numpy as np

BUMP_LO = 0.1
BUMP_WIDTH = 0.8

_sin = math.sin
_cos = math.cos
_PI = math.pi


def _bump(mode: int, t: float) -> float:
    s = (t - BUMP_LO) / BUMP_WIDTH
    if s <= 0.0 or s >= 1.0:
        return 0.0
    sp = _sin(_PI * s)
    return sp * sp * _sin(mode * _PI * s)


def _bump_deriv(mode: int, t: float) -> float:
    s = (t - BUMP_LO) / BUMP_WIDTH
    if s <= 0.0 or s >= 1.0:
        return 0.0
    return (_PI * _sin(2 * _PI * s) * _sin(mode * _PI * s)
            + mode * _PI * _sin(_PI * s) ** 2 * _cos(mode * _PI * s)) / BUMP_WIDTH


def _control(kind, poly_coefs, breaks, spline_coefs, bch, bmode, bamp, l, t,
             u, du):
    if kind == 0:
        for j in range(l):
            val = 0.0
            dval = 0.0
            for c in poly_coefs[j]:
                dval = dval * t + val
                val = val * t + c
            u[j] = val
            du[j] = dval
    else:
        n_pieces = len(breaks) - 1
        lo, hi = 0, n_pieces - 1
        tt = min(max(t, breaks[0]), breaks[-1])
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if breaks[mid] <= tt:
                lo = mid
            else:
                hi = mid - 1
        s = tt - breaks[lo]
        for j in range(l):
            c0, c1, c2, c3 = (spline_coefs[j][0][lo], spline_coefs[j][1][lo],
                              spline_coefs[j][2][lo], spline_coefs[j][3][lo])
            u[j] = ((c0 * s + c1) * s + c2) * s + c3
            du[j] = (3.0 * c0 * s + 2.0 * c1) * s + c2
    if bch:
        s = (t - BUMP_LO) / BUMP_WIDTH
        if 0.0 < s < 1.0:
            sp = _sin(_PI * s)
            cp = _cos(_PI * s)
            sp2 = sp * sp
            two_sp_cp = 2.0 * sp * cp
            for b in range(len(bch)):
                k = bmode[b]
                sk = _sin(k * _PI * s)
                ck = _cos(k * _PI * s)
                amp = bamp[b]
                j = bch[b]
                u[j] += amp * sp2 * sk
                du[j] += amp * _PI * (two_sp_cp * sk + k * sp2 * ck) / BUMP_WIDTH


def _compile_terms(offsets, exps, coefs, m, l):
    """Per-polynomial term tuples: (coef, ((index, exponent), ...)) with
    indices into the concatenated (u, y) value list."""
    polys = []
    for p in range(len(offsets) - 1):
        terms = []
        for t_idx in range(offsets[p], offsets[p + 1]):
            factors = tuple((v, int(e)) for v, e in enumerate(exps[t_idx]) if e)
            terms.append((float(coefs[t_idx]), factors))
        polys.append(tuple(terms))
    return tuple(polys)


def _rhs(polys, m, l, z, du, out):
    # z holds the l control values followed by the m - l state values
    m_l = m - l
    for i in range(m_l):
        acc = 0.0
        base = i * l
        for j in range(l):
            duj = du[j]
            if duj == 0.0:
                continue
            fval = 0.0
            for coef, factors in polys[base + j]:
                v = coef
                for idx, e in factors:
                    x = z[idx]
                    if e == 1:
                        v *= x
                    elif e == 2:
                        v *= x * x
                    else:
                        v *= x ** e
                fval += v
            acc += fval * duj
        out[i] = acc


def _rk4_step(polys, m, l, kind, pc, br, sc, bch, bmode, bamp, t, z, h,
              u_du_k):
    du, k1, k2, k3, k4 = u_du_k
    m_l = m - l
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t, z, du)
    _rhs(polys, m, l, z, du, k1)
    y = z[l:]
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t + 0.5 * h, z, du)
    for i in range(m_l):
        z[l + i] = y[i] + 0.5 * h * k1[i]
    _rhs(polys, m, l, z, du, k2)
    for i in range(m_l):
        z[l + i] = y[i] + 0.5 * h * k2[i]
    _rhs(polys, m, l, z, du, k3)
    _control(kind, pc, br, sc, bch, bmode, bamp, l, t + h, z, du)
    for i in range(m_l):
        z[l + i] = y[i] + h * k3[i]
    _rhs(polys, m, l, z, du, k4)
    return [y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            for i in range(m_l)]


_TERMS_CACHE: dict = {}


def lift_rk4(offsets, exps, coefs, m, l, kind, poly_coefs, breaks,
             spline_coefs, bump_channel, bump_mode, bump_amp, y0, n_steps,
             t_end):
    offsets_arr = np.asarray(offsets)
    exps_arr = np.asarray(exps).reshape(-1, m)
    coefs_arr = np.asarray(coefs)
    key = (offsets_arr.tobytes(), exps_arr.tobytes(), coefs_arr.tobytes())
    polys = _TERMS_CACHE.get(key)
    if polys is None:
        polys = _compile_terms([int(x) for x in offsets_arr],
                               exps_arr.tolist(), coefs_arr, m, l)
        _TERMS_CACHE[key] = polys
    pc = [[float(c) for c in row] for row in np.asarray(poly_coefs)]
    br = [float(b) for b in np.asarray(breaks)]
    sc = np.asarray(spline_coefs).tolist()
    bch = [int(b) for b in bump_channel]
    bmode = [int(b) for b in bump_mode]
    bamp = [float(b) for b in bump_amp]
    m_l = m - l

    h = t_end / n_steps
    states = np.empty((n_steps + 1, m), dtype=np.float64)
    defects = np.empty((n_steps, m_l), dtype=np.float64)
    # z = control values (refreshed in place) followed by the current state
    z = [0.0] * l + [float(v) for v in y0]
    du = [0.0] * l
    scratch = (du, [0.0] * m_l, [0.0] * m_l, [0.0] * m_l, [0.0] * m_l)

    _control(kind, pc, br, sc, bch, bmode, bamp, l, 0.0, z, du)
    states[0] = z
    for step in range(n_steps):
        t = step * h
        y = z[l:]
        y_full = _rk4_step(polys, m, l, kind, pc, br, sc, bch, bmode, bamp,
                           t, z[:l] + y, h, scratch)
        y_half = _rk4_step(polys, m, l, kind, pc, br, sc, bch, bmode, bamp,
                           t, z[:l] + y, 0.5 * h, scratch)
        y_new = _rk4_step(polys, m, l, kind, pc, br, sc, bch, bmode, bamp,
                          t + 0.5 * h, z[:l] + y_half, 0.5 * h, scratch)
        for i in range(m_l):
            defects[step, i] = abs(y_full[i] - y_new[i])
            z[l + i] = y_new[i]
        _control(kind, pc, br, sc, bch, bmode, bamp, l, (step + 1) * h, z, du)
        states[step + 1] = z
    return states, defects
