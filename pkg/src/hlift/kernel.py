"""Backend selection for the hot RK4 lifting loop.

The control ODE y' = f(x(t), y) x'(t) is integrated thousands of times by
the classification and deformation machinery, so its inner loop exists in
two interchangeable forms: a Cython extension (built at install time when
a compiler is available) and a pure-Python fallback.  The choice happens
once at import; setting HLIFT_PURE=1 forces the fallback.  Both backends
implement the same contract and are compared by tests and by
``benchmarks/bench_lift.py``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .distribution import Distribution

_FORCE_PURE = os.environ.get("HLIFT_PURE", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _lift_cy as _backend
        BACKEND = "compiled"
    except ImportError:
        from . import _lift_py as _backend
        BACKEND = "pure"
else:
    from . import _lift_py as _backend
    BACKEND = "pure"

from . import _lift_py as _pure_backend


def backend_name() -> str:
    return BACKEND


@dataclass(frozen=True)
class PolyTable:
    """CSR-style float tables for the (m-l) x l matrix of vertical frame
    coefficients f^i_j; polynomial (i, j) owns the terms in
    [offsets[i*l+j], offsets[i*l+j+1])."""

    m: int
    l: int
    offsets: np.ndarray
    exps: np.ndarray
    coefs: np.ndarray


@dataclass(frozen=True)
class ControlSpec:
    """Numeric control data: per-channel polynomial or cubic-spline pieces,
    plus optional sine-bump perturbation terms."""

    kind: int                 # 0 polynomial, 1 spline
    poly_coefs: np.ndarray    # [l, deg+1], highest power first (kind 0)
    breaks: np.ndarray        # [npieces+1] (kind 1)
    spline_coefs: np.ndarray  # [l, 4, npieces], local cubic, highest first
    bump_channel: np.ndarray  # int32 [nb]
    bump_mode: np.ndarray     # int32 [nb]
    bump_amp: np.ndarray      # float64 [nb]


_EMPTY_F = np.zeros(0, dtype=np.float64)
_EMPTY_I = np.zeros(0, dtype=np.int32)


def compile_tables(dist: Distribution) -> PolyTable:
    m, l = dist.dim, dist.rank
    offsets = [0]
    exps: list = []
    coefs: list = []
    for i in range(m - l):
        for j in range(l):
            f = dist.vertical_coeff(i, j)
            for e, c in f.sorted_terms():
                exps.append(e)
                coefs.append(float(c))
            offsets.append(len(coefs))
    return PolyTable(
        m=m, l=l,
        offsets=np.array(offsets, dtype=np.int32),
        exps=(np.array(exps, dtype=np.int32).reshape(-1, m)
              if exps else np.zeros((0, m), dtype=np.int32)),
        coefs=np.array(coefs, dtype=np.float64),
    )


_TABLE_CACHE: dict = {}


def tables_for(dist: Distribution) -> PolyTable:
    key = id(dist)
    hit = _TABLE_CACHE.get(key)
    if hit is None or hit[0] is not dist:
        hit = (dist, compile_tables(dist))
        _TABLE_CACHE[key] = hit
    return hit[1]


def make_control_spec(l: int, poly_coeffs=None, spline=None, bumps=()) -> ControlSpec:
    """Assemble a ControlSpec from exact polynomial coefficient rows
    (ascending order) or a scipy PPoly, plus bump terms."""
    channels = np.array([int(b[0]) for b in bumps], dtype=np.int32)
    modes = np.array([int(b[1]) for b in bumps], dtype=np.int32)
    amps = np.array([float(b[2]) for b in bumps], dtype=np.float64)
    if poly_coeffs is not None:
        deg = max((len(row) for row in poly_coeffs), default=1)
        table = np.zeros((l, deg), dtype=np.float64)
        for j, row in enumerate(poly_coeffs):
            # ascending input, stored highest power first for Horner
            for k, c in enumerate(row):
                table[j, deg - 1 - k] = float(c)
        return ControlSpec(0, table, _EMPTY_F, np.zeros((l, 4, 0)), channels,
                           modes, amps)
    if spline is None:
        raise ValueError("need polynomial coefficients or a spline")
    breaks, coefs = spline
    return ControlSpec(1, np.zeros((l, 1)), np.asarray(breaks, dtype=np.float64),
                       np.asarray(coefs, dtype=np.float64), channels, modes, amps)


def lift_rk4(table: PolyTable, ctrl: ControlSpec, y0, n_steps: int,
             t_end: float = 1.0, backend=None):
    """Integrate the control ODE with RK4 over [0, t_end] on n_steps
    uniform steps.

    Each accepted step is the two-half-steps value; the returned per-step
    defect is the absolute difference between that and a single full step
    (a Richardson estimate of the local error, the horizontality residual
    certificate).  Returns (states[(n+1) x m], defects[n x (m-l)]).
    """
    if table.m == table.l:
        # Trivial vertical part: the path is the control itself.
        times = np.linspace(0.0, t_end, n_steps + 1)
        states = np.empty((n_steps + 1, table.m))
        u = [0.0] * table.l
        du = [0.0] * table.l
        for k, t in enumerate(times):
            _pure_backend._control(
                ctrl.kind, ctrl.poly_coefs.tolist(), ctrl.breaks.tolist(),
                ctrl.spline_coefs.tolist(), ctrl.bump_channel.tolist(),
                ctrl.bump_mode.tolist(), ctrl.bump_amp.tolist(), table.l,
                float(t), u, du)
            states[k] = u
        return states, np.zeros((n_steps, 0))
    impl = _backend if backend is None else (
        _pure_backend if backend == "pure" else _backend)
    states, defects = impl.lift_rk4(
        table.offsets, table.exps, table.coefs, table.m, table.l,
        ctrl.kind, ctrl.poly_coefs, ctrl.breaks, ctrl.spline_coefs,
        ctrl.bump_channel, ctrl.bump_mode, ctrl.bump_amp,
        np.asarray(y0, dtype=np.float64), int(n_steps), float(t_end))
    return np.asarray(states), np.asarray(defects)
