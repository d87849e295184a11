"""Geometry of the annihilator bundle inside the cotangent bundle.

The annihilator of a graphical distribution is coordinatized by the base
coordinates plus fiber coefficients a_1..a_{m-l} over the coframe.  The
canonical one-form restricts to sum_i a_i alpha_i, whose differential

    sum_i da_i ^ alpha_i + a_i d(alpha_i)

governs abnormality: curves admitting a lift annihilating this two-form
away from the zero section are exactly the singular (abnormal) ones.
This module evaluates that two-form, computes its (restricted) kernels
exactly or numerically, locates covectors in the annihilator flag, checks
the kernel-restriction identity on declared strata, and integrates the
rank-one characteristic line field.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg
from .distribution import Distribution, FlagReport, lie_flag
from .errors import InputError, NumericalError, PreconditionError
from .forms import (PolyOneForm, PolyTwoForm, exterior_derivative, wedge)
from .poly import MultiPoly
from .strata import StratumSpec


@dataclass(frozen=True)
class CovectorPoint:
    """Point of the annihilator: base point plus fiber coefficients over
    the coframe.  Entries are Fractions (exact mode) or floats."""

    base: tuple
    fiber: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(self.base))
        object.__setattr__(self, "fiber", tuple(self.fiber))

    @property
    def point(self) -> tuple:
        return self.base + self.fiber

    def is_exact(self) -> bool:
        return not any(isinstance(x, float) for x in self.point)

    def as_float(self) -> "CovectorPoint":
        return CovectorPoint(tuple(float(x) for x in self.base),
                             tuple(float(x) for x in self.fiber))

    def fiber_is_zero(self, tol: float | None = None) -> bool:
        if tol is None:
            return all(a == 0 for a in self.fiber)
        return all(abs(a) <= tol for a in self.fiber)


@dataclass(frozen=True)
class KernelBasis:
    """Basis of a kernel subspace in annihilator coordinates (base
    directions first, then fiber directions)."""

    vectors: tuple
    rank: int

    def base_parts(self, m: int):
        return tuple(v[:m] for v in self.vectors)


@dataclass(frozen=True)
class CorankReport:
    corank_full: int        # corank of the fibered two-form at the covector
    corank_on_frame: int    # corank of the frozen-fiber curvature pairing
    equal: bool


def fiber_names(dist: Distribution) -> tuple:
    return tuple(f"a{i + 1}" for i in range(dist.corank))


def ambient_vars(dist: Distribution) -> tuple:
    """Base coordinates followed by fiber coordinates."""
    return dist.coords + fiber_names(dist)


def liouville_two_form(dist: Distribution,
                       selection: Sequence[int] | None = None) -> PolyTwoForm:
    """The fibered two-form sum_i da_i ^ alpha_i + a_i d(alpha_i) over the
    selected coframe elements (all of them by default; a proper subset
    describes a deeper annihilator level declared via a stratum)."""
    corank = dist.corank
    if selection is None:
        selection = range(corank)
    selection = tuple(selection)
    if not selection or any(not 0 <= i < corank for i in selection) \
            or len(set(selection)) != len(selection):
        raise InputError(f"invalid coframe selection {selection}")
    vars = ambient_vars(dist)
    total = PolyTwoForm.zero(vars)
    for i in selection:
        alpha = PolyOneForm(tuple(c.extend(vars) for c in dist.coframe[i].components)
                            + tuple(MultiPoly.zero(vars) for _ in range(corank)))
        da = PolyOneForm.coordinate(vars, dist.dim + i)
        a = MultiPoly.var(vars, vars[dist.dim + i])
        d_alpha_base = exterior_derivative(dist.coframe[i])
        d_alpha = PolyTwoForm(vars, {k: c.extend(vars)
                                     for k, c in d_alpha_base.comps.items()})
        total = total + wedge(da, alpha) + d_alpha * a
    return total


_FORM_CACHE: dict = {}


def _full_form(dist: Distribution) -> PolyTwoForm:
    """Memoized full-selection fibered two-form (hot in the integrator)."""
    key = id(dist)
    hit = _FORM_CACHE.get(key)
    if hit is None or hit[0] is not dist:
        hit = (dist, liouville_two_form(dist))
        _FORM_CACHE[key] = hit
    return hit[1]


def eta_act(c, cp: CovectorPoint) -> CovectorPoint:
    """Fiber dilation: base unchanged, fiber scaled by the nonzero c."""
    if c == 0:
        raise PreconditionError("dilation factor must be nonzero")
    return CovectorPoint(cp.base, tuple(a * c for a in cp.fiber))


# ---------------------------------------------------------------------------
# Constraint assembly


def _check_cp(dist: Distribution, cp: CovectorPoint) -> None:
    if len(cp.base) != dist.dim or len(cp.fiber) != dist.corank:
        raise InputError("covector point dimensions do not match the model")


def _xi_rows(dist: Distribution, cp: CovectorPoint):
    """One row per coframe element: its base-coefficient row at cp.base,
    zero on the fiber block (cutting out lifts of distribution vectors)."""
    fiber_zero = (Fraction(0),) * dist.corank if cp.is_exact() else (0.0,) * dist.corank
    return [tuple(alpha.eval(cp.base)) + fiber_zero for alpha in dist.coframe]


def _stratum_rows(dist: Distribution, stratum: StratumSpec, cp: CovectorPoint):
    """Tangency constraints of the stratum (as a piece of its annihilator
    level): equation gradients plus pins on unselected fiber coordinates."""
    D = dist.dim + dist.corank
    exact = cp.is_exact()
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    rows = [[eq.diff(i).eval(cp.point) for i in range(D)]
            for eq in stratum.equations]
    selection = stratum.selection_or_full(dist.corank)
    for j in range(dist.corank):
        if j not in selection:
            row = [zero] * D
            row[dist.dim + j] = one
            rows.append(row)
    return rows


def _omega_matrix(dist: Distribution, cp: CovectorPoint):
    return _full_form(dist).eval_matrix(cp.point)


def _pairing_rows(Omega, tangent_basis):
    """Rows pairing against a tangent basis: v satisfies them iff the
    two-form annihilates v against every basis vector."""
    n = len(Omega)
    rows = []
    for w in tangent_basis:
        rows.append([sum(Omega[i][j] * w[j] for j in range(n)) for i in range(n)])
    return rows


def _nullspace(rows, ncols: int, exact: bool, rank_tol: float):
    if exact:
        return linalg.nullspace(rows, ncols=ncols)
    basis = linalg.nullspace_f(np.array(rows, dtype=float).reshape(-1, ncols)
                               if rows else np.zeros((0, ncols)), ncols, rank_tol)
    return [tuple(float(x) for x in row) for row in basis]


# ---------------------------------------------------------------------------
# Kernels and coranks


def characteristic_kernel(dist: Distribution, cp: CovectorPoint,
                          rank_tol: float = linalg.DEFAULT_RANK_TOL) -> KernelBasis:
    """Kernel of the fibered two-form at a covector away from the zero
    section.  In exact mode the result is the canonical reduced-echelon
    basis, every vector's base part lies in the distribution, and fiber
    parts are uniquely determined by base parts (both are checked)."""
    _check_cp(dist, cp)
    if cp.fiber_is_zero(None if cp.is_exact() else rank_tol):
        raise PreconditionError("covector on the zero section has no "
                                "characteristic meaning")
    exact = cp.is_exact()
    D = dist.dim + dist.corank
    Omega = _omega_matrix(dist, cp)
    basis = _nullspace(Omega, D, exact, rank_tol)
    if exact:
        for v in basis:
            for row in _xi_rows(dist, cp):
                assert sum(a * b for a, b in zip(row, v)) == 0, \
                    "kernel vector does not project into the distribution"
        base_parts = [v[:dist.dim] for v in basis]
        assert linalg.rank(base_parts) == len(basis) if basis else True, \
            "kernel vector is not determined by its base projection"
    return KernelBasis(tuple(tuple(v) for v in basis), len(basis))


def verify_corank(dist: Distribution, cp: CovectorPoint) -> CorankReport:
    """Corank of the fibered two-form at cp versus the corank of the
    frozen-fiber curvature pairing on the frame at cp.base."""
    _check_cp(dist, cp)
    if cp.fiber_is_zero():
        raise PreconditionError("zero fiber")
    exact = cp.is_exact()
    D = dist.dim + dist.corank
    Omega = _omega_matrix(dist, cp)
    rank_full = linalg.rank(Omega) if exact else linalg.rank_f(np.array(Omega))
    # Frozen-fiber two-form sum_i a_i d(alpha_i), paired on the frame.
    l = dist.rank
    d_alphas = [exterior_derivative(alpha) for alpha in dist.coframe]
    pairing = [[None] * l for _ in range(l)]
    for j in range(l):
        for k in range(l):
            total = Fraction(0) if exact else 0.0
            for i, d_alpha in enumerate(d_alphas):
                val = d_alpha.apply(dist.frame[j], dist.frame[k]).eval(cp.base)
                total = total + cp.fiber[i] * val
            pairing[j][k] = total
    rank_pair = linalg.rank(pairing) if exact else linalg.rank_f(np.array(pairing))
    c_full, c_pair = D - rank_full, l - rank_pair
    return CorankReport(c_full, c_pair, c_full == c_pair)


def annihilator_level(dist: Distribution, cp: CovectorPoint,
                      flag: FlagReport | None = None) -> int:
    """The deepest flag level whose generators the covector annihilates at
    its base point (level 1 is guaranteed by coframe/frame duality)."""
    _check_cp(dist, cp)
    if cp.fiber_is_zero():
        raise PreconditionError("zero fiber")
    if flag is None:
        flag = lie_flag(dist, dist.dim)
    row = dist.covector_row(cp.fiber, cp.base)
    level = 0
    for n in range(1, flag.depth + 1):
        gens = flag.generators(n)
        if all(sum(r * v for r, v in zip(row, g.eval(cp.base))) == 0
               for g in gens):
            level = n
        else:
            break
    return level


def restricted_kernel(dist: Distribution, cp: CovectorPoint,
                      stratum: StratumSpec,
                      rank_tol: float = linalg.DEFAULT_RANK_TOL) -> KernelBasis:
    """Triple intersection at cp: tangent to the stratum, in the kernel of
    the two-form restricted to the stratum's annihilator level, and with
    base projection in the distribution."""
    _check_cp(dist, cp)
    if stratum.ambient != "Z1":
        raise InputError("restricted kernels require a Z1-ambient stratum")
    stratum.validate_for(dist)
    exact = cp.is_exact()
    tol = None if exact else rank_tol
    if not stratum.contains(cp.point, tol):
        raise PreconditionError(
            f"covector is not on stratum {stratum.name!r}")
    D = dist.dim + dist.corank
    t_rows = _stratum_rows(dist, stratum, cp)
    tangent = _nullspace(t_rows, D, exact, rank_tol)
    Omega = _omega_matrix(dist, cp)
    rows = list(t_rows) + _pairing_rows(Omega, tangent) + _xi_rows(dist, cp)
    basis = _nullspace(rows, D, exact, rank_tol)
    return KernelBasis(tuple(tuple(v) for v in basis), len(basis))


def verify_lifting_identity(dist: Distribution, cp: CovectorPoint,
                            stratum: StratumSpec) -> bool:
    """Exact subspace equality of (full-kernel vectors tangent to the
    stratum's annihilator level) and (level-restricted kernel vectors whose
    base projection lies in the distribution)."""
    _check_cp(dist, cp)
    if not cp.is_exact():
        raise InputError("the lifting identity check is exact-only")
    stratum.validate_for(dist)
    if not stratum.contains(cp.point):
        raise PreconditionError(f"covector is not on stratum {stratum.name!r}")
    D = dist.dim + dist.corank
    t_rows = _stratum_rows(dist, stratum, cp)
    Omega = _omega_matrix(dist, cp)
    lhs = linalg.nullspace([list(r) for r in Omega] + t_rows, ncols=D)
    rhs = restricted_kernel(dist, cp, stratum).vectors
    return linalg.span_equal(lhs, rhs, D)


# ---------------------------------------------------------------------------
# Characteristic curve integration


@dataclass(frozen=True)
class CharacteristicTrajectory:
    times: np.ndarray
    points: np.ndarray          # rows in annihilator coordinates
    base_points: np.ndarray     # rows projected to the base
    kernel_ranks: tuple
    residuals: np.ndarray       # coframe pairing of the base velocity
    completed: bool
    warning: str | None = None


def integrate_characteristic(dist: Distribution, cp0: CovectorPoint,
                             stratum: StratumSpec, T: float = 1.0,
                             h: float = 1e-3,
                             rank_tol: float = linalg.DEFAULT_RANK_TOL
                             ) -> CharacteristicTrajectory:
    """Integrate the unit characteristic line field along a stratum whose
    restricted kernel is rank one, starting from cp0.

    Stops with a partial trajectory if the kernel rank changes along the
    way; every accepted step carries a rank certificate and the coframe
    residual of the projected velocity.
    """
    if h <= 0 or T <= 0:
        raise InputError("need positive duration and step")
    if h < 1e-12:
        raise NumericalError("step underflow")
    cp0 = cp0.as_float()
    start = restricted_kernel(dist, cp0, stratum, rank_tol)
    if start.rank != 1:
        raise PreconditionError(
            f"kernel rank {start.rank} at the start (need exactly 1)")
    D = dist.dim + dist.corank
    m = dist.dim

    prev = np.array(start.vectors[0], dtype=float)
    idx = np.argmax(np.abs(prev))
    if prev[idx] < 0:
        prev = -prev

    def direction(point: np.ndarray, ref: np.ndarray):
        cp = CovectorPoint(tuple(point[:m]), tuple(point[m:]))
        try:
            kb = restricted_kernel(dist, cp, stratum, rank_tol)
        except PreconditionError:
            # numerical drift off the stratum: halt rather than crash
            return None, "off stratum"
        if kb.rank != 1:
            return None, f"kernel rank {kb.rank}"
        v = np.array(kb.vectors[0], dtype=float)
        v /= np.linalg.norm(v)
        if np.dot(v, ref) < 0:
            v = -v
        return v, 1

    n_steps = max(1, round(T / h))
    dt = T / n_steps
    times = [0.0]
    pts = [np.array(cp0.point, dtype=float)]
    ranks = [1]
    residuals = [_coframe_residual(dist, pts[0], prev)]
    completed = True
    warning = None
    p = pts[0]
    for k in range(n_steps):
        k1, r1 = direction(p, prev)
        if k1 is None:
            completed, warning = False, f"{r1} at t={k * dt:.6f}"
            break
        k2, r2 = direction(p + 0.5 * dt * k1, k1)
        k3, r3 = direction(p + 0.5 * dt * k2, k1) if k2 is not None else (None, r2)
        k4, r4 = direction(p + dt * k3, k1) if k3 is not None else (None, r3)
        if k2 is None or k3 is None or k4 is None:
            bad = next(r for v, r in ((k2, r2), (k3, r3), (k4, r4)) if v is None)
            completed, warning = False, f"{bad} inside step {k}"
            break
        if not np.all(np.isfinite(k4)):
            raise NumericalError("non-finite characteristic direction")
        p = p + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        prev = k1
        dir_here, r_here = direction(p, prev)
        if dir_here is None:
            completed, warning = False, f"{r_here} at t={(k + 1) * dt:.6f}"
            break
        times.append((k + 1) * dt)
        pts.append(p)
        ranks.append(r_here)
        residuals.append(_coframe_residual(dist, p, dir_here))
    pts_arr = np.array(pts)
    return CharacteristicTrajectory(
        times=np.array(times), points=pts_arr, base_points=pts_arr[:, :m],
        kernel_ranks=tuple(ranks), residuals=np.array(residuals),
        completed=completed, warning=warning)


def _coframe_residual(dist: Distribution, point: np.ndarray, direction) -> float:
    base = tuple(float(x) for x in point[:dist.dim])
    vel = direction[:dist.dim]
    worst = 0.0
    for alpha in dist.coframe:
        row = alpha.eval(base)
        worst = max(worst, abs(sum(float(r) * float(v) for r, v in zip(row, vel))))
    return worst
