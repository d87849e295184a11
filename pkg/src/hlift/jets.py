"""Jets of curves: reparametrization scaling, horizontality and
characteristic tests, the order-by-order lift through the control ODE, and
dimension/codimension audits for declared strata.

A jet stores Taylor coefficients c_1..c_r (derivatives divided by i!), so
the reparametrization action scales c_i by a^i.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .annihilator import (CovectorPoint, ambient_vars, liouville_two_form,
                          restricted_kernel)
from .distribution import Distribution
from .errors import InputError, PreconditionError
from .forms import PolyOneForm, PolyVectorField, interior_product
from .series import TaylorSeries, poly_on_series
from .strata import StratumSpec

AMBIENTS = ("M", "Z1", "controls")


class CurveJet:
    """r-jet of a curve: basepoint plus r rows of Taylor coefficients."""

    __slots__ = ("ambient", "order", "base", "taylor")

    def __init__(self, ambient: str, order: int, base: Sequence,
                 taylor: Sequence[Sequence]):
        if ambient not in AMBIENTS:
            raise InputError(f"ambient must be one of {AMBIENTS}")
        if order < 0:
            raise InputError("jet order must be >= 0")
        base = tuple(base)
        taylor = tuple(tuple(row) for row in taylor)
        if len(taylor) != order:
            raise InputError(f"need {order} Taylor rows, got {len(taylor)}")
        d = len(base)
        if any(len(row) != d for row in taylor):
            raise InputError("Taylor rows must match the base dimension")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "taylor", taylor)

    def __setattr__(self, key, value):  # pragma: no cover - defensive
        raise AttributeError("CurveJet is immutable")

    @property
    def dim(self) -> int:
        return len(self.base)

    def coefficient(self, order: int, index: int):
        return self.base[index] if order == 0 else self.taylor[order - 1][index]

    def series(self, index: int) -> TaylorSeries:
        return TaylorSeries(self.order, (self.base[index],)
                            + tuple(row[index] for row in self.taylor))

    def all_series(self) -> tuple:
        return tuple(self.series(i) for i in range(self.dim))

    def is_constant(self) -> bool:
        return all(c == 0 for row in self.taylor for c in row)

    def __eq__(self, other) -> bool:
        return (isinstance(other, CurveJet) and self.ambient == other.ambient
                and self.order == other.order and self.base == other.base
                and self.taylor == other.taylor)

    def __hash__(self) -> int:
        return hash((self.ambient, self.order, self.base, self.taylor))

    def __repr__(self) -> str:
        return (f"CurveJet({self.ambient!r}, order={self.order}, "
                f"base={self.base}, taylor={self.taylor})")


def rho_act(a, jet: CurveJet) -> CurveJet:
    """Reparametrization t -> a*t on Taylor coefficients: c_i -> a^i c_i."""
    if a == 0:
        raise PreconditionError("reparametrization factor must be nonzero")
    return CurveJet(jet.ambient, jet.order, jet.base,
                    tuple(tuple(a ** (i + 1) * c for c in row)
                          for i, row in enumerate(jet.taylor)))


def pullback_oneform_by_jet(omega: PolyOneForm, jet: CurveJet) -> TaylorSeries:
    """Series of omega(gamma'(t)) along a representative of the jet,
    truncated at order r - 1 (well defined at that order)."""
    if jet.order < 1:
        raise InputError("cannot pull back along an order-0 jet")
    if len(omega.vars) != jet.dim:
        raise InputError("form and jet live in different dimensions")
    r = jet.order
    comps = jet.all_series()
    total = None
    for j, coeff in enumerate(omega.components):
        if coeff.is_zero():
            continue
        value = poly_on_series(coeff, comps, r - 1) * comps[j].derivative()
        total = value if total is None else total + value
    if total is None:
        exact = not any(isinstance(c, float) for s in comps for c in s.coeffs)
        return TaylorSeries.constant(r - 1, Fraction(0) if exact else 0.0)
    return total


@dataclass(frozen=True)
class HorizontalityCheck:
    horizontal: bool
    residuals: tuple  # one series per coframe element


def is_horizontal_jet(dist: Distribution, jet: CurveJet) -> HorizontalityCheck:
    """A jet is horizontal when every coframe element pulls back to the
    zero series at order r - 1."""
    if jet.ambient != "M":
        raise InputError("horizontality applies to jets in the base manifold")
    if jet.dim != dist.dim:
        raise InputError("jet dimension does not match the model")
    if jet.order < 1:
        raise InputError("need a jet of order >= 1")
    residuals = tuple(pullback_oneform_by_jet(alpha, jet)
                      for alpha in dist.coframe)
    return HorizontalityCheck(all(s.is_zero() for s in residuals), residuals)


def ehresmann_jet_lift(dist: Distribution, control: CurveJet,
                       vertical_base: Sequence) -> CurveJet:
    """Solve the lifting ODE order by order on Taylor coefficients.

    The horizontal coordinates copy the control jet; the order-(k+1)
    vertical coefficient is 1/(k+1) times the order-k coefficient of
    sum_j f^i_j(x(t), y(t)) x_j'(t), with y known up to order k.
    """
    if control.ambient != "controls":
        raise InputError("expected a control-space jet")
    l, m = dist.rank, dist.dim
    if control.dim != l:
        raise InputError(f"control jet dimension {control.dim}, expected {l}")
    if control.order < 1:
        raise InputError("need a control jet of order >= 1")
    vertical_base = tuple(vertical_base)
    if len(vertical_base) != m - l:
        raise InputError(f"vertical base must have length {m - l}")
    r = control.order
    exact = not any(isinstance(c, float) for c in
                    control.base + vertical_base
                    + tuple(x for row in control.taylor for x in row))
    zero = Fraction(0) if exact else 0.0

    x_series = control.all_series()
    x_prime = [s.derivative() for s in x_series]   # order r - 1
    y_coeffs = [[vb] + [zero] * r for vb in vertical_base]

    for k in range(r):
        args = list(x_series) + [TaylorSeries(r, tuple(yc)) for yc in y_coeffs]
        for i in range(m - l):
            rhs_k = zero
            for j in range(l):
                f = dist.vertical_coeff(i, j)
                if f.is_zero():
                    continue
                term = poly_on_series(f, [s.truncate(k) for s in args], k) \
                    * x_prime[j].truncate(k)
                rhs_k = rhs_k + term.coeffs[k]
            y_coeffs[i][k + 1] = rhs_k / (k + 1) if exact else rhs_k / (k + 1.0)

    base = control.base + vertical_base
    taylor = tuple(tuple(control.taylor[k]) + tuple(y_coeffs[i][k + 1]
                                                    for i in range(m - l))
                   for k in range(r))
    return CurveJet("M", r, base, taylor)


def jet_project(dist: Distribution, jet: CurveJet) -> CurveJet:
    """Drop the vertical coordinates; exact left inverse of the lift."""
    if jet.ambient != "M":
        raise InputError("projection applies to jets in the base manifold")
    if jet.dim != dist.dim:
        raise InputError("jet dimension does not match the model")
    l = dist.rank
    return CurveJet("controls", jet.order, jet.base[:l],
                    tuple(row[:l] for row in jet.taylor))


@dataclass(frozen=True)
class CharacteristicCheck:
    characteristic: bool
    residuals: tuple            # one series per ambient coordinate direction
    projection_horizontal: bool
    constant: bool


def is_characteristic_jet(dist: Distribution, jetZ: CurveJet) -> CharacteristicCheck:
    """Contract the fibered two-form with every ambient coordinate
    direction, pull the resulting one-forms back along the jet, and require
    all residual series to vanish at order r - 1.  Also reports whether the
    projected jet is horizontal."""
    if jetZ.ambient != "Z1":
        raise InputError("characteristic tests apply to annihilator jets")
    D = dist.dim + dist.corank
    if jetZ.dim != D:
        raise InputError(f"jet dimension {jetZ.dim}, expected {D}")
    if jetZ.order < 1:
        raise InputError("need a jet of order >= 1")
    if all(c == 0 for c in jetZ.base[dist.dim:]):
        raise PreconditionError("jet based on the zero section")
    omega = liouville_two_form(dist)
    vars = ambient_vars(dist)
    residuals = []
    for j in range(D):
        contraction = interior_product(PolyVectorField.coordinate(vars, j), omega)
        residuals.append(pullback_oneform_by_jet(contraction, jetZ))
    projected = CurveJet("M", jetZ.order, jetZ.base[:dist.dim],
                         tuple(row[:dist.dim] for row in jetZ.taylor))
    horizontal = is_horizontal_jet(dist, projected).horizontal
    return CharacteristicCheck(all(s.is_zero() for s in residuals),
                               tuple(residuals), horizontal, jetZ.is_constant())


# ---------------------------------------------------------------------------
# Dimension audits


@dataclass(frozen=True)
class StratumAudit:
    stratum: str
    kind: str                 # "tangency" (annihilator stratum) or "submanifold"
    kernel_rank: int          # rank of the stratum's direction field
    stratum_dim: int
    family_dim: int           # kernel_rank * r + stratum_dim
    codim: int                # horizontal-jet dimension minus family_dim


@dataclass(frozen=True)
class DimensionAudit:
    r: int
    dim_horizontal: int             # l*r + m
    tangency_dimension_bound: int   # (l-1)(r-1) + 2m
    codim_lower_bound: int          # r - 2m - 1
    bound_informative: bool
    strata: tuple                   # StratumAudit entries


def _stratum_dimension(dist: Distribution, stratum: StratumSpec, samples) -> int:
    """Ambient dimension minus the (constant) rank of the stratum's
    tangency constraints at its sample points."""
    from .annihilator import _stratum_rows  # local import to avoid a cycle
    dims = set()
    for cp in samples:
        rows = _stratum_rows(dist, stratum, cp)
        D = dist.dim + dist.corank
        dims.add(D - (linalg.rank(rows) if rows else 0))
    if len(dims) != 1:
        raise PreconditionError(
            f"stratum {stratum.name!r} has nonconstant dimension over samples")
    return dims.pop()


def tangency_family_dimension(dist: Distribution, stratum: StratumSpec, r: int,
                              samples: Sequence[CovectorPoint] | None = None
                              ) -> StratumAudit:
    """Dimension of the family of order-r jets of curves drawn along the
    stratum's characteristic directions: one control jet per kernel
    direction plus a basepoint on the stratum."""
    if r < 1:
        raise InputError("jet order must be >= 1")
    if stratum.ambient != "Z1":
        raise InputError("tangency audits require a Z1-ambient stratum")
    samples = tuple(samples) if samples is not None else tuple(stratum.samples)
    if not samples:
        raise InputError(f"stratum {stratum.name!r} carries no sample points")
    ranks = {restricted_kernel(dist, cp, stratum).rank for cp in samples}
    if len(ranks) != 1:
        raise PreconditionError(
            f"kernel rank is not constant over samples of {stratum.name!r}: {ranks}")
    k_S = ranks.pop()
    l, m = dist.rank, dist.dim
    if not k_S < l:
        raise PreconditionError(
            f"stratum {stratum.name!r} has kernel rank {k_S} >= rank {l}")
    dim_S = _stratum_dimension(dist, stratum, samples)
    family = k_S * r + dim_S
    assert family <= l * r + 2 * m, "family dimension exceeds the global bound"
    return StratumAudit(stratum.name, "tangency", k_S, dim_S, family,
                        (l * r + m) - family)


def submanifold_family_dimension(dist: Distribution, stratum: StratumSpec,
                                 r: int,
                                 samples: Sequence | None = None) -> StratumAudit:
    """Analogous count for horizontal jets tangent to a base stratum:
    directions are the intersection of the distribution with the stratum's
    tangent space."""
    if r < 1:
        raise InputError("jet order must be >= 1")
    if stratum.ambient != "M":
        raise InputError("submanifold audits require an M-ambient stratum")
    samples = tuple(samples) if samples is not None else tuple(stratum.samples)
    if not samples:
        raise InputError(f"stratum {stratum.name!r} carries no sample points")
    m, l = dist.dim, dist.rank
    ranks = set()
    dims = set()
    for p in samples:
        if not stratum.contains(p):
            raise PreconditionError(
                f"sample {p} is not on stratum {stratum.name!r}")
        grads = [[eq.diff(i).eval(p) for i in range(m)] for eq in stratum.equations]
        dims.add(m - (linalg.rank(grads) if grads else 0))
        rows = grads + [list(alpha.eval(p)) for alpha in dist.coframe]
        ranks.add(m - linalg.rank(rows))
    if len(ranks) != 1 or len(dims) != 1:
        raise PreconditionError(
            f"stratum {stratum.name!r} is not constant-rank over its samples")
    k_S, dim_S = ranks.pop(), dims.pop()
    if not k_S < l:
        raise PreconditionError(
            f"stratum {stratum.name!r} meets the distribution in full rank")
    family = k_S * r + dim_S
    return StratumAudit(stratum.name, "submanifold", k_S, dim_S, family,
                        (l * r + m) - family)


def inadmissible_codim_bound(dist: Distribution, r: int,
                             strata: Sequence[StratumSpec] = ()) -> DimensionAudit:
    """Assemble the order-r audit: horizontal-jet dimension l*r + m, the
    stated tangency-family bound (l-1)(r-1) + 2m, the codimension lower
    bound r - 2m - 1, and per-stratum computed dimensions."""
    if r < 1:
        raise InputError("jet order must be >= 1")
    l, m = dist.rank, dist.dim
    entries = []
    for stratum in strata:
        if stratum.ambient == "Z1":
            entries.append(tangency_family_dimension(dist, stratum, r))
        else:
            entries.append(submanifold_family_dimension(dist, stratum, r))
    bound = r - 2 * m - 1
    return DimensionAudit(
        r=r,
        dim_horizontal=l * r + m,
        tangency_dimension_bound=(l - 1) * (r - 1) + 2 * m,
        codim_lower_bound=bound,
        bound_informative=bound > 0,
        strata=tuple(entries),
    )
