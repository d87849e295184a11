"""Pointwise rank stratification toolkit.

Matrices of polynomials, their minors, exact ranks at rational points,
rank partitions of deterministic rational grids, and the rank of a
two-form restricted to the tangent space of a polynomial subvariety
(computed two ways: direct restriction and the wedge construction, which
must agree).

Stratum descriptions (:class:`StratumSpec`) are user-declared and verified
pointwise; nothing here synthesizes a stratification.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import InputError, PreconditionError
from .forms import PolyTwoForm
from .poly import MultiPoly


class FunctionMatrix:
    """Rectangular matrix of polynomials over a shared variable list."""

    __slots__ = ("rows", "cols", "vars", "entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]]):
        entries = tuple(tuple(row) for row in entries)
        if not entries or not entries[0]:
            raise InputError("function matrix must be nonempty")
        cols = len(entries[0])
        vars = entries[0][0].vars
        for row in entries:
            if len(row) != cols:
                raise InputError("ragged function matrix")
            for e in row:
                if e.vars != vars:
                    raise InputError("matrix entries disagree on variables")
        object.__setattr__(self, "rows", len(entries))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, key, value):  # pragma: no cover - defensive
        raise AttributeError("FunctionMatrix is immutable")

    @staticmethod
    def from_fields(fields) -> "FunctionMatrix":
        """Columns are the component vectors of the given vector fields."""
        fields = list(fields)
        if not fields:
            raise InputError("need at least one field")
        m = len(fields[0].components)
        return FunctionMatrix([[f.components[i] for f in fields] for i in range(m)])

    def eval(self, point):
        return [[e.eval(point) for e in row] for row in self.entries]


def _det(entries) -> MultiPoly:
    """Cofactor-expansion determinant of a square block of polynomials."""
    n = len(entries)
    if n == 1:
        return entries[0][0]
    vars = entries[0][0].vars
    out = MultiPoly.zero(vars)
    for j in range(n):
        if entries[0][j].is_zero():
            continue
        minor = [[entries[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = entries[0][j] * _det(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


def minors(FM: FunctionMatrix, k: int) -> list[MultiPoly]:
    """All k x k minors, in lexicographic order of (row subset, col subset)."""
    if not 1 <= k <= min(FM.rows, FM.cols):
        raise InputError(f"minor size {k} out of range for "
                         f"{FM.rows}x{FM.cols} matrix")
    out = []
    for rows in itertools.combinations(range(FM.rows), k):
        for cols in itertools.combinations(range(FM.cols), k):
            out.append(_det([[FM.entries[r][c] for c in cols] for r in rows]))
    return out


def rank_at(FM: FunctionMatrix, point) -> int:
    """Exact rank of the evaluated matrix at a rational point."""
    if len(point) != len(FM.vars):
        raise InputError("point dimension mismatch")
    return linalg.rank(FM.eval(point))


@dataclass(frozen=True)
class GridAxis:
    """Rational sample values for one variable."""

    name: str
    values: tuple

    @staticmethod
    def fixed(name: str, value) -> "GridAxis":
        return GridAxis(name, (Fraction(value),))

    @staticmethod
    def range(name: str, lo, hi, count: int) -> "GridAxis":
        lo, hi = Fraction(lo), Fraction(hi)
        if count < 1:
            raise InputError("grid axis needs at least one sample")
        if count == 1:
            return GridAxis(name, (lo,))
        step = (hi - lo) / (count - 1)
        return GridAxis(name, tuple(lo + i * step for i in range(count)))


@dataclass(frozen=True)
class RankPartitionReport:
    grid: tuple                  # GridAxis per variable, in variable order
    points: tuple                # sampled points
    ranks: tuple                 # rank per point
    histogram: dict
    dense_rank: int
    sub_locus: tuple             # points with rank < dense_rank

    def locus_for(self, r: int):
        return tuple(p for p, rk in zip(self.points, self.ranks) if rk == r)


def partition_grid(FM: FunctionMatrix, axes: Sequence[GridAxis]) -> RankPartitionReport:
    """Exact rank of FM at every point of the (deterministic, rational)
    product grid.  The maximal attained rank is reported as the
    grid-maximal ("dense") rank, with the sub-maximal locus listed."""
    by_name = {a.name: a for a in axes}
    missing = [v for v in FM.vars if v not in by_name]
    if missing:
        raise InputError(f"grid does not cover variables {missing}")
    ordered = [by_name[v] for v in FM.vars]
    if any(not a.values for a in ordered):
        raise InputError("empty grid axis")
    points = tuple(itertools.product(*(a.values for a in ordered)))
    ranks = tuple(rank_at(FM, p) for p in points)
    histogram: dict = {}
    for r in ranks:
        histogram[r] = histogram.get(r, 0) + 1
    dense = max(histogram)
    sub = tuple(p for p, r in zip(points, ranks) if r < dense)
    return RankPartitionReport(tuple(ordered), points, ranks, histogram, dense, sub)


# ---------------------------------------------------------------------------
# Stratum descriptions


@dataclass(frozen=True)
class StratumSpec:
    """A user-declared stratum, cut out by polynomial equations.

    For ambient "Z1" the variables are the base coordinates followed by the
    fiber coordinates a1..a_{m-l}; the stratum is interpreted as a piece of
    the level-n annihilator locus, so its equations and the complement of
    ``coframe_selection`` (whose fiber coordinates are pinned to zero)
    together cut that locus.  Equations must be fiber-homogeneous of joint
    degree 0 or 1 in the a-variables.  Eta-invariance of the resulting set
    is required from the caller, not verified symbolically; reports flag
    this.
    """

    name: str
    ambient: str                      # "M" or "Z1"
    level: int
    equations: tuple = ()
    inequations: tuple = ()
    coframe_selection: tuple = ()
    samples: tuple = ()               # sample points / covector points

    def __post_init__(self):
        if self.ambient not in ("M", "Z1"):
            raise InputError(f"ambient must be 'M' or 'Z1', got {self.ambient!r}")
        if self.level < 1:
            raise InputError("stratum level must be >= 1")
        if self.level > 1 and self.ambient == "Z1" and not self.coframe_selection:
            raise InputError("coframe selection required for level > 1")

    def validate_for(self, dist) -> None:
        """Check the declared data against a distribution's geometry."""
        corank = dist.dim - dist.rank
        if self.ambient == "Z1":
            fiber_idx = tuple(range(dist.dim, dist.dim + corank))
            for eq in self.equations:
                if len(eq.vars) != dist.dim + corank:
                    raise InputError(
                        f"stratum {self.name!r}: equation over wrong variables")
                if eq.degree_in(fiber_idx) > 1 or not eq.is_homogeneous_in(fiber_idx):
                    raise InputError(
                        f"stratum {self.name!r}: equation {eq} is not "
                        "fiber-homogeneous of degree 0 or 1")
            for i in self.coframe_selection:
                if not 0 <= i < corank:
                    raise InputError(
                        f"stratum {self.name!r}: coframe index {i} out of range")
        else:
            for eq in self.equations:
                if len(eq.vars) != dist.dim:
                    raise InputError(
                        f"stratum {self.name!r}: base equation over wrong variables")

    def selection_or_full(self, corank: int):
        return tuple(self.coframe_selection) if self.coframe_selection \
            else tuple(range(corank))

    def contains(self, point, tol: float | None = None) -> bool:
        """Membership check: equations vanish, inequations do not."""
        for eq in self.equations:
            v = eq.eval(point)
            if (abs(v) > tol) if tol is not None else (v != 0):
                return False
        for ineq in self.inequations:
            v = ineq.eval(point)
            if (abs(v) <= tol) if tol is not None else (v == 0):
                return False
        return True


# ---------------------------------------------------------------------------
# Rank of a two-form on a subvariety


def _tangent_constraints(eqs: Sequence[MultiPoly], point):
    return [[eq.diff(i).eval(point) for i in range(len(eq.vars))] for eq in eqs]


def two_form_rank_on_subvariety(omega: PolyTwoForm, eqs: Sequence[MultiPoly],
                                point) -> int:
    """Exact rank of omega restricted to the tangent space at ``point`` of
    the variety cut by ``eqs``.

    Preconditions: the point satisfies the equations exactly and their
    differentials are linearly independent there (minimality).
    """
    eqs = list(eqs)
    n = len(omega.vars)
    if len(point) != n:
        raise InputError("point dimension mismatch")
    for eq in eqs:
        if eq.eval(point) != 0:
            raise PreconditionError(f"point is not on the variety: {eq} != 0")
    grads = _tangent_constraints(eqs, point)
    if grads and linalg.rank(grads) != len(eqs):
        raise PreconditionError("equation differentials are dependent at the point")
    tangent = linalg.nullspace(grads, ncols=n)
    if not tangent:
        return 0
    Omega = omega.eval_matrix(point)
    k = len(tangent)
    restricted = [[sum(tangent[a][i] * Omega[i][j] * tangent[b][j]
                       for i in range(n) for j in range(n))
                   for b in range(k)] for a in range(k)]
    return linalg.rank(restricted)


def _wedge_covectors(forms: Sequence[Sequence], degrees: Sequence[int], n: int) -> dict:
    """Exact wedge of alternating forms at a point.

    Each form is a dict mapping strictly increasing index tuples to
    coefficients; 1-forms may be given as plain coefficient sequences.
    """
    def as_dict(form, degree):
        if isinstance(form, dict):
            return form
        return {(i,): c for i, c in enumerate(form) if c != 0}

    def merge(a: dict, b: dict) -> dict:
        out: dict = {}
        for ia, ca in a.items():
            for ib, cb in b.items():
                if set(ia) & set(ib):
                    continue
                combined = list(ia) + list(ib)
                perm = sorted(range(len(combined)), key=lambda t: combined[t])
                # parity of the sorting permutation
                sign, seen = 1, list(perm)
                for start in range(len(seen)):
                    while seen[start] != start:
                        tgt = seen[start]
                        seen[start], seen[tgt] = seen[tgt], seen[start]
                        sign = -sign
                key = tuple(sorted(combined))
                out[key] = out.get(key, Fraction(0)) + sign * ca * cb
        return {k: v for k, v in out.items() if v != 0}

    result = {(): Fraction(1)}
    for form, degree in zip(forms, degrees):
        result = merge(result, as_dict(form, degree))
    return result


def two_form_rank_via_wedge(omega: PolyTwoForm, eqs: Sequence[MultiPoly],
                            point) -> int:
    """Cross-check of :func:`two_form_rank_on_subvariety` through the wedge
    construction: build W = df_1 ^ ... ^ df_k ^ omega at the point, contract
    with every coordinate direction, and measure the span of the resulting
    (k+1)-forms.  The restricted rank is that span's dimension minus k
    (zero when W vanishes)."""
    eqs = list(eqs)
    n = len(omega.vars)
    for eq in eqs:
        if eq.eval(point) != 0:
            raise PreconditionError(f"point is not on the variety: {eq} != 0")
    grads = _tangent_constraints(eqs, point)
    if grads and linalg.rank(grads) != len(eqs):
        raise PreconditionError("equation differentials are dependent at the point")
    k0 = len(eqs)
    M = omega.eval_matrix(point)
    omega_dict = {(i, j): M[i][j] for i in range(n) for j in range(i + 1, n)
                  if M[i][j] != 0}
    W = _wedge_covectors(grads + [omega_dict], [1] * k0 + [2], n)
    if not W:
        return 0
    # Contract W with each coordinate vector e_a.
    basis_keys: dict = {}
    rows = []
    for a in range(n):
        contracted: dict = {}
        for idx, coef in W.items():
            if a not in idx:
                continue
            pos = idx.index(a)
            rest = idx[:pos] + idx[pos + 1:]
            contracted[rest] = contracted.get(rest, Fraction(0)) + (-1) ** pos * coef
        row = {k: v for k, v in contracted.items() if v != 0}
        for key in row:
            basis_keys.setdefault(key, len(basis_keys))
        rows.append(row)
    matrix = [[Fraction(0)] * len(basis_keys) for _ in rows]
    for r, row in enumerate(rows):
        for key, v in row.items():
            matrix[r][basis_keys[key]] = v
    span = linalg.rank(matrix)
    return span - k0
