"""Polynomial vector fields and differential 1-/2-forms.

Everything lives over a fixed ordered variable list; coefficients are
exact polynomials.  A two-form stores only its (i < j) coefficients, the
(j, i) entry being implicitly the negative.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError
from .poly import MultiPoly


def _check_vars(a, b) -> None:
    if a.vars != b.vars:
        raise InputError(f"variable lists differ: {a.vars} vs {b.vars}")


class PolyVectorField:
    """Vector field sum_i components[i] * d/dx_i."""

    __slots__ = ("vars", "components")

    def __init__(self, components: Sequence[MultiPoly]):
        components = tuple(components)
        if not components:
            raise InputError("a vector field needs at least one component")
        vars = components[0].vars
        for c in components[1:]:
            if c.vars != vars:
                raise InputError("vector field components disagree on variables")
        if len(components) != len(vars):
            raise InputError(
                f"{len(components)} components for {len(vars)} variables")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("PolyVectorField is immutable")

    @staticmethod
    def zero(vars: Sequence[str]) -> "PolyVectorField":
        z = MultiPoly.zero(vars)
        return PolyVectorField((z,) * len(tuple(vars)))

    @staticmethod
    def coordinate(vars: Sequence[str], index: int) -> "PolyVectorField":
        vars = tuple(vars)
        comps = [MultiPoly.zero(vars) for _ in vars]
        comps[index] = MultiPoly.const(vars, 1)
        return PolyVectorField(comps)

    def apply(self, f: MultiPoly) -> MultiPoly:
        """Derivation: X(f) = sum_i X_i df/dx_i."""
        _check_vars(self, f)
        out = MultiPoly.zero(self.vars)
        for i, comp in enumerate(self.components):
            if not comp.is_zero():
                out = out + comp * f.diff(i)
        return out

    def eval(self, point):
        return tuple(c.eval(point) for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_vars(self, other)
        return PolyVectorField(tuple(a + b for a, b in
                                     zip(self.components, other.components)))

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField(tuple(-c for c in self.components))

    def __mul__(self, scalar) -> "PolyVectorField":
        return PolyVectorField(tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyVectorField)
                and self.components == other.components)

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        names = [f"d/d{v}" for v in self.vars]
        body = " + ".join(f"({c})*{n}" for c, n in zip(self.components, names)
                          if not c.is_zero())
        return body or "0"


class PolyOneForm:
    """One-form sum_i components[i] * dx_i."""

    __slots__ = ("vars", "components")

    def __init__(self, components: Sequence[MultiPoly]):
        components = tuple(components)
        if not components:
            raise InputError("a one-form needs at least one component")
        vars = components[0].vars
        for c in components[1:]:
            if c.vars != vars:
                raise InputError("one-form components disagree on variables")
        if len(components) != len(vars):
            raise InputError(f"{len(components)} components for {len(vars)} variables")
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "components", components)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("PolyOneForm is immutable")

    @staticmethod
    def differential(f: MultiPoly) -> "PolyOneForm":
        return PolyOneForm(tuple(f.diff(i) for i in range(len(f.vars))))

    @staticmethod
    def coordinate(vars: Sequence[str], index: int) -> "PolyOneForm":
        vars = tuple(vars)
        comps = [MultiPoly.zero(vars) for _ in vars]
        comps[index] = MultiPoly.const(vars, 1)
        return PolyOneForm(comps)

    def pair(self, X: PolyVectorField) -> MultiPoly:
        _check_vars(self, X)
        out = MultiPoly.zero(self.vars)
        for w, v in zip(self.components, X.components):
            out = out + w * v
        return out

    def eval(self, point):
        return tuple(c.eval(point) for c in self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __add__(self, other: "PolyOneForm") -> "PolyOneForm":
        _check_vars(self, other)
        return PolyOneForm(tuple(a + b for a, b in
                                 zip(self.components, other.components)))

    def __neg__(self) -> "PolyOneForm":
        return PolyOneForm(tuple(-c for c in self.components))

    def __mul__(self, scalar) -> "PolyOneForm":
        return PolyOneForm(tuple(c * scalar for c in self.components))

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyOneForm) and self.components == other.components

    def __hash__(self) -> int:
        return hash(self.components)

    def __repr__(self) -> str:
        body = " + ".join(f"({c})*d{v}" for c, v in zip(self.components, self.vars)
                          if not c.is_zero())
        return body or "0"


class PolyTwoForm:
    """Antisymmetric two-form; only i < j coefficients are stored."""

    __slots__ = ("vars", "comps")

    def __init__(self, vars: Sequence[str], comps: Mapping[tuple, MultiPoly]):
        vars = tuple(vars)
        clean = {}
        for (i, j), coef in comps.items():
            if coef.vars != vars:
                raise InputError("two-form coefficient over wrong variables")
            if i == j:
                if not coef.is_zero():
                    raise InputError("nonzero diagonal coefficient in a two-form")
                continue
            if i > j:
                i, j, coef = j, i, -coef
            if not 0 <= i < len(vars) and 0 <= j < len(vars):
                raise InputError(f"index pair ({i}, {j}) out of range")
            if (i, j) in clean:
                coef = clean[(i, j)] + coef
            if coef.is_zero():
                clean.pop((i, j), None)
            else:
                clean[(i, j)] = coef
        object.__setattr__(self, "vars", vars)
        object.__setattr__(self, "comps", clean)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("PolyTwoForm is immutable")

    @staticmethod
    def zero(vars: Sequence[str]) -> "PolyTwoForm":
        return PolyTwoForm(vars, {})

    def coefficient(self, i: int, j: int) -> MultiPoly:
        """Signed coefficient on dx_i ^ dx_j for any index order."""
        if i == j:
            return MultiPoly.zero(self.vars)
        if i < j:
            return self.comps.get((i, j), MultiPoly.zero(self.vars))
        return -self.comps.get((j, i), MultiPoly.zero(self.vars))

    def apply(self, X: PolyVectorField, Y: PolyVectorField) -> MultiPoly:
        _check_vars(self, X)
        _check_vars(self, Y)
        out = MultiPoly.zero(self.vars)
        for (i, j), coef in self.comps.items():
            out = out + coef * (X.components[i] * Y.components[j]
                                - X.components[j] * Y.components[i])
        return out

    def eval_matrix(self, point):
        """Skew matrix [omega(e_i, e_j)] at the point, as nested lists."""
        n = len(self.vars)
        exact = not any(isinstance(p, float) for p in point)
        zero = Fraction(0) if exact else 0.0
        M = [[zero] * n for _ in range(n)]
        for (i, j), coef in self.comps.items():
            v = coef.eval(point)
            M[i][j] = v
            M[j][i] = -v
        return M

    def is_zero(self) -> bool:
        return not self.comps

    def __add__(self, other: "PolyTwoForm") -> "PolyTwoForm":
        if self.vars != other.vars:
            raise InputError("two-forms over different variables")
        comps = dict(self.comps)
        for key, coef in other.comps.items():
            comps[key] = comps.get(key, MultiPoly.zero(self.vars)) + coef
        return PolyTwoForm(self.vars, comps)

    def __neg__(self) -> "PolyTwoForm":
        return PolyTwoForm(self.vars, {k: -c for k, c in self.comps.items()})

    def __mul__(self, scalar) -> "PolyTwoForm":
        return PolyTwoForm(self.vars, {k: c * scalar for k, c in self.comps.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyTwoForm) and self.vars == other.vars
                and self.comps == other.comps)

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.comps.items())))

    def __repr__(self) -> str:
        body = " + ".join(
            f"({c})*d{self.vars[i]}^d{self.vars[j]}"
            for (i, j), c in sorted(self.comps.items()))
        return body or "0"


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """Commutator [X, Y]: component k is X(Y_k) - Y(X_k).  Exact."""
    _check_vars(X, Y)
    return PolyVectorField(tuple(X.apply(Yk) - Y.apply(Xk)
                                 for Xk, Yk in zip(X.components, Y.components)))


def exterior_derivative(omega: PolyOneForm) -> PolyTwoForm:
    """d(omega) with (i, j) coefficient d(omega_j)/dx_i - d(omega_i)/dx_j."""
    n = len(omega.vars)
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = omega.components[j].diff(i) - omega.components[i].diff(j)
            if not c.is_zero():
                comps[(i, j)] = c
    return PolyTwoForm(omega.vars, comps)


def interior_product(v: PolyVectorField, omega: PolyTwoForm) -> PolyOneForm:
    """Contraction (i_v omega)_j = sum_i v_i omega_{ij}."""
    _check_vars(v, omega)
    n = len(omega.vars)
    out = [MultiPoly.zero(omega.vars) for _ in range(n)]
    for (i, j), coef in omega.comps.items():
        out[j] = out[j] + v.components[i] * coef
        out[i] = out[i] - v.components[j] * coef
    return PolyOneForm(out)


def wedge(alpha: PolyOneForm, beta: PolyOneForm) -> PolyTwoForm:
    """alpha ^ beta with (i, j) coefficient alpha_i beta_j - alpha_j beta_i."""
    _check_vars(alpha, beta)
    n = len(alpha.vars)
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = (alpha.components[i] * beta.components[j]
                 - alpha.components[j] * beta.components[i])
            if not c.is_zero():
                comps[(i, j)] = c
    return PolyTwoForm(alpha.vars, comps)
