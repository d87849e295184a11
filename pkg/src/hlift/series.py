"""Truncated univariate Taylor series.

A series of order r stores the coefficients c_0..c_r of a curve component
t -> c_0 + c_1 t + ... + c_r t^r.  All arithmetic truncates at the stated
order.  Coefficients are Fractions in exact mode or floats in numeric
mode; a single computation never mixes the two.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .poly import MultiPoly


class TaylorSeries:
    """Coefficients c_0..c_order of a truncated expansion at t = 0."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Sequence):
        if order < 0:
            raise InputError("series order must be >= 0")
        if len(coeffs) != order + 1:
            raise InputError(f"need {order + 1} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("TaylorSeries is immutable")

    @staticmethod
    def constant(order: int, value) -> "TaylorSeries":
        zero = 0.0 if isinstance(value, float) else Fraction(0)
        return TaylorSeries(order, (value,) + (zero,) * order)

    def _zero(self):
        return 0.0 if any(isinstance(c, float) for c in self.coeffs) else Fraction(0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def truncate(self, order: int) -> "TaylorSeries":
        if order > self.order:
            raise InputError("cannot extend a truncated series")
        return TaylorSeries(order, self.coeffs[:order + 1])

    def __add__(self, other: "TaylorSeries") -> "TaylorSeries":
        order = min(self.order, other.order)
        return TaylorSeries(order, tuple(a + b for a, b in
                                         zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TaylorSeries") -> "TaylorSeries":
        order = min(self.order, other.order)
        return TaylorSeries(order, tuple(a - b for a, b in
                                         zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "TaylorSeries":
        return TaylorSeries(self.order, tuple(-c for c in self.coeffs))

    def __mul__(self, other) -> "TaylorSeries":
        if isinstance(other, TaylorSeries):
            order = min(self.order, other.order)
            zero = self._zero()
            out = [zero] * (order + 1)
            for i, a in enumerate(self.coeffs[:order + 1]):
                if a == 0:
                    continue
                for j in range(order + 1 - i):
                    b = other.coeffs[j]
                    if b != 0:
                        out[i + j] += a * b
            return TaylorSeries(order, out)
        return TaylorSeries(self.order, tuple(c * other for c in self.coeffs))

    __rmul__ = __mul__

    def derivative(self) -> "TaylorSeries":
        """Coefficient series of the derivative; drops one order."""
        if self.order == 0:
            raise InputError("cannot differentiate an order-0 series")
        return TaylorSeries(self.order - 1,
                            tuple((i + 1) * self.coeffs[i + 1]
                                  for i in range(self.order)))

    def eval(self, t):
        total = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            total = total * t + c
        return total

    def __eq__(self, other) -> bool:
        return (isinstance(other, TaylorSeries) and self.order == other.order
                and self.coeffs == other.coeffs)

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __repr__(self) -> str:
        return f"TaylorSeries(order={self.order}, coeffs={self.coeffs})"


def poly_on_series(p: MultiPoly, args: Sequence[TaylorSeries], order: int) -> TaylorSeries:
    """Taylor expansion of p(args(t)) truncated at the requested order.

    All argument series must have order >= the requested one and there must
    be one per polynomial variable.
    """
    if len(args) != len(p.vars):
        raise InputError(f"{len(p.vars)} variables but {len(args)} argument series")
    for s in args:
        if s.order < order:
            raise InputError("argument series order below requested truncation")
    exact = not any(isinstance(c, float) for s in args for c in s.coeffs)
    zero = Fraction(0) if exact else 0.0
    one_series = TaylorSeries.constant(order, Fraction(1) if exact else 1.0)

    # Cache powers of each (truncated) argument as they are needed.
    truncated = [s.truncate(order) for s in args]
    powers: list[dict[int, TaylorSeries]] = [{0: one_series, 1: s} for s in truncated]

    def arg_power(i: int, e: int) -> TaylorSeries:
        cache = powers[i]
        if e not in cache:
            half = arg_power(i, e // 2)
            sq = half * half
            cache[e] = sq if e % 2 == 0 else sq * truncated[i]
        return cache[e]

    total = TaylorSeries(order, (zero,) * (order + 1))
    for exps, coef in p.sorted_terms():
        term = one_series
        for i, e in enumerate(exps):
            if e:
                term = term * arg_power(i, e)
        total = total + term * (coef if exact else float(coef))
    return total
