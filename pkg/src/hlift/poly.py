"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a map from exponent tuples to nonzero ``Fraction``
coefficients, together with an ordered variable list.  This is the
coefficient ring for every symbolic object in the package: frames,
coframes, differential forms, stratum equations.  All arithmetic is
exact; no zero coefficients are ever stored, so equality is structural.

The text grammar (shared with the CLI document formats)::

    expression := ['-'] term (('+'|'-') term)*
    term       := factor ('*' factor)* ('/' posint)?
    factor     := integer ('/' posint)? | var ('^' posint)?

Whitespace is insignificant.  ``x1^2/2`` therefore parses as half of
``x1^2``, and coefficients may be written ``3`` or ``3/4``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from .errors import InputError

Scalar = Union[Fraction, int, float]
Exponents = tuple

_ZERO = Fraction(0)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational number: {value!r}") from exc
    if isinstance(value, float):
        # Exactly representable decimals round-trip via str(); this keeps
        # document loading exact for inputs like 0.5.
        return Fraction(str(value))
    raise InputError(f"cannot interpret {value!r} as a rational number")


def format_fraction(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


class MultiPoly:
    """Immutable multivariate polynomial with rational coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exponents, Fraction]):
        object.__setattr__(self, "vars", tuple(vars))
        n = len(self.vars)
        clean = {}
        for exps, coef in terms.items():
            coef = coef if isinstance(coef, Fraction) else Fraction(coef)
            if len(exps) != n:
                raise InputError(f"exponent tuple {exps} does not match {n} variables")
            if coef != 0:
                clean[tuple(exps)] = coef
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("MultiPoly is immutable")

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(vars: Sequence[str]) -> "MultiPoly":
        return MultiPoly(vars, {})

    @staticmethod
    def const(vars: Sequence[str], value) -> "MultiPoly":
        c = as_fraction(value)
        return MultiPoly(vars, {(0,) * len(vars): c} if c else {})

    @staticmethod
    def var(vars: Sequence[str], name: str) -> "MultiPoly":
        vars = tuple(vars)
        if name not in vars:
            raise InputError(f"unknown variable {name!r}")
        exps = tuple(1 if v == name else 0 for v in vars)
        return MultiPoly(vars, {exps: Fraction(1)})

    # -- predicates ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * len(self.vars), _ZERO)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, indices: Iterable[int]) -> int:
        idx = tuple(indices)
        return max((sum(e[i] for i in idx) for e in self.terms), default=0)

    def is_homogeneous_in(self, indices: Iterable[int]) -> bool:
        """True when every term has the same total degree in the given
        variable positions (vacuously true for the zero polynomial)."""
        idx = tuple(indices)
        degrees = {sum(e[i] for i in idx) for e in self.terms}
        return len(degrees) <= 1

    # -- ring operations --------------------------------------------------

    def _check_same_vars(self, other: "MultiPoly") -> None:
        if self.vars != other.vars:
            raise InputError(f"variable lists differ: {self.vars} vs {other.vars}")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_same_vars(other)
        terms = dict(self.terms)
        for exps, coef in other.terms.items():
            terms[exps] = terms.get(exps, _ZERO) + coef
        return MultiPoly(self.vars, terms)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, MultiPoly):
            self._check_same_vars(other)
            terms: dict = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    key = tuple(a + b for a, b in zip(e1, e2))
                    terms[key] = terms.get(key, _ZERO) + c1 * c2
            return MultiPoly(self.vars, terms)
        if not isinstance(other, (int, Fraction, str, float)):
            return NotImplemented
        c = as_fraction(other)
        return MultiPoly(self.vars, {e: coef * c for e, coef in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise InputError("negative polynomial power")
        out = MultiPoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def diff(self, index: int) -> "MultiPoly":
        """Partial derivative with respect to the index-th variable."""
        terms: dict = {}
        for exps, coef in self.terms.items():
            e = exps[index]
            if e == 0:
                continue
            key = exps[:index] + (e - 1,) + exps[index + 1:]
            terms[key] = terms.get(key, _ZERO) + coef * e
        return MultiPoly(self.vars, terms)

    # -- evaluation & coordinate bookkeeping -------------------------------

    def eval(self, point: Sequence[Scalar]):
        """Evaluate at a point.  Exact when the point is rational; float
        arithmetic takes over as soon as any coordinate is a float."""
        if len(point) != len(self.vars):
            raise InputError(
                f"point of length {len(point)} for {len(self.vars)} variables")
        total = None
        for exps, coef in self.terms.items():
            value = coef
            for p, e in zip(point, exps):
                if e:
                    value = value * p ** e
            total = value if total is None else total + value
        if total is None:
            return 0.0 if any(isinstance(p, float) for p in point) else _ZERO
        return total

    def extend(self, new_vars: Sequence[str]) -> "MultiPoly":
        """Reinterpret over a larger variable list containing the current
        one (matched by name; order may differ)."""
        new_vars = tuple(new_vars)
        positions = []
        for v in self.vars:
            if v not in new_vars:
                raise InputError(f"variable {v!r} missing from {new_vars}")
            positions.append(new_vars.index(v))
        n = len(new_vars)
        terms = {}
        for exps, coef in self.terms.items():
            out = [0] * n
            for pos, e in zip(positions, exps):
                out[pos] = e
            terms[tuple(out)] = coef
        return MultiPoly(new_vars, terms)

    # -- equality, hashing, printing ---------------------------------------

    def __eq__(self, other) -> bool:
        return (isinstance(other, MultiPoly) and self.vars == other.vars
                and self.terms == other.terms)

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def sorted_terms(self):
        """Terms in descending graded-lexicographic order (deterministic)."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for exps, coef in self.sorted_terms():
            factors = []
            for name, e in zip(self.vars, exps):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(coef)
            if not factors:
                body = format_fraction(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_fraction(mag)] + factors)
            pieces.append(("- " if coef < 0 else "+ ") + body)
        text = " ".join(pieces)
        return "-" + text[2:] if text.startswith("- ") else text[2:]

    def __repr__(self) -> str:
        return f"MultiPoly({self})"


# ---------------------------------------------------------------------------
# Parsing


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def error(self, message: str):
        raise InputError(f"syntax error at position {self.pos}: {message} "
                         f"(in {self.text!r})")

    def take_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            self.error("expected an integer")
        return int(self.text[start:self.pos])

    def take_name(self) -> str:
        self.skip_ws()
        start = self.pos
        if self.pos >= len(self.text) or not (self.text[self.pos].isalpha()
                                              or self.text[self.pos] == "_"):
            self.error("expected a variable name")
        while self.pos < len(self.text) and (self.text[self.pos].isalnum()
                                             or self.text[self.pos] == "_"):
            self.pos += 1
        return self.text[start:self.pos]


def poly_parse(text: str, vars: Sequence[str]) -> MultiPoly:
    """Parse *text* into a polynomial over the given variables.

    Raises :class:`InputError` with a position on malformed input or an
    unknown variable name.  Printing via ``str`` and re-parsing is
    idempotent.
    """
    vars = tuple(vars)
    tok = _Tokenizer(text)
    result = MultiPoly.zero(vars)

    def parse_posint() -> int:
        mark = tok.pos
        value = tok.take_int()
        if value <= 0:
            tok.pos = mark
            tok.error("expected a positive integer")
        return value

    def parse_term() -> MultiPoly:
        coef = Fraction(1)
        exps = [0] * len(vars)

        def parse_factor():
            nonlocal coef
            ch = tok.peek()
            if ch.isdigit():
                coef *= tok.take_int()
            elif ch.isalpha() or ch == "_":
                mark = tok.pos
                name = tok.take_name()
                if name not in vars:
                    tok.pos = mark
                    tok.error(f"unknown variable {name!r}")
                power = 1
                if tok.peek() == "^":
                    tok.pos += 1
                    power = parse_posint()
                exps[vars.index(name)] += power
            else:
                tok.error("expected a coefficient or variable")
            if tok.peek() == "/":
                tok.pos += 1
                coef /= parse_posint()

        parse_factor()
        while tok.peek() == "*":
            tok.pos += 1
            parse_factor()
        return MultiPoly(vars, {tuple(exps): coef})

    sign = Fraction(1)
    if tok.peek() == "-":
        tok.pos += 1
        sign = Fraction(-1)
    elif tok.peek() == "+":
        tok.pos += 1
    if tok.peek() == "":
        tok.error("empty expression")
    result = result + parse_term() * sign
    while True:
        ch = tok.peek()
        if ch == "":
            break
        if ch == "+":
            sign = Fraction(1)
        elif ch == "-":
            sign = Fraction(-1)
        else:
            tok.error("expected '+' or '-'")
        tok.pos += 1
        result = result + parse_term() * sign
    return result


def poly_eval(p: MultiPoly, point: Sequence[Scalar]):
    """Evaluate ``p`` at ``point``; exact in rational mode."""
    return p.eval(point)
