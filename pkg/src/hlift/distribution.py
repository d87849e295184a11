"""Tangent distributions in graphical form and their Lie-theoretic data.

A distribution of rank l on an m-dimensional chart is given by a frame in
graphical normal form

    X_j = d/dx_j + sum_i f^i_j(x, y) d/dy_i,      j = 1..l,

where the first l coordinates are horizontal and the remaining m - l
vertical.  The annihilator coframe is alpha_i = dy_i - sum_j f^i_j dx_j
(derived automatically when not supplied).  On top of that this module
computes the iterated-bracket flag, pointwise growth vectors, the
bracket-generating step over sample sets, and curvature pairings.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .errors import InputError
from .forms import PolyOneForm, PolyVectorField, lie_bracket
from .poly import MultiPoly


class Distribution:
    """Immutable distribution in graphical normal form."""

    __slots__ = ("name", "dim", "rank", "coords", "frame", "coframe")

    def __init__(self, name: str, coords: Sequence[str],
                 frame: Sequence[PolyVectorField], rank: int,
                 coframe: Sequence[PolyOneForm] | None = None):
        coords = tuple(coords)
        m, l = len(coords), rank
        if not 1 <= l <= m:
            raise InputError(f"rank {l} out of range for dimension {m}")
        if len(set(coords)) != m:
            raise InputError("coordinate names must be distinct")
        for i in range(m - l):
            if f"a{i + 1}" in coords:
                raise InputError(
                    f"coordinate name a{i + 1} collides with a fiber coordinate")
        frame = tuple(frame)
        if len(frame) != l:
            raise InputError(f"{len(frame)} frame fields for rank {l}")
        one = MultiPoly.const(coords, 1)
        zero = MultiPoly.zero(coords)
        for j, X in enumerate(frame):
            if X.vars != coords:
                raise InputError("frame field over wrong coordinates")
            for i in range(l):
                expected = one if i == j else zero
                if X.components[i] != expected:
                    raise InputError(
                        f"frame is not graphical: field {j + 1} has component "
                        f"{X.components[i]} on {coords[i]}")
        if coframe is None:
            coframe = tuple(self._derived_coframe(coords, frame, l))
        else:
            coframe = tuple(coframe)
            if len(coframe) != m - l:
                raise InputError(f"{len(coframe)} coframe elements for corank {m - l}")
            for i, alpha in enumerate(coframe):
                if alpha.vars != coords:
                    raise InputError("coframe element over wrong coordinates")
                for k in range(m - l):
                    expected = one if k == i else zero
                    if alpha.components[l + k] != expected:
                        raise InputError(
                            f"coframe element {i + 1} is not normalized on "
                            f"d{coords[l + k]}")
                for j, X in enumerate(frame):
                    if not alpha.pair(X).is_zero():
                        raise InputError(
                            f"coframe element {i + 1} does not annihilate frame "
                            f"field {j + 1}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "dim", m)
        object.__setattr__(self, "rank", l)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "coframe", coframe)

    def __setattr__(self, key, value):  # pragma: no cover - defensive
        raise AttributeError("Distribution is immutable")

    @staticmethod
    def _derived_coframe(coords, frame, l):
        m = len(coords)
        for i in range(m - l):
            comps = [MultiPoly.zero(coords) for _ in range(m)]
            comps[l + i] = MultiPoly.const(coords, 1)
            for j, X in enumerate(frame):
                comps[j] = -X.components[l + i]
            yield PolyOneForm(comps)

    @property
    def corank(self) -> int:
        return self.dim - self.rank

    def vertical_coeff(self, i: int, j: int) -> MultiPoly:
        """f^i_j: the d/dy_i component of frame field X_j."""
        return self.frame[j].components[self.rank + i]

    def covector_row(self, fiber, point):
        """Coefficient row of sum_i fiber[i] * alpha_i at a base point."""
        values = [alpha.eval(point) for alpha in self.coframe]
        return tuple(sum(a * row[k] for a, row in zip(fiber, values))
                     for k in range(self.dim))

    def __repr__(self) -> str:
        return (f"Distribution({self.name!r}, dim={self.dim}, rank={self.rank}, "
                f"coords={self.coords})")


@dataclass(frozen=True)
class FlagReport:
    """Bracket generators per flag level; level 1 is the frame itself."""

    levels: tuple

    def generators(self, level: int):
        if not 1 <= level <= len(self.levels):
            raise InputError(f"flag level {level} not computed")
        return self.levels[level - 1]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def stabilized(self) -> bool:
        return (len(self.levels) >= 2
                and self.levels[-1] == self.levels[-2])


@dataclass(frozen=True)
class GrowthVector:
    ranks: tuple

    def __iter__(self):
        return iter(self.ranks)

    def __len__(self):
        return len(self.ranks)

    def __getitem__(self, i):
        return self.ranks[i]


@dataclass(frozen=True)
class StepReport:
    """Bracket-generating step over a sample set."""

    steps: tuple            # per-point step, None where not generated
    min_step: int | None
    max_step: int | None
    uniform: bool           # same step at every sample
    generated_everywhere: bool
    max_step_searched: int

    @property
    def verdict(self) -> str:
        if self.generated_everywhere:
            return f"bracket-generating of step {self.max_step}" if self.uniform \
                else f"bracket-generating, step varies in [{self.min_step}, {self.max_step}]"
        return f"not generated within max_step {self.max_step_searched}"


def lie_flag(dist: Distribution, max_step: int) -> FlagReport:
    """Iterated-bracket flag: each level extends the previous one by all
    pairwise brackets of its generators, pruning exact zeros and
    structural duplicates."""
    if max_step < 1:
        raise InputError("max_step must be >= 1")
    levels = [tuple(dist.frame)]
    for _ in range(1, max_step):
        current = levels[-1]
        new = list(current)
        seen = set(current)
        for a in range(len(current)):
            for b in range(a + 1, len(current)):
                w = lie_bracket(current[a], current[b])
                if w.is_zero() or w in seen or (-w) in seen:
                    continue
                seen.add(w)
                new.append(w)
        new_level = tuple(new)
        levels.append(new_level)
        if new_level == current:
            break
    return FlagReport(tuple(levels))


def growth_vector_at(dist: Distribution, point, flag: FlagReport | None = None,
                     max_step: int | None = None) -> GrowthVector:
    """Pointwise ranks of the flag levels, exact, truncated once the rank
    reaches the ambient dimension or the flag stops growing."""
    if len(point) != dist.dim:
        raise InputError(f"point of length {len(point)} on a {dist.dim}-manifold")
    if flag is None:
        flag = lie_flag(dist, max_step if max_step is not None else dist.dim)
    ranks = []
    for level in range(1, flag.depth + 1):
        gens = flag.generators(level)
        if level > 1 and gens == flag.generators(level - 1):
            break
        columns = [g.eval(point) for g in gens]
        r = linalg.rank([[columns[c][row] for c in range(len(columns))]
                         for row in range(dist.dim)])
        ranks.append(r)
        if r == dist.dim:
            break
    return GrowthVector(tuple(ranks))


def bracket_generating_step(dist: Distribution, points: Sequence,
                            max_step: int | None = None) -> StepReport:
    """Per-point bracket-generating step over a sample set."""
    points = list(points)
    if not points:
        raise InputError("empty sample set")
    depth = max_step if max_step is not None else dist.dim
    flag = lie_flag(dist, depth)
    steps = []
    for p in points:
        gv = growth_vector_at(dist, p, flag=flag)
        steps.append(len(gv) if gv[-1] == dist.dim else None)
    reached = [s for s in steps if s is not None]
    return StepReport(
        steps=tuple(steps),
        min_step=min(reached) if reached else None,
        max_step=max(reached) if reached else None,
        uniform=len(set(steps)) == 1 and bool(reached),
        generated_everywhere=len(reached) == len(steps),
        max_step_searched=depth,
    )


def curvature_at(dist: Distribution, point, v: Sequence, w: Sequence):
    """Curvature pairing at a point: the coframe values of the bracket of
    the constant-coefficient frame extensions of v and w.

    Returns the tuple (alpha_i([V, W])(point))_i of length m - l.  The dual
    pairing convention is d(alpha)(v, w) = -alpha([V, W]).
    """
    l = dist.rank
    if len(v) != l or len(w) != l:
        raise InputError(f"coefficient vectors must have length {l}")
    if len(point) != dist.dim:
        raise InputError("point dimension mismatch")
    v = [vi if isinstance(vi, (Fraction, float)) else Fraction(vi) for vi in v]
    w = [wi if isinstance(wi, (Fraction, float)) else Fraction(wi) for wi in w]
    bracket = PolyVectorField.zero(dist.coords)
    for j in range(l):
        for k in range(l):
            coef = v[j] * w[k]
            if coef:
                bracket = bracket + lie_bracket(dist.frame[j], dist.frame[k]) * coef
    value = bracket.eval(point)
    out = []
    for alpha in dist.coframe:
        row = alpha.eval(point)
        out.append(sum(a * b for a, b in zip(row, value)))
    return tuple(out)
