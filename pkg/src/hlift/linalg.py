"""Small dense linear algebra, exact over Fractions and numeric over floats.

The exact routines use plain Gaussian elimination with exact pivots; the
numeric ones defer to numpy's SVD with a relative tolerance.  Matrices are
nested sequences; nothing here is performance critical.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

import numpy as np

DEFAULT_RANK_TOL = 1e-9


def _to_rows(matrix) -> List[List[Fraction]]:
    return [list(row) for row in matrix]


def rref(matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row-echelon form and pivot column list (exact)."""
    rows = _to_rows(matrix)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1, 1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(matrix) -> int:
    """Exact rank of a Fraction matrix."""
    if not matrix:
        return 0
    return len(rref(matrix)[1])


def nullspace(matrix, ncols: int | None = None) -> list[tuple[Fraction, ...]]:
    """Exact kernel basis of a Fraction matrix acting on column vectors.

    The basis is the canonical one read off the reduced echelon form: one
    vector per free column, with entry 1 in that column.
    """
    rows = _to_rows(matrix)
    if ncols is None:
        if not rows:
            raise ValueError("need ncols for an empty constraint system")
        ncols = len(rows[0])
    if not rows:
        return [tuple(Fraction(1) if i == j else Fraction(0) for i in range(ncols))
                for j in range(ncols)]
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -reduced[r][fc]
        basis.append(tuple(vec))
    return basis


def span_equal(basis_a: Sequence[Sequence[Fraction]],
               basis_b: Sequence[Sequence[Fraction]],
               ncols: int) -> bool:
    """Exact equality of the row spans of two (possibly empty) bases."""
    ra = rref([list(v) for v in basis_a])[0] if basis_a else []
    rb = rref([list(v) for v in basis_b])[0] if basis_b else []
    strip = lambda rows: [tuple(r) for r in rows if any(x != 0 for x in r)]
    return strip(ra) == strip(rb)


def solve(matrix, rhs) -> list[Fraction]:
    """Solve a square exact system; raises ValueError when singular."""
    n = len(matrix)
    aug = [list(row) + [b] for row, b in zip(matrix, rhs)]
    reduced, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("singular system")
    return [reduced[i][n] for i in range(n)]


# ---------------------------------------------------------------------------
# Float-mode counterparts


def rank_f(matrix: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> int:
    """Numeric rank: singular values below tol * largest count as zero."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def nullspace_f(matrix: np.ndarray, ncols: int,
                tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Numeric kernel basis (rows of the returned array)."""
    a = np.asarray(matrix, dtype=float)
    if a.size == 0:
        return np.eye(ncols)
    _, s, vt = np.linalg.svd(a)
    if s.size == 0 or s[0] == 0.0:
        r = 0
    else:
        r = int(np.sum(s > tol * s[0]))
    return vt[r:]
