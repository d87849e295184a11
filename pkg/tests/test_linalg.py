import random
from fractions import Fraction

import numpy as np
import pytest

from hlift import linalg

from _oracle import orank


def random_matrix(rng, rows, cols):
    return [[Fraction(rng.randint(-5, 5), rng.randint(1, 4))
             for _ in range(cols)] for _ in range(rows)]


def test_rank_matches_bareiss_oracle():
    rng = random.Random(3)
    for _ in range(40):
        rows, cols = rng.randint(1, 5), rng.randint(1, 7)
        M = random_matrix(rng, rows, cols)
        assert linalg.rank(M) == orank(M)


def test_nullspace_vectors_annihilated():
    rng = random.Random(5)
    for _ in range(25):
        M = random_matrix(rng, rng.randint(1, 4), rng.randint(2, 6))
        basis = linalg.nullspace(M)
        cols = len(M[0])
        assert len(basis) == cols - linalg.rank(M)
        for v in basis:
            for row in M:
                assert sum(a * b for a, b in zip(row, v)) == 0


def test_nullspace_of_empty_system_is_full():
    basis = linalg.nullspace([], ncols=3)
    assert len(basis) == 3


def test_span_equal():
    e1 = (Fraction(1), Fraction(0), Fraction(0))
    e2 = (Fraction(0), Fraction(1), Fraction(0))
    mixed = (Fraction(2), Fraction(3), Fraction(0))
    assert linalg.span_equal([e1, e2], [mixed, e1], 3)
    assert not linalg.span_equal([e1], [e2], 3)
    assert linalg.span_equal([], [], 3)


def test_solve():
    M = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(-1)]]
    x = linalg.solve(M, [Fraction(3), Fraction(0)])
    assert x == [Fraction(1), Fraction(1)]
    with pytest.raises(ValueError):
        linalg.solve([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]],
                     [Fraction(0), Fraction(0)])


def test_float_rank_and_nullspace():
    M = np.array([[1.0, 0.0, 0.0], [0.0, 1e-15, 0.0]])
    assert linalg.rank_f(M) == 1
    ns = linalg.nullspace_f(M, 3)
    assert ns.shape[0] == 2
    assert np.allclose(M @ ns.T, 0.0, atol=1e-12)
