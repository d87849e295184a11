from fractions import Fraction

import pytest

from hlift import InputError, MultiPoly, poly_eval, poly_parse


def test_single_monomial():
    p = poly_parse("x2^2", ["x1", "x2", "y"])
    assert p.terms == {(0, 2, 0): Fraction(1)}


def test_cancellation_to_zero():
    p = poly_parse("1/2*x1^2 - x1^2/2", ["x1", "x2"])
    assert p.is_zero()


def test_two_term_sum():
    p = poly_parse("3*x1*x2 + x2", ["x1", "x2"])
    assert p.terms == {(1, 1): Fraction(3), (0, 1): Fraction(1)}


def test_parse_print_parse_idempotent():
    texts = ["3*x1*x2 + x2", "-x1^2/2 + 1/3", "x1^3 - 2*x1*x2^2 + 7",
             "0", "-1/2", "x2"]
    for text in texts:
        p = poly_parse(text, ["x1", "x2"])
        assert poly_parse(str(p), ["x1", "x2"]) == p


def test_unknown_variable_reports_position():
    with pytest.raises(InputError, match="position 5.*'z'"):
        poly_parse("x1 + z", ["x1", "x2"])


def test_syntax_error_reports_position():
    with pytest.raises(InputError, match="position"):
        poly_parse("x1 + ", ["x1"])
    with pytest.raises(InputError, match="position"):
        poly_parse("x1 ^^ 2", ["x1"])
    with pytest.raises(InputError, match="position"):
        poly_parse("", ["x1"])


def test_zero_exponent_rejected():
    with pytest.raises(InputError):
        poly_parse("x1^0", ["x1"])


def test_eval_exact():
    vars = ["x1", "x2", "y"]
    assert poly_eval(poly_parse("x2^2", vars), (0, 3, 0)) == 9
    assert poly_eval(MultiPoly.zero(vars), (5, 5, 5)) == 0
    p = poly_parse("3*x1*x2 + x2", ["x1", "x2"])
    assert poly_eval(p, (Fraction(1, 2), Fraction(2))) == 5


def test_eval_dimension_mismatch():
    with pytest.raises(InputError):
        poly_eval(poly_parse("x1", ["x1", "x2"]), (1,))


def test_eval_float_mode():
    p = poly_parse("x1^2 + 1/2", ["x1"])
    assert poly_eval(p, (0.5,)) == pytest.approx(0.75)


def test_arithmetic_and_diff():
    vars = ["x", "y"]
    x = MultiPoly.var(vars, "x")
    y = MultiPoly.var(vars, "y")
    p = (x + y) * (x - y)
    assert p == x * x - y * y
    assert p.diff(0) == 2 * x
    assert (x ** 3).diff(0) == 3 * x * x


def test_extend_variables():
    p = poly_parse("x1*y", ["x1", "y"])
    q = p.extend(("x1", "x2", "y", "a1"))
    assert q.eval((2, 99, 3, 99)) == 6


def test_whitespace_insignificant():
    vars = ["x1", "x2"]
    assert poly_parse(" 3 * x1\t*x2+ x2 ", vars) == poly_parse("3*x1*x2+x2", vars)


def test_homogeneity_check():
    vars = ("x1", "a1", "a2")
    assert poly_parse("a1 + x1*a2", vars).is_homogeneous_in((1, 2))
    assert not poly_parse("a1 + x1", vars).is_homogeneous_in((1, 2))
    assert poly_parse("x1^2", vars).is_homogeneous_in((1, 2))
