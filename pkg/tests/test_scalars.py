from fractions import Fraction

import pytest

from segre_kit.scalars import Scalar, format_scalar


def test_arithmetic_is_exact():
    a = Scalar(Fraction(1, 3), Fraction(1, 7))
    b = Scalar(Fraction(2, 5), Fraction(-1, 2))
    assert (a + b).re == Fraction(11, 15)
    assert (a * b) / b == a
    assert (a - a).is_zero()


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        Scalar(1) / Scalar(0)


def test_conjugate_and_norm():
    z = Scalar(3, 4)
    assert z.norm_sq() == 25
    assert (z * z.conjugate()).re == 25
    assert complex(z) == 3 + 4j


def test_formatting():
    assert format_scalar(Scalar(3)) == "3"
    assert format_scalar(Scalar(Fraction(-1, 2))) == "-1/2"
    assert format_scalar(Scalar(0, 1)) == "i"
    assert format_scalar(Scalar(0, Fraction(3, 4))) == "3/4*i"
    assert format_scalar(Scalar(1, 2)) == "(1+2*i)"
    assert format_scalar(Scalar(1, -1)) == "(1-i)"
