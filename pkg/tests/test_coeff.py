from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cspath import Coeff
from cspath.coeff import to_fraction

x, y = Coeff.symbol("x"), Coeff.symbol("y")


def test_exact_float_conversion():
    assert to_fraction(0.5) == Fraction(1, 2)
    assert to_fraction("3/8") == Fraction(3, 8)


def test_arithmetic_and_identity():
    p = (x + y) ** 2 - x * x - y * y
    assert p == 2 * x * y
    assert (x - x).is_zero()


def test_division_by_constant_only():
    assert x / 2 == x * Fraction(1, 2)
    with pytest.raises((TypeError, ValueError, ZeroDivisionError)):
        x / y


def test_subs_and_evaluate():
    p = x * x * y + 3
    assert p.subs(x=2) == 4 * y + 3
    assert p.evaluate({"x": 0.5, "y": 2.0}) == pytest.approx(3.5)


def test_coefficient_extraction():
    p = x ** 2 * y + 2 * x + 1
    assert p.degree_in("x") == 2
    assert p.coefficient_of("x", 2) == y
    assert p.coefficient_of("x", 0) == Coeff.const(1)


def test_constant_value_of_symbolic_raises():
    with pytest.raises(Exception):
        x.constant_value()


fr = st.fractions(min_value=-20, max_value=20, max_denominator=30)


@given(fr, fr, fr)
def test_ring_laws(a, b, c):
    A, B, C = Coeff.const(a) * x + b, Coeff.const(b) * y - c, Coeff.const(c) + x * y
    assert A * (B + C) == A * B + A * C
    assert (A * B) * C == A * (B * C)
    assert A + B == B + A
