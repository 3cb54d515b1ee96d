from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cspath import BosonPolynomial, Coeff, NumberPolynomial, ParseError, bose_hubbard, lower, parse, to_text
from cspath.errors import InputError

BH_TEXT = "-mu*n + (U/2)*n*(n-h)"


def test_bose_hubbard_text():
    assert lower(BH_TEXT) == bose_hubbard()


def test_bindings_exact():
    p = lower(BH_TEXT, {"mu": "1/2", "U": 1, "h": 1}, symbolic=False)
    assert p == bose_hubbard(Fraction(1, 2), 1).subs(h=1)


def test_decimal_literals_exact():
    assert lower("0.1*n") == NumberPolynomial([0, Fraction(1, 10)])


def test_power_aliases():
    assert lower("n^3") == lower("n**3") == NumberPolynomial([0, 0, 0, 1])


def test_precedence():
    assert lower("-n^2") == NumberPolynomial([0, 0, -1])
    assert lower("2*n+3*n^2/3") == NumberPolynomial([0, 2, 1])


def test_ladder_input():
    p = lower("a*adag", h=1)
    assert isinstance(p, BosonPolynomial)
    assert p.to_number_polynomial() == NumberPolynomial([1, 1])


@pytest.mark.parametrize("text,col", [("(*n", 2), ("n +", 4), ("n ^ x", 5), ("n $", 3), ("", 1),
                                      ("(n", 3), ("n n", 3)])
def test_parse_error_location(text, col):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.line == 1 and exc.value.column == col
    assert exc.value.expected


def test_multiline_error_position():
    with pytest.raises(ParseError) as exc:
        parse("n +\n  * 2")
    assert (exc.value.line, exc.value.column) == (2, 3)


def test_mixed_vocabularies_rejected():
    with pytest.raises(ParseError) as exc:
        lower("n + adag*a")
    assert exc.value.column == 5


def test_unknown_identifier_when_not_symbolic():
    with pytest.raises(ParseError, match="unknown identifier 'V'"):
        lower("V*n", {"mu": 1}, symbolic=False)


@pytest.mark.parametrize("text", ["n/n", "n/U", "n/0", "n/(1-1)"])
def test_bad_division(text):
    with pytest.raises(ParseError):
        lower(text)


def test_binding_generator_rejected():
    with pytest.raises(InputError):
        lower("n", {"n": 2})


def test_round_trip_bose_hubbard():
    p = bose_hubbard()
    assert lower(to_text(p)) == p


coef = st.fractions(min_value=-7, max_value=7, max_denominator=9)


@settings(max_examples=80, deadline=None)
@given(st.lists(coef, max_size=6))
def test_round_trip_number_polynomials(cs):
    p = NumberPolynomial(cs)
    assert lower(to_text(p)) == p


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), coef, max_size=5))
def test_round_trip_ladder_polynomials(terms):
    p = BosonPolynomial(terms, 1)
    assert lower(to_text(p), h=1) == p


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=1, max_size=3), st.lists(coef, min_size=1, max_size=3))
def test_symbolic_coefficients_round_trip(a, b):
    mu = Coeff.symbol("mu")
    p = NumberPolynomial([Coeff.const(x) * mu + Coeff.const(y) for x, y in zip(a, b)])
    assert lower(to_text(p)) == p
