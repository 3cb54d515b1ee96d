from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cspath import (BosonPolynomial, ClassicalSymbol, Coeff, NumberPolynomial, ZSymbol,
                    antinormal_symbol, bose_hubbard, classical_symbol, fock_matrix, harmonic,
                    normal_order, weyl_transform)
from cspath.algebra import to_phase_space, weyl_recipe_offset
from cspath.errors import InputError

U, MU, H = Coeff.symbol("U"), Coeff.symbol("mu"), Coeff.symbol("h")
DIM = 25


def ladder(dim, h):
    """Independent scaled-basis ladder matrices: adag|k) = |k+1), a|k) = h k |k-1)."""
    a = [[Fraction(0)] * dim for _ in range(dim)]
    ad = [[Fraction(0)] * dim for _ in range(dim)]
    for k in range(dim):
        if k:
            a[k - 1][k] = Fraction(h) * k
        if k + 1 < dim:
            ad[k + 1][k] = Fraction(1)
    return a, ad


def matmul(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n) if A[i][k]) for j in range(n)] for i in range(n)]


def word_matrix(word, dim, h):
    a, ad = ladder(dim, h)
    M = [[Fraction(int(i == j)) for j in range(dim)] for i in range(dim)]
    for g in word.split():
        M = matmul(M, a if g == "a" else ad)
    return M


@pytest.mark.parametrize("word", ["a adag", "a a adag adag", "adag a a adag", "a adag a adag a",
                                  "a a a adag adag adag", "adag a adag a"])
@pytest.mark.parametrize("h", [1, Fraction(1, 2)])
def test_normal_order_against_brute_force_matrices(word, h):
    deg = len(word.split())
    big = DIM + deg
    ref = word_matrix(word, big, h)
    got = fock_matrix(normal_order([(1, word)], h), big, h)
    for i in range(DIM):
        for j in range(DIM):
            assert got[i][j] == ref[i][j]


def test_commutator_equals_h():
    a, ad = BosonPolynomial.a(), BosonPolynomial.adag()
    assert a * ad - ad * a == BosonPolynomial.constant(H)


def test_normal_order_known_form():
    p = normal_order([(1, "a a adag adag")], 1)
    assert p.terms == {(2, 2): Coeff.const(1), (1, 1): Coeff.const(4), (0, 0): Coeff.const(2)}


def test_number_polynomial_round_trip_through_ladder_form():
    H_ = bose_hubbard()
    assert normal_order(H_, 1).to_number_polynomial() == H_.subs(h=1)


def test_unknown_generator_rejected():
    with pytest.raises(InputError):
        normal_order([(1, "b adag")], 1)


def test_bose_hubbard_eigenvalues():
    H_ = bose_hubbard(Fraction(1, 2), 1)
    assert [H_.eigenvalue(k, 1).constant_value() for k in range(4)] == [0, Fraction(-1, 2), 0, Fraction(3, 2)]


def test_classical_symbol_bose_hubbard_exact():
    sym = classical_symbol(bose_hubbard(), 1)
    assert sym.coeffs == (MU / 2 + U * Fraction(3, 8), -(MU + U), U / 2)


def test_classical_symbol_harmonic():
    assert classical_symbol(harmonic(1), 1) == ClassicalSymbol([0, 1])


def test_phase_space_form_of_n():
    ps = to_phase_space(NumberPolynomial.n(), 1)
    assert ps.coeffs == (Coeff.const(Fraction(-1, 2)), Coeff.const(1))


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=12)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=5), st.sampled_from([1, Fraction(1, 2), Fraction(1, 4)]),
       st.integers(0, 20))
def test_eigenvalue_identity(cs, h, n):
    p = NumberPolynomial(cs)
    assert classical_symbol(p, h)(n + Fraction(1, 2)) == p.eigenvalue(n, h)


def test_weyl_offset_constant_bose_hubbard():
    assert weyl_recipe_offset(bose_hubbard(), 1) == ClassicalSymbol([U / 8])


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=3))
def test_weyl_offset_constant_degree_two(cs):
    off = weyl_recipe_offset(NumberPolynomial(cs), 1)
    assert off.degree <= 0


def test_weyl_offset_not_constant_for_cubic():
    off = weyl_recipe_offset(NumberPolynomial([0, 0, 0, 1]), 1)
    assert off == ClassicalSymbol([Fraction(-3, 8), Fraction(5, 4)])


def test_weyl_transform_non_radial_is_zsymbol():
    w = weyl_transform(normal_order([(1, "a a")], 1), 1)
    assert isinstance(w, ZSymbol) and not w.is_radial()


def test_antinormal_symbol_bose_hubbard():
    s = antinormal_symbol(normal_order(bose_hubbard(), 1))
    assert s == ClassicalSymbol([U + MU, -(2 * U + MU), U / 2])


@pytest.mark.parametrize("h", [1, Fraction(1, 2), Fraction(1, 4)])
def test_symbol_matches_fock_diagonal(h):
    H_ = bose_hubbard(Fraction(1, 3), Fraction(7, 5))
    M = fock_matrix(normal_order(H_, h), 12, h)
    sym = classical_symbol(H_, h)
    for k in range(10):
        assert M[k][k] == sym(k + Fraction(1, 2)).constant_value()


def test_symbolic_h_specialises():
    sym = classical_symbol(bose_hubbard(), None)
    assert sym.subs(h=1) == classical_symbol(bose_hubbard(), 1)


def test_polynomial_arithmetic():
    n = NumberPolynomial.n()
    p = (n + 1) ** 2 - n * n
    assert p == NumberPolynomial([1, 2])
    assert (n * 3).subs() == NumberPolynomial([0, 3])
