import cmath
import math

import numpy as np
import pytest

from cspath import (FockTruncation, NumberPolynomial, PropagatorSpec, bose_hubbard,
                    constrained_partition, omega_propagator_quadrature, omega_propagator_series,
                    partition_exact, propagator_fock)
from cspath.contour import CanonicalExponent, ContourConfig, integrate_canonical
from cspath.errors import DegenerateError, DivergenceError, InputError, ShapeError
from cspath.hs import OmegaIntegrand, free_propagator, gaussian_term_phase

from conftest import BH_PARAMS, K_BH, Z_BH

FOCK = FockTruncation(n_max=60)


def test_constrained_partition_equals_fock_sum():
    r = constrained_partition(bose_hubbard(), 1.0, params=BH_PARAMS)
    assert r.value == pytest.approx(Z_BH, rel=1e-13)


@pytest.mark.parametrize("h", [1.0, 0.5, 0.25])
def test_constrained_partition_rescaled(h):
    H = bose_hubbard()
    a = constrained_partition(H, 2.0, params=BH_PARAMS, h=h).value
    b = partition_exact(H, 2.0, h=h, params=BH_PARAMS).value
    assert a == pytest.approx(b, rel=1e-12)


def test_constrained_partition_diverges_for_negative_u():
    with pytest.raises(DivergenceError):
        constrained_partition(bose_hubbard(0.5, -1), 1.0)


@pytest.mark.parametrize("n", range(6))
@pytest.mark.parametrize("U,T", [(1.0, 1.0), (0.5, 2.0), (-1.5, 0.3)])
def test_gaussian_term_phase(n, U, T):
    want = cmath.exp(-0.5j * U * T * n * (n - 1))
    assert abs(gaussian_term_phase(n, U, T) - want) < 1e-13


def test_series_and_quadrature_match_oracle(bh_spec):
    s = omega_propagator_series(bh_spec, FOCK)
    q = omega_propagator_quadrature(bh_spec)
    assert abs(s.value - K_BH) < 1e-13
    assert abs(q.value - K_BH) < 1e-10
    assert q.route == "quadrature" and q.error < 1e-10


@pytest.mark.parametrize("za,zb,T,U,mu,h", [
    (0.3 + 0.7j, -1.1 + 0.2j, 0.7, 1.3, -0.4, 1.0),
    (1.5, 1.5, 2.0, -0.8, 0.5, 1.0),
    (0.9j, 0.4, 1.1, 2.0, 0.1, 0.2),
    (2.0, 2.0, 2.0, 2.0, 0.5, 1.0),
])
def test_routes_agree_generic(za, zb, T, U, mu, h):
    spec = PropagatorSpec(za, zb, T, h, bose_hubbard(), {"mu": mu, "U": U})
    ref = propagator_fock(spec, FockTruncation(rtol=1e-16, cap=512)).value
    assert abs(omega_propagator_series(spec, FockTruncation(rtol=1e-16)).value - ref) < 1e-12
    assert abs(omega_propagator_quadrature(spec).value - ref) < 1e-8


def test_constant_term_phase():
    H = bose_hubbard() + NumberPolynomial([0.75])
    spec = PropagatorSpec(1.0, 0.5j, 1.2, 1.0, H, BH_PARAMS)
    ref = propagator_fock(spec, FOCK).value
    assert abs(omega_propagator_series(spec, FOCK).value - ref) < 1e-13


def test_short_time_approaches_overlap(bh_spec):
    from cspath import coherent_overlap
    spec = bh_spec.replace(T=1e-3)
    assert abs(omega_propagator_quadrature(spec).value - coherent_overlap(1, 1)) < 1e-3


def test_u0_reroutes_to_free_form():
    spec = PropagatorSpec(0.5, 0.8j, 1.0, 1.0, bose_hubbard(), {"mu": 0.5, "U": 0})
    for fn in (omega_propagator_series, omega_propagator_quadrature):
        r = fn(spec)
        assert r.route == "free" and "rerouted" in r.notes[0]
        assert abs(r.value - propagator_fock(spec, FOCK).value) < 1e-14
    assert abs(free_propagator(spec) - propagator_fock(spec, FOCK).value) < 1e-14


def test_omega_integrand_rejects_u0():
    with pytest.raises(DegenerateError):
        OmegaIntegrand(0.0, 0.5, 1.0, 1, 1)


def test_cubic_rejected(bh_spec):
    spec = bh_spec.replace(hamiltonian=NumberPolynomial([0, 0, 0, 1]))
    with pytest.raises(ShapeError):
        omega_propagator_series(spec)


def test_imaginary_time_rejected(bh_spec):
    with pytest.raises(InputError):
        omega_propagator_series(bh_spec.replace(direction="imaginary"))


@pytest.mark.parametrize("A,B", [(0.7, 0.3), (-1.2, 2.0), (3.0, -1.0)])
def test_contour_pure_gaussian(A, B):
    r = integrate_canonical(CanonicalExponent(A, B, 0.0, 1.0))
    want = cmath.sqrt(math.pi / (-1j * A)) * cmath.exp(-1j * B * B / (4 * A))
    assert abs(r.value - want) < 1e-11


def test_contour_with_source_against_series():
    # ∫ exp(iAω² + iBω + S e^{iκω}) = Σ S^n/n! sqrt(π/-iA) e^{-i(B + nκ)²/4A}
    A, B, S, k = 0.4, -0.3, 0.8 - 0.5j, 1.3
    want = sum(S ** n / math.factorial(n) * cmath.sqrt(math.pi / (-1j * A))
               * cmath.exp(-1j * (B + n * k) ** 2 / (4 * A)) for n in range(60))
    assert abs(integrate_canonical(CanonicalExponent(A, B, S, k)).value - want) < 1e-10


def test_contour_config_validation():
    with pytest.raises(InputError):
        ContourConfig(theta=2.0)
    with pytest.raises(InputError):
        integrate_canonical(CanonicalExponent(0.0, 1.0, 0.0, 1.0))
