import math
import warnings

import numpy as np
import pytest
from scipy import integrate
from scipy.special import i0e

from cspath import (ClassicalSymbol, FockTruncation, LatticeScheme, bose_hubbard, classical_symbol,
                    harmonic, lattice_propagator, matsubara_partition, moment_map,
                    polar_pitfall_partition, richardson, scheme_factor_check, sliced_action,
                    transfer_partition)
from cspath.errors import DivergenceError, InputError, ShapeError
from cspath.lattice import (CapWarning, endpoint_partition, first_order_constant,
                            linear_symmetric_closed, polar_sum)

from conftest import BH_PARAMS, K_BH, Z_BH

ZETA = ClassicalSymbol([0, 1])
PITFALL = 0.6113742513867985712  # 25-digit direct sum
HARMONIC_BETA1 = 0.9595173756674718597  # 1/(2 sinh(1/2))


def test_constant_path_single_slice():
    sch = LatticeScheme(1, 0.7, variant="endpoint")
    z0 = 0.4 - 1.2j
    assert sliced_action([z0], sch, ZETA) == pytest.approx(0.7 * abs(z0) ** 2)


def test_two_slice_hand_expansion():
    # kinetic: (1 + i) + (1 - i) = 2; potential: (beta/2) (|1|^2 + |i|^2) = beta
    sch = LatticeScheme(2, 1.0)
    assert sliced_action([1, 1j], sch, ZETA) == pytest.approx(3.0)


def test_bose_hubbard_action_at_u0_is_linear_action():
    path = [0.3 + 0.1j, -0.2 + 0.5j, 1.0, 0.1j]
    sch = LatticeScheme(4, 1.3)
    bh = classical_symbol(bose_hubbard(), 1)
    lin = ClassicalSymbol([0.25, -0.5])
    assert sliced_action(path, sch, bh, {"mu": 0.5, "U": 0}) == pytest.approx(sliced_action(path, sch, lin))


def test_action_length_mismatch():
    with pytest.raises(ShapeError):
        sliced_action([1, 2, 3], LatticeScheme(2, 1.0), ZETA)
    with pytest.raises(ShapeError):
        sliced_action([1, 2], LatticeScheme(2, 1.0, boundary="fixed", z_a=0, z_b=0), ZETA)


def _quadratic_form(scheme, N):
    """M with f(z) = z^dagger M z, probed from the action itself (M is not Hermitian)."""
    f = lambda z: sliced_action(z, scheme, ZETA)
    E = np.eye(N, dtype=complex)
    M = np.zeros((N, N), dtype=complex)
    for j in range(N):
        M[j, j] = f(E[j])
    for j in range(N):
        for k in range(j + 1, N):
            A = f(E[j] + E[k]) - M[j, j] - M[k, k]
            B = f(E[j] + 1j * E[k]) - M[j, j] - M[k, k]
            M[j, k] = (A - 1j * B) / 2
            M[k, j] = (A + 1j * B) / 2
    return M


@pytest.mark.parametrize("N", [3, 8, 20])
def test_transfer_literal_matches_gaussian_determinant(N):
    beta = 1.0
    M = _quadratic_form(LatticeScheme(N, beta), N)
    det = np.linalg.det(M)
    got = transfer_partition(ZETA, beta, N, slicing="literal", trunc=FockTruncation(rtol=1e-15)).value
    assert abs(det.imag) < 1e-12
    assert got == pytest.approx(1 / det.real, rel=1e-11)


def test_endpoint_matches_gaussian_determinant():
    N, beta = 10, 0.8
    M = _quadratic_form(LatticeScheme(N, beta, variant="endpoint"), N)
    assert endpoint_partition(ZETA, beta, N) == pytest.approx(1 / np.linalg.det(M).real, rel=1e-12)


def _two_slice(q, beta):
    # angular integral of the periodic N=2 kernel gives I0(2 sqrt(r1 r2))
    eps = beta / 2
    def f(r2, r1):
        x = 2 * math.sqrt(r1 * r2)
        return math.exp(-(r1 + r2) + x - eps * (q(r1) + q(r2))) * i0e(x)
    return integrate.dblquad(f, 0, 60, 0, 60, epsabs=1e-13, epsrel=1e-12)[0]


def test_transfer_two_slices_bose_hubbard_against_direct_integral():
    sym = classical_symbol(bose_hubbard(), 1)
    q = moment_map(sym)
    qn = lambda r: float(np.real(q.evaluate(r, BH_PARAMS)))
    ref = _two_slice(qn, 1.0)
    got = transfer_partition(bose_hubbard(), 1.0, 2, params=BH_PARAMS).value
    assert got == pytest.approx(ref, rel=1e-9)


def test_moment_map_bose_hubbard():
    q = moment_map(classical_symbol(bose_hubbard(), 1))
    assert str(q) == "1/2*U*zeta^2 + (-2*U - mu)*zeta + U + mu"


@pytest.mark.parametrize("N", [1, 7, 64, 300])
def test_u0_transfer_equals_closed_form_every_n(N):
    H = bose_hubbard(-1, 0)  # H = n, symbol zeta - 1/2
    got = transfer_partition(H, 1.0, N, trunc=FockTruncation(rtol=1e-15)).value
    assert got == pytest.approx(linear_symmetric_closed(-0.5, 1.0, 1.0, N), rel=1e-12)


def test_harmonic_transfer_limit():
    vals = [transfer_partition(harmonic(1), 1.0, N).value for N in (256, 512, 1024)]
    assert richardson(vals, order=2) == pytest.approx(HARMONIC_BETA1, abs=1e-6)


def test_bose_hubbard_transfer_converges():
    Ns = [128, 256, 512]
    vals = [transfer_partition(bose_hubbard(), 1.0, N, params=BH_PARAMS).value for N in Ns]
    errs = [abs(v - Z_BH) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    C = first_order_constant(Ns, errs)
    assert all(e <= C / N for e, N in zip(errs, Ns))
    assert abs(richardson(vals, order=2) - Z_BH) < 2e-4


def test_transfer_rejects_unbounded():
    with pytest.raises(DivergenceError):
        transfer_partition(bose_hubbard(0.5, -1), 1.0, 16)


def test_factor_ratio_literal_slicing():
    # literal slicing puts the whole e^{beta/2} into the ratio
    r = [scheme_factor_check(1.0, N, slicing="literal") for N in (256, 512, 1024)]
    assert richardson(r, order=2) == pytest.approx(math.exp(1.0), rel=1e-6)


def test_endpoint_rejects_nonlinear():
    with pytest.raises(ShapeError):
        endpoint_partition(bose_hubbard(), 1.0, 8, params=BH_PARAMS)


def test_lattice_propagator_converges(bh_spec):
    vals = [lattice_propagator(bh_spec, N) for N in (32, 64, 128)]
    errs = [abs(v - K_BH) for v in vals]
    assert errs[0] > errs[1] > errs[2]
    assert abs(richardson(vals, order=2) - K_BH) < 1e-3


def test_lattice_propagator_t0(bh_spec):
    from cspath import coherent_overlap
    spec = bh_spec.replace(T=0.0, z_a=0.5j)
    assert lattice_propagator(spec, 8) == pytest.approx(coherent_overlap(spec.z_b, spec.z_a))


def test_matsubara():
    assert matsubara_partition(1.0, 10_000) == pytest.approx(HARMONIC_BETA1, abs=1e-12)
    bare = matsubara_partition(1.0, 10_000, tail=False)
    assert abs(bare - HARMONIC_BETA1) > 1e-7
    with pytest.raises(InputError):
        matsubara_partition(1.0, 0)


def test_pitfall_value():
    assert polar_pitfall_partition(1.0, 0.5, 1.0).value == pytest.approx(PITFALL, rel=1e-13)


def test_polar_sum_caps_without_decay():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        r = polar_sum(ClassicalSymbol([0, 0]), 1.0, trunc=FockTruncation(cap=50))
    assert any(issubclass(x.category, CapWarning) for x in w)
    assert r.n_terms == 51


def test_richardson_exact_on_polynomial_error():
    f = lambda N: 2.0 + 3.0 / N - 5.0 / N ** 2
    assert richardson([f(10), f(20), f(40)], order=2) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(InputError):
        richardson([1.0], order=1)


def test_scheme_validation():
    with pytest.raises(InputError):
        LatticeScheme(0, 1.0)
    with pytest.raises(InputError):
        LatticeScheme(4, 1.0, boundary="fixed")
    assert LatticeScheme(4, 2.0, time="real").eps == 0.5j
