"""Hubbard-Stratonovich reduction.

Introducing the pair ``(ζ, σ)`` turns the quartic path integral into a
Gaussian one; the σ integral enforces ``ζ = n + 1/2`` on each Fock sector and
the trace collapses to a sum of ``exp(-β H^F(n + 1/2))`` (see
:func:`constrained_partition`).  For propagators the remaining constant
auxiliary field is a single frequency ω and, for Hamiltonians
``H = c0 + c1 n + c2 n²``,

    K = e^{-iT c0/h} e^{ihUT/8} sqrt(T / 2πihU)
        ∫ dω exp{ iTω²/(2hU) - iωT/2 + (z_b* z_a/h) e^{i(ω+μ)T} - Γ/h }

with ``U = 2 c2`` and ``μ = -c1 - h c2`` (the Bose-Hubbard parametrisation)
and ``Γ = (|z_a|² + |z_b|²)/2``.  The auxiliary σ(t) never appears at
runtime: it is integrated out analytically, and only the constant σ selected
by the constraint survives.

Two routes evaluate the ω integral: term-by-term Gaussian integration of the
expanded source (:func:`omega_propagator_series`) and direct contour
quadrature (:func:`omega_propagator_quadrature`).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .algebra import ClassicalSymbol, NumberPolynomial, classical_symbol
from .contour import CanonicalExponent, ContourConfig, integrate_canonical
from .errors import DegenerateError, DivergenceError, InputError, ShapeError, TruncationError
from .oracle import FockTruncation, PropagatorSpec, SeriesResult, _choose_cutoff, _fsum_complex


def constrained_partition(H, beta: float, trunc: FockTruncation | None = None,
                          params: Mapping | None = None, h: float = 1.0) -> SeriesResult:
    """``Σ_n exp(-β H^F(n + 1/2))``; the trace left after the σ integration.

    ``H`` is a :class:`ClassicalSymbol` (or a :class:`NumberPolynomial`, whose
    symbol is taken at scale ``h``).  Any constant in ``H^F`` is included.
    """
    trunc = trunc or FockTruncation()
    if not beta > 0:
        raise InputError("beta must be positive")
    sym = classical_symbol(H, None) if isinstance(H, NumberPolynomial) else H
    c = np.real(sym.numeric_coeffs({"h": h, **(params or {})}))
    lead = np.trim_zeros(c, "b")
    if len(lead) < 2 or lead[-1] <= 0:
        raise DivergenceError("H^F not bounded below along zeta = n + 1/2; the sum diverges")
    top = trunc.n_max + 1 if trunc.n_max is not None else trunc.cap
    zeta = np.arange(top + 1) + 0.5
    logw = -beta * np.polynomial.polynomial.polyval(zeta, c)
    if np.max(logw) > 700:
        raise DivergenceError("Boltzmann weights overflow")
    w = np.exp(logw)
    k = _choose_cutoff(w, trunc)
    tail = float(w[k]) if k < len(w) else 0.0
    if trunc.tol is not None and tail > trunc.tol:
        raise TruncationError(f"first omitted term {tail:.3e} exceeds tol={trunc.tol:.1e}")
    return SeriesResult(math.fsum(w[:k]), k, tail)


@dataclass(frozen=True)
class OmegaIntegrand:
    """The ω-representation of a propagator for ``H = c0 + c1 n + c2 n²``.

    ``U``, ``mu`` follow the Bose-Hubbard parametrisation; ``c0`` is the constant
    term, contributing only the phase ``e^{-iT c0/h}``.
    """

    U: float
    mu: float
    T: float
    z_a: complex
    z_b: complex
    h: float = 1.0
    c0: float = 0.0

    def __post_init__(self):
        if self.U == 0:
            raise DegenerateError("U = 0: the Gaussian width in omega diverges; use the free closed form")
        if not self.T > 0:
            raise InputError("the omega representation is implemented for T > 0")

    @classmethod
    def from_spec(cls, spec: PropagatorSpec) -> "OmegaIntegrand":
        c0, c1, c2 = quadratic_coefficients(spec)
        if c2 == 0:
            raise DegenerateError("U = 0: the Gaussian width in omega diverges; use the free closed form")
        return cls(U=2 * c2, mu=-c1 - spec.h * c2, T=spec.T, z_a=spec.z_a, z_b=spec.z_b,
                   h=spec.h, c0=c0)

    @property
    def source(self) -> complex:
        return complex(np.conj(self.z_b) * self.z_a)

    @property
    def gamma(self) -> float:
        return (abs(self.z_a) ** 2 + abs(self.z_b) ** 2) / 2

    @property
    def gaussian_coefficient(self) -> float:
        """``A`` in ``iAω²``: ``T/(2hU)``."""
        return self.T / (2 * self.h * self.U)

    @property
    def prefactor(self) -> complex:
        """``e^{-iTc0/h} e^{ihUT/8} sqrt(T/(2πihU))`` on the principal branch."""
        h, U, T = self.h, self.U, self.T
        return (cmath.exp(-1j * T * self.c0 / h) * cmath.exp(1j * h * U * T / 8)
                * cmath.sqrt(T / (2j * math.pi * h * U)))

    def exponent(self) -> CanonicalExponent:
        return CanonicalExponent(
            A=self.gaussian_coefficient, B=-self.T / 2,
            S=self.source / self.h * cmath.exp(1j * self.mu * self.T),
            kappa=self.T, C=-self.gamma / self.h)

    def __call__(self, w):
        """Integrand including the prefactor."""
        return self.prefactor * np.exp(self.exponent()(np.asarray(w, dtype=complex)))


def quadratic_coefficients(spec: PropagatorSpec):
    """Numeric ``(c0, c1, c2)`` of ``H(n) = c0 + c1 n + c2 n²``."""
    H = spec.hamiltonian
    c = np.real_if_close(H.numeric_coeffs(spec.h, spec.params))
    c = np.trim_zeros(np.asarray(c), "b")
    if len(c) > 3:
        raise ShapeError("the omega representation needs H of degree <= 2 in n")
    c = list(np.real(c)) + [0.0] * (3 - len(c))
    return float(c[0]), float(c[1]), float(c[2])


@dataclass(frozen=True)
class OmegaResult:
    value: complex
    error: float
    route: str
    n_terms: int = 0
    notes: tuple = field(default_factory=tuple)

    def __complex__(self):
        return complex(self.value)


def free_propagator(spec: PropagatorSpec) -> complex:
    """Closed form for ``H = c0 + c1 n``: ``e^{-iTc0/h} e^{-Γ/h} exp((z_b* z_a/h) e^{-i c1 T})``."""
    c0, c1, c2 = quadratic_coefficients(spec)
    if c2 != 0:
        raise ShapeError("free closed form needs c2 = 0")
    t = spec.complex_time
    return complex(cmath.exp(-1j * t * c0 / spec.h - spec.gamma_ba / spec.h
                             + spec.source / spec.h * cmath.exp(-1j * c1 * t)))


def _free_reroute(spec):
    return OmegaResult(free_propagator(spec), 0.0, "free",
                       notes=("U = 0: rerouted to the free closed form",))


def omega_propagator_series(spec: PropagatorSpec, trunc: FockTruncation | None = None) -> OmegaResult:
    """Expand ``exp(S e^{iωT})`` and integrate each Gaussian term in closed form.

    Term ``n`` is ``(S^n/n!) ∫ dω exp(iAω² + iB_n ω)`` with ``B_n = T(n - 1/2)``
    and ``∫ exp(iAω² + iBω) dω = sqrt(π/(-iA)) e^{-iB²/4A}``.
    """
    if spec.direction != "real":
        raise InputError("the omega routes are for real time")
    if quadratic_coefficients(spec)[2] == 0:
        return _free_reroute(spec)
    trunc = trunc or FockTruncation()
    I = OmegaIntegrand.from_spec(spec)
    A = I.gaussian_coefficient
    top = trunc.n_max + 1 if trunc.n_max is not None else trunc.cap
    n = np.arange(top + 1)
    c = abs(I.source) / I.h
    if c:
        env = np.exp(n * math.log(c) - gammaln(n + 1) - I.gamma / I.h)
        k = _choose_cutoff(env, trunc)
    else:
        env = np.zeros(top + 1)
        k = 1
    tail = float(env[k]) if k < len(env) else 0.0
    if trunc.tol is not None and tail > trunc.tol:
        raise TruncationError(f"first omitted term {tail:.3e} exceeds tol={trunc.tol:.1e}")
    nn = np.arange(k)
    B = I.T * (nn - 0.5)
    gauss = np.sqrt(math.pi / (-1j * A)) * np.exp(-1j * B ** 2 / (4 * A))
    S = I.source / I.h * cmath.exp(1j * I.mu * I.T)
    if S:
        coef = np.exp(nn * cmath.log(S) - gammaln(nn + 1) - I.gamma / I.h)
    else:
        coef = np.where(nn == 0, math.exp(-I.gamma / I.h), 0.0)
    value = I.prefactor * _fsum_complex(coef * gauss)
    return OmegaResult(value, tail, "series", k)


def omega_propagator_quadrature(spec: PropagatorSpec, contour: ContourConfig | None = None,
                                rtol: float = 1e-10) -> OmegaResult:
    """Integrate the ω representation numerically along a deformed contour."""
    if spec.direction != "real":
        raise InputError("the omega routes are for real time")
    if quadratic_coefficients(spec)[2] == 0:
        return _free_reroute(spec)
    I = OmegaIntegrand.from_spec(spec)
    r = integrate_canonical(I.exponent(), contour, rtol)
    pref = I.prefactor
    return OmegaResult(pref * r.value, abs(pref) * r.error, "quadrature", r.nodes,
                       notes=(f"theta={r.theta:.6f}", f"half_width={r.half_width:.4g}"))


def gaussian_term_phase(n: int, U: float, T: float, h: float = 1.0) -> complex:
    """``e^{ihUT/8} sqrt(T/2πihU) ∫ dω e^{iTω²/(2hU) - iωT/2 + inωT}``, evaluated in closed form.

    Equals ``exp(-i(hUT/2) n (n - 1))``.
    """
    A = T / (2 * h * U)
    B = T * (n - 0.5)
    return (cmath.exp(1j * h * U * T / 8) * cmath.sqrt(T / (2j * math.pi * h * U))
            * cmath.sqrt(math.pi / (-1j * A)) * cmath.exp(-1j * B * B / (4 * A)))
