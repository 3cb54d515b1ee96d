"""Exact reference values from sums over Fock states.

For ``H(n)`` the Fock states diagonalise the Hamiltonian, so partition functions
and coherent-state propagators are single sums.  Every sum here is truncated
by an explicit rule and reports the magnitude of the first omitted term.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import gammaln, roots_laguerre

from .algebra import NumberPolynomial, bose_hubbard, classical_symbol
from .coeff import Coeff
from .errors import DivergenceError, InputError, TruncationError


@dataclass(frozen=True)
class FockTruncation:
    """Truncation rule for Fock sums.

    With ``n_max=None`` the sum stops at the first index past the peak of the
    term envelope whose term is below ``rtol`` times the accumulated envelope;
    ``cap`` is a hard limit.  A fixed ``n_max`` sums ``0..n_max`` and raises
    :class:`TruncationError` when the first omitted term exceeds ``tol``.
    """

    n_max: int | None = None
    rtol: float = 1e-12
    cap: int = 512
    tol: float | None = None

    def __post_init__(self):
        if self.n_max is not None and self.n_max < 0:
            raise InputError("n_max must be non-negative")
        if self.cap < 1:
            raise InputError("cap must be positive")


@dataclass(frozen=True)
class SeriesResult:
    """A truncated sum: value, number of terms used, first omitted term's magnitude."""

    value: complex
    n_terms: int
    tail: float

    def __complex__(self):
        return complex(self.value)

    def __float__(self):
        return float(np.real(self.value))


@dataclass(frozen=True)
class PropagatorSpec:
    """Boundary data for ``⟨z_b| exp(-(i/h) T H) |z_a⟩``.

    ``direction="imaginary"`` reads ``T`` as an inverse temperature and computes
    ``⟨z_b| exp(-T H / h) |z_a⟩`` through the same formulas with ``T -> -iT``.
    """

    z_a: complex
    z_b: complex
    T: float
    h: float = 1.0
    hamiltonian: NumberPolynomial = field(default_factory=bose_hubbard)
    params: Mapping = field(default_factory=lambda: {"mu": 0.5, "U": 1.0})
    direction: str = "real"

    def __post_init__(self):
        if not self.h > 0:
            raise InputError(f"h must be positive, got {self.h}")
        if not math.isfinite(self.T):
            raise InputError("T must be finite")
        if self.direction not in ("real", "imaginary"):
            raise InputError(f"direction must be 'real' or 'imaginary', got {self.direction!r}")
        missing = self.hamiltonian.free_symbols - set(self.params) - {"h"}
        if missing:
            raise InputError(f"unbound parameters: {', '.join(sorted(missing))}")

    @property
    def complex_time(self) -> complex:
        return complex(self.T) if self.direction == "real" else -1j * self.T

    @property
    def source(self) -> complex:
        """``z_b* z_a``."""
        return complex(np.conj(self.z_b) * self.z_a)

    @property
    def gamma_ba(self) -> float:
        """Boundary term ``(|z_b|² + |z_a|²)/2``."""
        return (abs(self.z_a) ** 2 + abs(self.z_b) ** 2) / 2

    def energies(self, n) -> np.ndarray:
        return spectrum(self.hamiltonian, n, self.h, self.params)

    def replace(self, **kw) -> "PropagatorSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return PropagatorSpec(**d)


def spectrum(H: NumberPolynomial, n, h: float = 1.0, params: Mapping | None = None) -> np.ndarray:
    """Eigenvalues on ``|n⟩`` via the classical symbol at ``ζ = n + 1/2``."""
    sym = classical_symbol(H, None)
    c = sym.numeric_coeffs({"h": h, **(params or {})})
    return np.polynomial.polynomial.polyval(np.asarray(n, dtype=float) + 0.5, c)


def _choose_cutoff(env: np.ndarray, trunc: FockTruncation) -> int:
    """Number of terms to keep given the magnitudes ``env`` of terms ``0..cap``."""
    if trunc.n_max is not None:
        return trunc.n_max + 1
    peak = int(np.argmax(env))
    acc = np.cumsum(env)
    # nonincreasing from index k onward
    tail_ok = np.flip(np.logical_and.accumulate(np.flip(np.diff(env, append=0.0) <= 0)))
    for k in range(max(peak, 1), len(env)):
        if tail_ok[k] and env[k] <= trunc.rtol * acc[k - 1]:
            return k
    raise TruncationError(
        f"Fock sum not converged within cap={trunc.cap} (last term {env[-1]:.3e}, "
        f"sum {acc[-1]:.3e})")


def _fsum_complex(terms) -> complex:
    terms = np.asarray(terms, dtype=complex)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def partition_exact(H: NumberPolynomial, beta: float, h: float = 1.0,
                    trunc: FockTruncation | None = None,
                    params: Mapping | None = None) -> SeriesResult:
    """``Σ_n exp(-β H(h n))`` with the stated truncation rule."""
    trunc = trunc or FockTruncation()
    if not beta > 0:
        raise InputError(f"beta must be positive, got {beta}")
    c = np.trim_zeros(np.real(H.numeric_coeffs(h, params)), "b")
    if len(c) < 2 or c[-1] <= 0:
        raise DivergenceError(
            f"spectrum of {H} is not bounded below along the Fock ladder; "
            "the Boltzmann sum diverges")
    top = (trunc.n_max + 1) if trunc.n_max is not None else trunc.cap
    n = np.arange(top + 1)
    E = spectrum(H, n, h, params)
    if E[-1] < E[-2]:
        raise DivergenceError("energies decrease at the truncation cutoff")
    logw = -beta * E
    shift = float(np.max(logw))
    if shift > 700:
        raise DivergenceError("Boltzmann weights overflow; spectrum too negative")
    w = np.exp(logw)
    k = _choose_cutoff(w, trunc)
    tail = float(w[k]) if k < len(w) else 0.0
    if trunc.tol is not None and tail > trunc.tol:
        raise TruncationError(f"first omitted term {tail:.3e} exceeds tol={trunc.tol:.1e} at n_max={k - 1}")
    return SeriesResult(math.fsum(w[:k]), k, tail)


def coherent_overlap(z_b: complex, z_a: complex, h: float = 1.0) -> complex:
    """``⟨z_b|z_a⟩ = exp(-(|z_b|² + |z_a|²)/2h + z_b* z_a / h)``."""
    return cmath.exp((-(abs(z_b) ** 2 + abs(z_a) ** 2) / 2 + np.conj(z_b) * z_a) / h)


def _propagator_terms(spec: PropagatorSpec, top: int) -> np.ndarray:
    n = np.arange(top + 1)
    c = spec.source / spec.h
    E = spec.energies(n)
    phase = -1j * spec.complex_time * E / spec.h
    base = -spec.gamma_ba / spec.h
    if c == 0:
        out = np.zeros(top + 1, dtype=complex)
        out[0] = np.exp(base + phase[0])
        return out
    logt = n * cmath.log(c) - gammaln(n + 1) + base + phase
    return np.exp(logt)


def propagator_fock(spec: PropagatorSpec, trunc: FockTruncation | None = None) -> SeriesResult:
    """``⟨z_b| exp(-(i/h) T H) |z_a⟩`` as a Fock sum.

    Term ``n`` is ``e^{-Γ/h} (z_b* z_a / h)^n / n! · exp(-(i/h) T H^F(n + 1/2; h))``
    with ``Γ = (|z_b|² + |z_a|²)/2``.
    """
    trunc = trunc or FockTruncation()
    top = (trunc.n_max + 1) if trunc.n_max is not None else trunc.cap
    terms = _propagator_terms(spec, top)
    env = np.abs(terms)
    if spec.direction == "real":
        # the Poisson envelope without the unit-modulus phases
        n = np.arange(top + 1)
        c = abs(spec.source) / spec.h
        env = np.exp(n * math.log(c) - gammaln(n + 1) - spec.gamma_ba / spec.h) if c else env
    k = _choose_cutoff(env, trunc)
    tail = float(env[k]) if k < len(env) else 0.0
    if trunc.tol is not None and tail > trunc.tol:
        raise TruncationError(f"first omitted term {tail:.3e} exceeds tol={trunc.tol:.1e} at n_max={k - 1}")
    return SeriesResult(_fsum_complex(terms[:k]), k, tail)


def harmonic_propagator_closed(z_b: complex, z_a: complex, omega: float, T: float) -> complex:
    """Closed-form oscillator propagator in the sign convention ``exp(+iωT)``.

    Returns ``exp(z_b* z_a e^{iωT} - (|z_b|² + |z_a|²)/2) · e^{-iωT/2}`` (``h = 1``).
    As a Fock sum this is term ``n`` weighted by ``exp(-iT(ω/2 - ω n))``, i.e. the
    forward propagator of ``ω/2 - ω n``; the conventional ``exp(-iT ω (n + 1/2))``
    evolution is the complex conjugate for real labels.
    """
    return cmath.exp(np.conj(z_b) * z_a * cmath.exp(1j * omega * T)
                     - (abs(z_b) ** 2 + abs(z_a) ** 2) / 2) * cmath.exp(-0.5j * omega * T)


def harmonic_closed_convention(omega=1) -> NumberPolynomial:
    """The ``H(n)`` whose Fock propagator equals :func:`harmonic_propagator_closed`."""
    w = Coeff.coerce(omega)
    return NumberPolynomial([w / 2, -w])


def unitarity_integral(spec: PropagatorSpec, n_radial: int = 48, n_angle: int = 160,
                       n_max: int = 60) -> float:
    """``∫ d²z_b/(π h) |⟨z_b|e^{-iTH/h}|z_a⟩|²``, which equals 1 for unitary evolution.

    With ``ρ = |z_b|²/h`` the measure is ``dρ dφ / 2π``; the ``e^{-ρ}`` from the
    boundary term is the Gauss-Laguerre weight and the angular integrand is a
    trigonometric polynomial, so both rules are exact once their orders exceed
    ``n_max``.
    """
    rho, wr = roots_laguerre(n_radial)
    phi = 2 * np.pi * np.arange(n_angle) / n_angle
    zb = np.sqrt(spec.h * rho)[:, None] * np.exp(1j * phi)[None, :]
    c = np.conj(zb) * spec.z_a / spec.h
    E = spec.energies(np.arange(n_max + 1))
    phases = np.exp(-1j * spec.complex_time * E / spec.h)
    s = np.zeros_like(c)
    t = np.ones_like(c)
    for k in range(n_max + 1):
        s = s + t * phases[k]
        t = t * c / (k + 1)
    f = np.abs(s) ** 2 * math.exp(-abs(spec.z_a) ** 2 / spec.h)
    return float(np.sum(wr[:, None] * f) / n_angle)
