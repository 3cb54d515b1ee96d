"""Semiclassical propagators in the rescaled algebra ``[a, a†] = h``.

Expanding the classical symbol in powers of h at fixed ``ζ``,

    H^F(ζ; h) = c00 + h (a0 + a1 ζ) + h² (b0 + b1 ζ + b2 ζ²) + O(h³),

and keeping terms through ``h²`` makes the propagator an exact single
integral over an auxiliary frequency,

    K = e^{-iT c00/h} e^{-iT(a0 + a1/2) - iTh(b0 - b1²/4b2)} sqrt(T / 4πihb2)
        ∫ dω exp{Φ(ω)/h + iωTλ/2},     λ = 1 + b1/b2,

    Φ(ω) = iTω²/(4 b2) + z_b* z_a e^{i(ω - a1)T} - (|z_b|² + |z_a|²)/2.

As ``h → 0`` the integral is dominated by a complex saddle.  The linear phase
``iωTλ/2`` is O(h⁰) relative to ``Φ/h`` and is folded into the exponent before
the saddle is located, so the stationary-phase error is O(h).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import lambertw

from .algebra import ClassicalSymbol, NumberPolynomial, classical_symbol
from .coeff import ZERO, Coeff
from .contour import CanonicalExponent, ContourConfig, integrate_canonical
from .errors import DegenerateError, InputError, SaddleError, ShapeError
from .oracle import FockTruncation, PropagatorSpec, propagator_fock

H = "h"


@dataclass(frozen=True)
class SemiclassicalCoefficients:
    """Exact coefficients of the ``h¹`` and ``h²`` terms of ``H^F``.

    ``c00`` is the ``h⁰`` constant; ``remainder`` maps each power ``k ≥ 3`` of h
    to its ζ-polynomial, the part neglected by the semiclassical form.
    """

    a0: Coeff
    a1: Coeff
    b0: Coeff
    b1: Coeff
    b2: Coeff
    c00: Coeff = ZERO
    remainder: Mapping = field(default_factory=dict)

    @property
    def is_degenerate(self) -> bool:
        return self.b2.is_zero()

    def numeric(self, params: Mapping | None = None) -> dict:
        p = dict(params or {})
        return {k: float(getattr(self, k).evaluate(p)) for k in ("a0", "a1", "b0", "b1", "b2", "c00")}

    def remainder_value(self, zeta: float, h: float, params: Mapping | None = None) -> float:
        """``|Σ_{k≥3} h^k P_k(ζ)|``."""
        p = dict(params or {})
        return abs(sum(h ** k * s.evaluate(zeta, p) for k, s in self.remainder.items()))


def extract_coefficients(sym) -> SemiclassicalCoefficients:
    """Split a symbol ``H^F(ζ; h)`` (coefficients polynomial in ``h``) by powers of h.

    A :class:`NumberPolynomial` is converted with symbolic h first.
    """
    if isinstance(sym, NumberPolynomial):
        sym = classical_symbol(sym, None)
    if not isinstance(sym, ClassicalSymbol):
        raise TypeError("expected ClassicalSymbol or NumberPolynomial")
    kmax = max((c.degree_in(H) for c in sym.coeffs), default=0)
    layers = []
    for k in range(kmax + 1):
        layers.append(ClassicalSymbol([c.coefficient_of(H, k) for c in sym.coeffs]))
    while len(layers) < 3:
        layers.append(ClassicalSymbol([]))
    L0, L1, L2 = layers[:3]
    if L0.degree > 0:
        raise ShapeError("the h^0 term depends on zeta; not a rescaled symbol")
    if L1.degree > 1:
        raise ShapeError("the h^1 term is not affine in zeta")
    if L2.degree > 2:
        raise ShapeError("the h^2 term exceeds degree 2 in zeta")
    rem = {k: layers[k] for k in range(3, len(layers)) if layers[k].coeffs}
    return SemiclassicalCoefficients(
        a0=L1.coeff(0), a1=L1.coeff(1), b0=L2.coeff(0), b1=L2.coeff(1), b2=L2.coeff(2),
        c00=L0.coeff(0), remainder=rem)


@dataclass(frozen=True)
class PhiValue:
    value: complex
    d1: complex
    d2: complex


@dataclass
class SaddleProblem:
    """Numeric data for the ω integral of one propagator.

    With ``fold_linear`` the exponent is ``F = Φ + h iωTλ/2`` (the integrand is
    ``e^{F/h}``); otherwise ``F = Φ``.
    """

    a0: float
    a1: float
    b0: float
    b1: float
    b2: float
    z_a: complex
    z_b: complex
    T: float
    h: float = 1.0
    c00: float = 0.0
    fold_linear: bool = True
    tol: float = 1e-12
    max_iter: int = 100

    def __post_init__(self):
        if self.b2 == 0:
            raise DegenerateError("b2 = 0: the Gaussian-in-omega representation does not exist")

    @classmethod
    def from_spec(cls, spec: PropagatorSpec, coeffs: SemiclassicalCoefficients | None = None,
                  **kw) -> "SaddleProblem":
        coeffs = coeffs or extract_coefficients(spec.hamiltonian)
        c = coeffs.numeric(spec.params)
        return cls(z_a=spec.z_a, z_b=spec.z_b, T=spec.T, h=spec.h, **c, **kw)

    @property
    def source(self) -> complex:
        return complex(np.conj(self.z_b) * self.z_a)

    @property
    def gamma(self) -> float:
        return (abs(self.z_a) ** 2 + abs(self.z_b) ** 2) / 2

    @property
    def lam(self) -> float:
        return 1 + self.b1 / self.b2

    @property
    def mu_equivalent(self) -> float:
        return -self.a1

    def exponent(self, w, scale: float = 1.0) -> PhiValue:
        """``F`` and its derivatives, with the source scaled by ``scale`` (for homotopy)."""
        w = complex(w)
        T, b2 = self.T, self.b2
        e = scale * self.source * cmath.exp(1j * (w - self.a1) * T)
        v = 1j * T * w * w / (4 * b2) + e - self.gamma
        d1 = 1j * T * w / (2 * b2) + 1j * T * e
        d2 = 1j * T / (2 * b2) - T * T * e
        if self.fold_linear:
            lin = 1j * self.h * T * self.lam / 2
            v += lin * w
            d1 += lin
        return PhiValue(v, d1, d2)

    def prefactor(self) -> complex:
        T, h = self.T, self.h
        return (cmath.exp(-1j * T * self.c00 / h - 1j * T * (self.a0 + self.a1 / 2)
                          - 1j * T * h * (self.b0 - self.b1 ** 2 / (4 * self.b2)))
                * cmath.sqrt(T / (4j * math.pi * h * self.b2)))


def phi_omega(problem: SaddleProblem, w) -> PhiValue:
    """``Φ(ω) = iTω²/4b2 + z_b* z_a e^{i(ω - a1)T} - (|z_b|² + |z_a|²)/2`` and derivatives.

    The unfolded exponent, independent of ``problem.fold_linear``.
    """
    w = complex(w)
    T, b2 = problem.T, problem.b2
    e = problem.source * cmath.exp(1j * (w - problem.a1) * T)
    return PhiValue(1j * T * w * w / (4 * b2) + e - problem.gamma,
                    1j * T * w / (2 * b2) + 1j * T * e,
                    1j * T / (2 * b2) - T * T * e)


@dataclass
class SaddleRecord:
    omega: complex
    phi: complex
    phi2: complex
    residual: float
    iterations: int
    trajectory: list
    sqrt_branch: complex | None = None


def _newton(problem: SaddleProblem, w0: complex, scale: float = 1.0):
    w = complex(w0)
    traj = [w]
    for it in range(1, problem.max_iter + 1):
        p = problem.exponent(w, scale)
        if p.d2 == 0:
            raise SaddleError("vanishing second derivative during Newton iteration", traj)
        w = w - p.d1 / p.d2
        traj.append(w)
        p = problem.exponent(w, scale)
        if not cmath.isfinite(p.d1):
            raise SaddleError("Newton iteration diverged", traj)
        if abs(p.d1) < problem.tol:
            return w, p, it, traj
    raise SaddleError(f"Newton iteration did not reach |F'| < {problem.tol:g} "
                      f"in {problem.max_iter} steps", traj)


def find_saddle(problem: SaddleProblem, omega0: complex = 0.0) -> SaddleRecord:
    """Complex Newton iteration for ``F'(ω) = 0`` from ``omega0``."""
    w, p, it, traj = _newton(problem, omega0)
    _check_curvature(p)
    return SaddleRecord(w, p.value, p.d2, abs(p.d1), it, traj)


def _check_curvature(p: PhiValue):
    if abs(p.d2) < 1e-10:
        raise SaddleError("second derivative at the saddle is near zero; stationary phase invalid")


def track_saddle(problem: SaddleProblem, steps: int = 16) -> SaddleRecord:
    """Follow the saddle from the source-free Gaussian (``z_b* z_a = 0``) to the actual source.

    The branch of ``sqrt(-F'')`` is continued along the same path from the
    principal value at the Gaussian reference.
    """
    w = -problem.h * problem.b2 * problem.lam if problem.fold_linear else 0.0
    p0 = problem.exponent(w, 0.0)
    branch = cmath.sqrt(-p0.d2)
    traj = [complex(w)]
    total = 0
    for t in np.linspace(0, 1, steps + 1)[1:]:
        w, p, it, tr = _newton(problem, w, float(t))
        total += it
        traj.extend(tr[1:])
        s = cmath.sqrt(-p.d2)
        branch = s if abs(s - branch) <= abs(s + branch) else -s
    _check_curvature(p)
    return SaddleRecord(w, p.value, p.d2, abs(p.d1), total, traj, branch)


def lambert_saddle(problem: SaddleProblem, branch: int = 0) -> complex:
    """Closed-form saddle via the Lambert W function.

    ``F' = 0`` reads ``ω' = -2 b2 c' e^{iω'T}`` with ``ω' = ω + h b2 λ`` (folded) and
    ``c' = z_b* z_a e^{-i a1 T} e^{-i h b2 λ T}``; hence
    ``ω' = i W(2i b2 c' T) / T``.
    """
    shift = problem.h * problem.b2 * problem.lam if problem.fold_linear else 0.0
    cp = problem.source * cmath.exp(-1j * problem.a1 * problem.T - 1j * shift * problem.T)
    arg = 2j * problem.b2 * cp * problem.T
    return complex(1j * lambertw(arg, branch) / problem.T - shift)


@dataclass(frozen=True)
class SemiclassicalResult:
    value: complex
    route: str
    saddle: SaddleRecord | None = None
    remainder_bound: float = 0.0
    notes: tuple = ()

    def __complex__(self):
        return complex(self.value)


def stationary_phase_propagator(spec: PropagatorSpec, h: float | None = None,
                                fold_linear: bool = True, track: bool = True) -> SemiclassicalResult:
    """Second-order stationary-phase value of the semiclassical ω integral.

    ``∫ e^{F/h} dω ≈ e^{F*/h} sqrt(2πh) / sqrt(-F''*)`` at the saddle ``ω*``.  With
    ``track`` the square-root branch is continued from the source-free
    Gaussian; otherwise it is the one whose steepest-descent direction has a
    positive real part.  The neglected ``h^k, k ≥ 3`` terms of the symbol are
    bounded by ``(T/h) |R(ζ*)|`` at ``ζ* = |z_b* z_a|/h + 1/2``, the centre of the
    Poisson weight.
    """
    if h is not None:
        spec = spec.replace(h=h)
    if spec.direction != "real":
        raise InputError("stationary phase is implemented for real time")
    coeffs = extract_coefficients(spec.hamiltonian)
    zstar = abs(spec.source) / spec.h + 0.5
    bound = spec.T / spec.h * coeffs.remainder_value(zstar, spec.h, spec.params)
    if coeffs.is_degenerate or float(coeffs.b2.evaluate(dict(spec.params))) == 0:
        v = propagator_fock(spec).value
        return SemiclassicalResult(v, "exact-sum", None, 0.0,
                                   ("b2 = 0: rerouted to the exact Fock sum",))
    prob = SaddleProblem.from_spec(spec, coeffs, fold_linear=fold_linear)
    if track:
        rec = track_saddle(prob)
        root = rec.sqrt_branch
    else:
        rec = find_saddle(prob, lambert_saddle(prob))
        mag = math.sqrt(abs(rec.phi2))
        theta = (math.pi - cmath.phase(rec.phi2)) / 2
        while theta > math.pi / 2:
            theta -= math.pi
        while theta <= -math.pi / 2:
            theta += math.pi
        root = mag * cmath.exp(-1j * theta)
    integral = cmath.exp(rec.phi / spec.h) * math.sqrt(2 * math.pi * spec.h) / root
    if not fold_linear:
        integral *= cmath.exp(1j * rec.omega * spec.T * prob.lam / 2)
    notes = (f"neglected h^k (k>=3) bound {bound:.3e}",) if coeffs.remainder else ()
    return SemiclassicalResult(prob.prefactor() * integral, "stationary-phase", rec, bound, notes)


def exact_omega_integral(spec: PropagatorSpec, contour: ContourConfig | None = None) -> complex:
    """The semiclassical ω integral evaluated by contour quadrature, without approximation.

    Equal to the exact propagator whenever the symbol has no ``h^k, k ≥ 3`` terms.
    """
    prob = SaddleProblem.from_spec(spec, fold_linear=False)
    E = CanonicalExponent(A=spec.T / (4 * spec.h * prob.b2), B=spec.T * prob.lam / 2,
                          S=prob.source / spec.h * cmath.exp(-1j * prob.a1 * spec.T),
                          kappa=spec.T, C=-prob.gamma / spec.h)
    r = integrate_canonical(E, contour)
    return prob.prefactor() * r.value
