"""Time-sliced path integrals evaluated through their Fock-basis transfer kernels.

A slice of the symmetric scheme inserts ``∫ d²z/(π h) e^{-ε q(|z|²/h)} |z⟩⟨z|``,
which for a radial ``q`` is diagonal on Fock states with eigenvalue

    d_n = (1/n!) ∫_0^∞ r^n e^{-r} e^{-ε q(r)} dr.

The N-slice integral is then ``Σ_n d_n^N`` (periodic) or a single Fock sum
(fixed ends), so no multidimensional integral is ever sampled.

Two slice functions are offered.  ``slicing="moment"`` (default) uses the
moment-mapped symbol ``q = A[H^F]``, defined by ``⟨q⟩_n = H^F(n + 1/2)`` under
the Gamma weight above; the slice then reproduces the exact spectrum at first
order in ε and the N → ∞ limit is the true partition function.
``slicing="literal"`` uses ``q = H^F`` itself; its limit is shifted by the
variance of the Gamma weight and is kept for comparison.
"""

from __future__ import annotations

import math
import warnings
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln, roots_genlaguerre, zeta as hurwitz_zeta

from .algebra import ClassicalSymbol, NumberPolynomial, classical_symbol, _compose_affine
from .coeff import ONE, ZERO, Coeff
from .errors import DivergenceError, InputError, QuadratureError, ShapeError, TruncationError
from .oracle import FockTruncation, PropagatorSpec, SeriesResult, _choose_cutoff, _fsum_complex

VARIANTS = ("endpoint", "symmetric")
SLICINGS = ("moment", "literal")


class CapWarning(RuntimeWarning):
    """A sum was stopped at its hard cap without converging."""


@dataclass(frozen=True)
class LatticeScheme:
    """Discretisation of an imaginary- or real-time interval into ``N`` slices.

    ``boundary="periodic"`` identifies ``z_N = z_0`` (traces); ``"fixed"`` pins
    ``z_0 = z_a`` and ``z_N = z_b`` (propagators).  ``time="real"`` multiplies
    the Hamiltonian term by ``i``.
    """

    N: int
    beta_or_T: float
    variant: str = "symmetric"
    boundary: str = "periodic"
    z_a: complex | None = None
    z_b: complex | None = None
    time: str = "imaginary"
    h: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InputError(f"N must be a positive integer, got {self.N}")
        if self.variant not in VARIANTS:
            raise InputError(f"variant must be one of {VARIANTS}")
        if self.boundary not in ("periodic", "fixed"):
            raise InputError("boundary must be 'periodic' or 'fixed'")
        if self.boundary == "fixed" and (self.z_a is None or self.z_b is None):
            raise InputError("fixed boundary needs z_a and z_b")
        if self.time not in ("imaginary", "real"):
            raise InputError("time must be 'imaginary' or 'real'")

    @property
    def eps(self) -> complex | float:
        e = self.beta_or_T / self.N
        return 1j * e if self.time == "real" else e


def sliced_action(path, scheme: LatticeScheme, H: ClassicalSymbol,
                  params: Mapping | None = None) -> complex:
    """Discrete exponent ``f`` of the sliced integral (the weight is ``e^{-f}``).

    ``f = (1/h) Σ_j [|z_{j+1}|²/2 + |z_j|²/2 - z*_{j+1} z_j] + ε Σ_j H_j``
    with ``H_j = H(z*_{j+1} z_j / h)`` (endpoint) or ``H(|z_j|²/h)`` (symmetric),
    ``j = 0..N-1``.  Periodic paths supply ``z_0..z_{N-1}``; fixed paths supply
    the interior ``z_1..z_{N-1}``.  A leading batch axis is allowed.
    """
    z = np.asarray(path, dtype=complex)
    N = scheme.N
    if scheme.boundary == "periodic":
        if z.shape[-1] != N:
            raise ShapeError(f"periodic path needs {N} points, got {z.shape[-1]}")
        zj = z
        zn = np.roll(z, -1, axis=-1)
    else:
        if z.shape[-1] != N - 1:
            raise ShapeError(f"fixed path needs {N - 1} interior points, got {z.shape[-1]}")
        shape = z.shape[:-1] + (1,)
        za = np.full(shape, scheme.z_a, dtype=complex)
        zb = np.full(shape, scheme.z_b, dtype=complex)
        full = np.concatenate([za, z, zb], axis=-1)
        zj, zn = full[..., :-1], full[..., 1:]
    h = scheme.h
    kin = (0.5 * np.abs(zn) ** 2 + 0.5 * np.abs(zj) ** 2 - np.conj(zn) * zj) / h
    arg = np.conj(zn) * zj / h if scheme.variant == "endpoint" else np.abs(zj) ** 2 / h
    pot = H.evaluate(arg, params)
    out = np.sum(kin, axis=-1) + scheme.eps * np.sum(pot, axis=-1)
    return out if out.ndim else complex(out)


# --------------------------------------------------------------------------
# slice functions


def moment_map(sym: ClassicalSymbol) -> ClassicalSymbol:
    """The slice function ``q`` with ``(1/n!) ∫ r^n e^{-r} q(r) dr = sym(n + 1/2)``.

    ``sym(x + 1/2)`` is expanded in rising factorials ``(x+1)_k``, whose Gamma
    moments are ``r^k``.  For a symbol built from an operator this is the
    operator's anti-normal (P-representation) symbol.
    """
    g = list(_compose_affine(list(sym.coeffs), ONE, Coeff.const(Fraction(1, 2))))
    out = [ZERO] * max(len(g), 1)
    while g and any(not c.is_zero() for c in g):
        while g and g[-1].is_zero():
            g.pop()
        k = len(g) - 1
        lead = g[-1]
        out[k] = lead
        # subtract lead * (x+1)(x+2)...(x+k)
        rf = [ONE]
        for j in range(1, k + 1):
            rf = [(rf[i - 1] if i > 0 else ZERO) + (rf[i] * j if i < len(rf) else ZERO)
                  for i in range(len(rf) + 1)]
        g = [g[i] - lead * rf[i] for i in range(len(g))]
        g.pop()
    return ClassicalSymbol(out)


def slice_symbol(sym: ClassicalSymbol, slicing: str = "moment") -> ClassicalSymbol:
    if slicing not in SLICINGS:
        raise InputError(f"slicing must be one of {SLICINGS}")
    return moment_map(sym) if slicing == "moment" else sym


@lru_cache(maxsize=4096)
def _gamma_rule(order: int, n: int):
    """Gauss rule for the normalised weight ``r^n e^{-r} / n!``."""
    if order <= 256:
        x, w = roots_genlaguerre(order, n)
    else:
        # scipy's Newton polish overflows at high order; plain Golub-Welsch is fine here
        k = np.arange(1, order)
        x, v = eigh_tridiagonal(2 * np.arange(order) + n + 1.0, np.sqrt(k * (k + n)))
        w = v[0] ** 2
    return x, w / w.sum()


@dataclass(frozen=True)
class Quadrature:
    """Gauss-Laguerre order escalation: doubling from ``order`` until successive
    results agree to ``rtol``, up to ``max_order``."""

    order: int = 64
    rtol: float = 1e-13
    max_order: int = 1024


@dataclass
class TransferKernel:
    """Diagonal slice eigenvalues ``d_n`` (after removing the factor ``e^{-ε q0}``)."""

    d: np.ndarray
    n_max: int
    eps: complex
    q0: complex
    orders: list = field(default_factory=list)
    slicing: str = "moment"


def _slice_eigenvalue(n: int, qc: np.ndarray, eps, quad: Quadrature):
    order = quad.order
    x, w = _gamma_rule(order, n)
    prev = np.sum(w * np.exp(-eps * np.polynomial.polynomial.polyval(x, qc)))
    while order < quad.max_order:
        order *= 2
        x, w = _gamma_rule(order, n)
        cur = np.sum(w * np.exp(-eps * np.polynomial.polynomial.polyval(x, qc)))
        if abs(cur - prev) <= quad.rtol * abs(cur):
            return cur, order
        prev = cur
    raise QuadratureError(f"slice integral for n={n} not converged at order {quad.max_order}")


def _numeric_slice(sym: ClassicalSymbol, slicing: str, h: float, params: Mapping | None):
    q = slice_symbol(sym, slicing)
    qc = q.numeric_coeffs({"h": h, **(params or {})})
    q0 = qc[0]
    qc = qc.copy()
    qc[0] = 0
    return qc, q0


def _to_symbol(H, h) -> ClassicalSymbol:
    if isinstance(H, ClassicalSymbol):
        return H
    if isinstance(H, NumberPolynomial):
        return classical_symbol(H, None).subs({"h": Coeff.const(h)}) if not isinstance(h, complex) \
            else classical_symbol(H, None)
    raise TypeError("expected NumberPolynomial or ClassicalSymbol")


def transfer_kernel(H, eps, h: float = 1.0, n_count: int = 64, params: Mapping | None = None,
                    slicing: str = "moment", quad: Quadrature | None = None) -> TransferKernel:
    """Slice eigenvalues ``d_0..d_{n_count-1}``."""
    quad = quad or Quadrature()
    qc, q0 = _numeric_slice(_to_symbol(H, h), slicing, h, params)
    d, orders = [], []
    for n in range(n_count):
        v, o = _slice_eigenvalue(n, qc, eps, quad)
        d.append(v)
        orders.append(o)
    return TransferKernel(np.array(d), n_count - 1, eps, q0, orders, slicing)


def transfer_partition(H, beta: float, N: int, h: float = 1.0, params: Mapping | None = None,
                       trunc: FockTruncation | None = None, quad: Quadrature | None = None,
                       slicing: str = "moment") -> SeriesResult:
    """Periodic symmetric-scheme N-slice integral ``e^{-β q0} Σ_n d_n^N``.

    ``q0`` is the constant term of the slice function, equal to the constant of
    ``H^F`` (the moment map preserves constants).
    """
    if not beta > 0:
        raise InputError("beta must be positive")
    trunc = trunc or FockTruncation()
    quad = quad or Quadrature()
    sym = _to_symbol(H, h)
    qc, q0 = _numeric_slice(sym, slicing, h, params)
    lead = np.trim_zeros(np.real(qc), "b")
    if len(lead) == 0 or lead[-1] <= 0:
        raise DivergenceError("slice function not bounded below; the sliced integral diverges")
    eps = beta / N
    top = trunc.n_max if trunc.n_max is not None else trunc.cap
    terms = []
    acc = 0.0
    peaked = False
    for n in range(top + 1):
        d, _ = _slice_eigenvalue(n, qc, eps, quad)
        t = float(np.real(d)) ** N
        if trunc.n_max is None and terms:
            peaked = peaked or t < terms[-1]
            if peaked and t <= trunc.rtol * acc:
                pref = math.exp(-beta * float(np.real(q0)))
                return SeriesResult(pref * math.fsum(terms), len(terms), pref * t)
        terms.append(t)
        acc += t
    pref = math.exp(-beta * float(np.real(q0)))
    if trunc.n_max is None:
        raise TruncationError(f"transfer sum not converged within cap={trunc.cap}")
    d, _ = _slice_eigenvalue(top + 1, qc, eps, quad)
    tail = pref * float(np.real(d)) ** N
    if trunc.tol is not None and tail > trunc.tol:
        raise TruncationError(f"first omitted term {tail:.3e} exceeds tol={trunc.tol:.1e}")
    return SeriesResult(pref * math.fsum(terms), len(terms), tail)


def endpoint_partition(H, beta: float, N: int, h: float = 1.0, params: Mapping | None = None) -> float:
    """Periodic endpoint-scheme N-slice integral for a linear symbol ``s0 + s1 ζ``.

    The endpoint slice ``exp(z*_{j+1} z_j (1 - ε s1)/h - ε s0)`` is the kernel of
    ``e^{-ε s0} (1 - ε s1)^n``, so the trace is geometric.  Nonlinear symbols make
    the Gaussian slice integrals diverge and are rejected.
    """
    sym = _to_symbol(H, h)
    c = np.real(sym.numeric_coeffs({"h": h, **(params or {})}))
    c = np.trim_zeros(c, "b")
    if len(c) != 2:
        raise ShapeError("the endpoint scheme is evaluated only for symbols linear in zeta")
    s0, s1 = c
    eps = beta / N
    x = (1 - eps * s1) ** N
    if not abs(x) < 1:
        raise DivergenceError("endpoint slices do not contract: need 0 < eps*s1 < 2")
    return math.exp(-beta * s0) / (1 - x)


def linear_symmetric_closed(s0: float, s1: float, beta: float, N: int, slicing: str = "moment") -> float:
    """Closed form of the symmetric N-slice integral for ``H^F = s0 + s1 ζ``."""
    eps = beta / N
    c0 = s0 - s1 / 2 if slicing == "moment" else s0
    y = (1 + eps * s1) ** (-N)
    return math.exp(-beta * c0) * y / (1 - y)


def scheme_factor_check(beta: float, N: int, slicing: str = "moment",
                        quad: Quadrature | None = None) -> float:
    """Endpoint over symmetric N-slice value for ``H = n + 1/2`` (symbol ``ζ``)."""
    H = ClassicalSymbol([0, 1])
    end = endpoint_partition(H, beta, N)
    sym = float(transfer_partition(H, beta, N, slicing=slicing, quad=quad).value)
    return end / sym


def richardson(values: Sequence[float], ratio: float = 2.0, order: int = 1):
    """Richardson extrapolation for a sequence at ``N, ratio N, ratio² N, ...``.

    Assumes an error expansion in powers of ``1/N`` and eliminates the first
    ``order`` terms; needs ``order + 1`` values and uses the last ones.
    """
    v = [complex(x) for x in values]
    if len(v) < order + 1:
        raise InputError(f"need at least {order + 1} values for order {order}")
    v = v[-(order + 1):]
    for k in range(1, order + 1):
        f = ratio ** k
        v = [(f * v[i + 1] - v[i]) / (f - 1) for i in range(len(v) - 1)]
    out = v[0]
    return out.real if all(isinstance(x, (int, float)) for x in values) or out.imag == 0 else out


def first_order_constant(Ns: Sequence[int], errors: Sequence[float]) -> float:
    """Smallest ``C`` with ``|error| ≤ C / N`` at every sampled ``N``.

    A least-squares fit of ``C / N`` undershoots whenever ``N |error|`` is still
    creeping up towards its limit, so the bound constant is ``max N |error|``.
    """
    return float(np.max(np.asarray(Ns, dtype=float) * np.abs(np.asarray(errors, dtype=float))))


# --------------------------------------------------------------------------
# propagator


def lattice_propagator(spec: PropagatorSpec, N: int, trunc: FockTruncation | None = None,
                       quad: Quadrature | None = None, slicing: str = "moment") -> complex:
    """Fixed-end symmetric N-slice propagator.

    The slice at ``z_0 = z_a`` is not integrated and contributes
    ``e^{-ε q(|z_a|²/h)}``; the ``N - 1`` interior slices form the diagonal
    operator with eigenvalues ``d_n``, so

    ``K_N = e^{-ε q(|z_a|²/h)} e^{-Γ/h} Σ_n (z_b* z_a/h)^n/n! d_n^{N-1}``

    with ``ε = i T / (h N)`` (real time) or ``T / (h N)`` (imaginary time).
    """
    trunc = trunc or FockTruncation()
    quad = quad or Quadrature()
    if int(N) != N or N < 1:
        raise InputError("N must be a positive integer")
    sym = classical_symbol(spec.hamiltonian, None)
    qc, q0 = _numeric_slice(sym, slicing, spec.h, spec.params)
    eps = spec.complex_time * 1j / (spec.h * N)
    top = trunc.n_max + 1 if trunc.n_max is not None else trunc.cap
    n = np.arange(top + 1)
    c = abs(spec.source) / spec.h
    if c:
        env = np.exp(n * math.log(c) - gammaln(n + 1) - spec.gamma_ba / spec.h)
    else:
        env = np.zeros(top + 1)
        env[0] = math.exp(-spec.gamma_ba / spec.h)
    k = _choose_cutoff(env, trunc) if c else 1
    src = spec.source / spec.h
    terms = []
    for j in range(k):
        d, _ = _slice_eigenvalue(j, qc, eps, quad) if N > 1 else (1.0, 0)
        coef = np.exp(j * np.log(src) - gammaln(j + 1)) if src else (1.0 if j == 0 else 0.0)
        terms.append(coef * d ** (N - 1))
    ra = abs(spec.z_a) ** 2 / spec.h
    first = np.exp(-eps * (N * q0 + np.polynomial.polynomial.polyval(ra, qc)))
    return complex(first * math.exp(-spec.gamma_ba / spec.h) * _fsum_complex(terms))


# --------------------------------------------------------------------------
# Matsubara modes and the polar-coordinate pitfall


@dataclass(frozen=True)
class ModeCutoff:
    M: int

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise InputError("mode cutoff M must be a positive integer")


def matsubara_partition(beta: float, M: ModeCutoff | int, omega: float = 1.0, tail: bool = True) -> float:
    """Harmonic partition function from the periodic Gaussian in Fourier modes.

    Mode ``m`` contributes ``1/(1 + (βω/2πm)²)`` after pairing ``±m``, and the
    zero mode ``1/(βω)``.  The omitted factor ``Π_{m>M}`` is restored from
    ``log Π_{m>M}(1 + x²/m²) = Σ_k (-1)^{k+1} x^{2k} ζ(2k, M+1)/k`` with
    ``x = βω/2π``.
    """
    M = M.M if isinstance(M, ModeCutoff) else ModeCutoff(M).M
    if not beta > 0:
        raise InputError("beta must be positive")
    x = beta * omega / (2 * math.pi)
    m = np.arange(1, M + 1, dtype=float)
    log_prod = math.fsum(np.log1p((x / m) ** 2))
    if tail:
        if x >= M + 1:
            raise InputError("tail series needs beta*omega/2pi < M + 1")
        k = 1
        while True:
            t = (-1) ** (k + 1) * x ** (2 * k) * hurwitz_zeta(2 * k, M + 1) / k
            log_prod += t
            if abs(t) < 1e-18 or k > 200:
                break
            k += 1
    return math.exp(-log_prod) / (beta * omega)


def polar_sum(sym: ClassicalSymbol, beta: float, params: Mapping | None = None,
              trunc: FockTruncation | None = None) -> SeriesResult:
    """``Σ_n exp(-β H^F(ζ = n))``: the symbol sampled at integers instead of ``n + 1/2``.

    This is what the naive polar-coordinate treatment of the periodic path
    produces; it is a wrong answer kept as a negative control.  A non-decaying
    sum is stopped at the cap with a :class:`CapWarning`.
    """
    trunc = trunc or FockTruncation()
    c = np.real(sym.numeric_coeffs(params))
    top = trunc.n_max if trunc.n_max is not None else trunc.cap
    n = np.arange(top + 2, dtype=float)
    logw = -beta * np.polynomial.polynomial.polyval(n, c)
    if np.max(logw) > 700:
        raise DivergenceError("weights overflow; symbol unbounded below")
    w = np.exp(logw)
    lead = np.trim_zeros(c, "b")
    bounded = len(lead) >= 2 and lead[-1] > 0
    if trunc.n_max is not None:
        return SeriesResult(math.fsum(w[:top + 1]), top + 1, float(w[top + 1]))
    if bounded:
        try:
            k = _choose_cutoff(w[:top + 1], trunc)
            return SeriesResult(math.fsum(w[:k]), k, float(w[k]))
        except TruncationError:
            pass
    warnings.warn(f"polar sum does not decay; stopped at cap={top}", CapWarning, stacklevel=2)
    return SeriesResult(math.fsum(w[:top + 1]), top + 1, float(w[top + 1]))


def polar_pitfall_partition(beta: float, mu: float, U: float,
                            trunc: FockTruncation | None = None) -> SeriesResult:
    """``e^{-β(μ/2 + 3U/8)} Σ_n e^{-(μ+U) n β - (U/2) n² β}``, a deliberately wrong value.

    Writing periodic paths as ``z = sqrt(ρ) e^{iφ}`` and integrating by parts in
    ``φ`` drops the winding sectors of the angle, which pins ``ρ`` to integers
    instead of half-integers.  Kept as a negative control; it does not reproduce
    the Fock-space partition function.  The exponent is used exactly in this form
    (note the sign of the linear term); :func:`polar_sum` is the variant that
    samples ``H^F`` itself at integers.
    """
    if U < 0:
        raise InputError("pitfall sum defined for U >= 0")
    mu, U = Coeff.const(mu), Coeff.const(U)
    sym = ClassicalSymbol([mu / 2 + U * 3 / 8, mu + U, U / 2])
    return polar_sum(sym, beta, trunc=trunc)
