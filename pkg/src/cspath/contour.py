"""Contour quadrature for ``∫ dω exp(iAω² + iBω + S e^{iκω} + C)`` over the real line.

On the real axis the Gaussian factor has unit modulus, so the integral
converges only conditionally and the path is deformed into the complex plane.  Write ``ω(u) = u + i g(u)``.

* Where the Gaussian decays in the same half-plane in which ``e^{iκω}`` decays,
  the path is a straight ray ``g = ±|u| tan θ``.
* On the other side a ray would let the source term grow double-exponentially,
  so ``g`` saturates at depth ``η`` (``g ∝ η tanh(|u| tan θ / η)``), with ``η``
  chosen so ``|S| e^{|κ| η} = |S| + budget``.  The Gaussian still decays like
  ``exp(-2|A| η |u|)`` along it.

The deformation crosses no singularities (the integrand is entire) and the
ends are closed at infinity inside the decay sectors, so the value is the
real-line integral.  The half-width grows until an upper bound on the exponent
falls below the requested cutoff; the rest is composite Gauss-Legendre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .errors import ContourError, InputError, QuadratureError


@dataclass(frozen=True)
class ContourConfig:
    """Contour and quadrature controls.

    Parameters
    ----------
    theta : float
        Ray angle in ``(0, π/2)``.
    half_width : float, optional
        Fixed truncation half-width; chosen automatically when ``None``.
    panel_nodes : int
        Gauss-Legendre nodes per panel.
    budget : float
        Allowed growth ``|S| e^{|κ|η} - |S|`` of the source term on the dip side.
    cutoff : float
        Log-magnitude, relative to the integrand peak, below which the tails are dropped.
    fallback_theta : float, optional
        Angle to retry with when validation at ``theta`` fails.
    """

    theta: float = math.pi / 4
    half_width: float | None = None
    panel_nodes: int = 24
    budget: float = 6.0
    cutoff: float = 38.0
    fallback_theta: float | None = math.pi / 8

    def __post_init__(self):
        if not 0 < self.theta < math.pi / 2:
            raise InputError("contour angle must lie in (0, pi/2)")
        if self.panel_nodes < 2:
            raise InputError("need at least two nodes per panel")
        if self.half_width is not None and not self.half_width > 0:
            raise InputError("half_width must be positive")


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error: float
    nodes: int
    theta: float
    half_width: float


@dataclass(frozen=True)
class CanonicalExponent:
    """``E(ω) = iAω² + iBω + S e^{iκω} + C`` with real ``A ≠ 0``, ``B``, ``κ``."""

    A: float
    B: float
    S: complex
    kappa: float
    C: complex = 0.0

    def __call__(self, w):
        return 1j * self.A * w * w + 1j * self.B * w + self.S * np.exp(1j * self.kappa * w) + self.C

    def derivative(self, w):
        return 2j * self.A * w + 1j * self.B + 1j * self.kappa * self.S * np.exp(1j * self.kappa * w)


class _Path:
    def __init__(self, E: CanonicalExponent, theta: float, budget: float):
        self.tn = math.tan(theta)
        sA = 1.0 if E.A > 0 else -1.0
        sk = 1.0 if E.kappa >= 0 else -1.0
        if E.S != 0 and E.kappa != 0:
            self.eta = math.log1p(budget / abs(E.S)) / abs(E.kappa)
        else:
            self.eta = math.inf
        # per side (u > 0, u < 0): imaginary direction of Gaussian decay and whether it is a ray
        self.side = {}
        for sgn in (1.0, -1.0):
            im_dir = sgn * sA
            ray = im_dir == sk or not math.isfinite(self.eta)
            self.side[sgn] = (im_dir, ray)

    def g(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        gp = np.empty_like(u)
        for sgn in (1.0, -1.0):
            m = (u >= 0) if sgn > 0 else (u < 0)
            im_dir, ray = self.side[sgn]
            a = np.abs(u[m])
            if ray:
                out[m] = im_dir * a * self.tn
                gp[m] = im_dir * sgn * self.tn
            else:
                t = a * self.tn / self.eta
                out[m] = im_dir * self.eta * np.tanh(t)
                e2 = np.exp(-2 * t)
                gp[m] = im_dir * sgn * self.tn * 4 * e2 / (1 + e2) ** 2
        return out, gp

    def point(self, u):
        g, gp = self.g(u)
        return np.asarray(u) + 1j * g, 1 + 1j * gp


def _log_bound(E: CanonicalExponent, path: _Path, u):
    w, _ = path.point(u)
    gauss = np.real(1j * E.A * w * w + 1j * E.B * w)
    src = abs(E.S) * np.exp(-E.kappa * np.imag(w))
    return gauss + src + np.real(E.C)


def _integrate_once(E: CanonicalExponent, cfg: ContourConfig, theta: float, refine: int):
    path = _Path(E, theta, cfg.budget)
    probe = np.linspace(-2.0, 2.0, 81)
    peak = float(np.max(_log_bound(E, path, probe)))
    target = peak - cfg.cutoff
    if cfg.half_width is None:
        L = 1.0
        for _ in range(200):
            lo = np.linspace(L, 3 * L, 64)
            if max(np.max(_log_bound(E, path, lo)), np.max(_log_bound(E, path, -lo))) < target:
                break
            L *= 1.5
        else:
            raise ContourError("integrand does not decay along the deformed contour")
    else:
        L = cfg.half_width
    ends = _log_bound(E, path, np.array([-L, L]))
    if np.max(ends) > target:
        raise ContourError(f"integrand not negligible at the contour ends (theta={theta:.4f}, L={L:.3g})")
    x, wt = roots_legendre(cfg.panel_nodes)
    total = 0.0 + 0.0j
    nodes = 0
    for lo, hi in ((-L, 0.0), (0.0, L)):
        probe = np.linspace(lo, hi, 2001)
        w, dw = path.point(probe)
        freq = np.max(np.abs(E.derivative(w)) * np.abs(dw))
        width = min(1.0, 4.0 / max(freq, 1e-300)) / refine
        npan = max(1, int(math.ceil((hi - lo) / width)))
        edges = np.linspace(lo, hi, npan + 1)
        a, b = edges[:-1, None], edges[1:, None]
        u = ((a + b) / 2 + (b - a) / 2 * x).ravel()
        wu = ((b - a) / 2 * wt).ravel()
        w, dw = path.point(u)
        f = np.exp(E(w)) * dw * wu
        total += complex(math.fsum(f.real), math.fsum(f.imag))
        nodes += u.size
    return total, nodes, L


def integrate_canonical(E: CanonicalExponent, cfg: ContourConfig | None = None,
                        rtol: float = 1e-10) -> QuadratureResult:
    """Integrate ``exp(E(ω))`` over the real line along the deformed contour.

    The error estimate is the change under halving every panel.  If the
    configured angle fails validation the fallback angle is tried once.
    """
    cfg = cfg or ContourConfig()
    if E.A == 0:
        raise InputError("canonical exponent needs A != 0")
    angles = [cfg.theta] + ([cfg.fallback_theta] if cfg.fallback_theta else [])
    last: Exception | None = None
    for theta in angles:
        try:
            v1, n1, L = _integrate_once(E, cfg, theta, 1)
            v2, n2, _ = _integrate_once(E, cfg, theta, 2)
        except ContourError as exc:
            last = exc
            continue
        err = abs(v2 - v1)
        if err > rtol * max(abs(v2), 1e-300) and err > 1e-14:
            raise QuadratureError(f"panel refinement changed the result by {err:.2e}")
        return QuadratureResult(v2, err, n1 + n2, theta, L)
    raise last  # type: ignore[misc]
