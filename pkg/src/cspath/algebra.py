"""Exact operator algebra for a single bosonic mode with ``[a, a†] = h``.

Three operator representations are used:

* :class:`BosonPolynomial` - normal-ordered polynomial in ``a†`` and ``a``;
* :class:`NumberPolynomial` - polynomial in the number operator ``n = a†a``;
* :class:`PhaseSpacePolynomial` - polynomial in ``m = (p² + q²)/2 = n + h/2``.

and two kinds of classical functions:

* :class:`ClassicalSymbol` - polynomial in the dimensionless ``ζ = |z|²/h``;
* :class:`ZSymbol` - general polynomial in ``(z*, z)`` for symbols that are not
  functions of ``|z|²`` alone.

The classical symbol produced by :func:`classical_symbol` replaces ``n`` by
``h(ζ - 1/2)``.  Its defining property is that ``H(ζ = k + 1/2)`` is the
eigenvalue of ``H(n)`` on the Fock state ``|k⟩``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

import numpy as np

from .coeff import ONE, ZERO, Coeff, CoeffLike, coeff_sum, to_fraction
from .errors import InputError, ShapeError

H_SYMBOL = "h"


def as_h(h: CoeffLike | None) -> Coeff:
    """Normalise an ``h`` argument; ``None`` means the symbolic parameter ``h``."""
    if h is None:
        return Coeff.symbol(H_SYMBOL)
    c = Coeff.coerce(h)
    if c.is_constant() and c.constant_value() <= 0:
        raise InputError(f"h must be positive, got {c}")
    return c


def _h_bindings(h: Coeff) -> dict:
    # substituting h -> h is a no-op, so only bind when h is not the bare symbol
    return {} if h == Coeff.symbol(H_SYMBOL) else {H_SYMBOL: h}


# --------------------------------------------------------------------------
# univariate polynomial helpers (ascending lists of Coeff)


def _trim(c: Sequence[Coeff]) -> tuple:
    c = list(c)
    while c and c[-1].is_zero():
        c.pop()
    return tuple(c)


def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else ZERO) + (q[i] if i < len(q) else ZERO) for i in range(n)]


def _pmul(p, q):
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a.is_zero():
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _pscale(p, s: Coeff):
    return [a * s for a in p]


def _compose_affine(p, slope: Coeff, shift: Coeff):
    """Coefficients of ``p(slope*x + shift)``."""
    out: list = []
    base = [shift, slope]
    power = [ONE]
    for a in p:
        out = _padd(out, _pscale(power, a))
        power = _pmul(power, base)
    return out


def _peval(p, x):
    acc = ZERO if isinstance(x, Coeff) else 0
    for a in reversed(p):
        acc = acc * x + a
    return acc


def _coerce_coeffs(coeffs) -> tuple:
    return _trim(Coeff.coerce(c) for c in coeffs)


def _fmt_poly(coeffs, var: str) -> str:
    if not coeffs:
        return "0"
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c.is_zero():
            continue
        cs = str(c)
        if k == 0:
            parts.append(cs)
            continue
        mono = var if k == 1 else f"{var}^{k}"
        if c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        elif len(c.terms) == 1:
            parts.append(f"{cs}*{mono}")
        else:
            parts.append(f"({cs})*{mono}")
    out = parts[0]
    for s in parts[1:]:
        out += " - " + s[1:] if s.startswith("-") else " + " + s
    return out


# --------------------------------------------------------------------------
# polynomials in the number operator


class NumberPolynomial:
    """``H(n) = Σ_k coeffs[k] n^k`` with exact coefficients.

    Coefficients may contain the algebra parameter ``h`` (as in the rescaled
    Bose-Hubbard Hamiltonian ``-μ n + (U/2) n (n - h)``); operations that take an
    ``h`` argument substitute it.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[CoeffLike] = ()):
        self.coeffs = _coerce_coeffs(coeffs)

    @classmethod
    def n(cls) -> "NumberPolynomial":
        return cls([0, 1])

    @classmethod
    def constant(cls, c: CoeffLike) -> "NumberPolynomial":
        return cls([c])

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def coeff(self, k: int) -> Coeff:
        return self.coeffs[k] if k < len(self.coeffs) else ZERO

    @property
    def free_symbols(self) -> frozenset:
        return frozenset().union(*(c.free_symbols for c in self.coeffs))

    def __add__(self, other):
        other = _as_number_poly(other)
        return NumberPolynomial(_padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return NumberPolynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_number_poly(other))

    def __rsub__(self, other):
        return _as_number_poly(other) - self

    def __mul__(self, other):
        other = _as_number_poly(other)
        return NumberPolynomial(_pmul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = NumberPolynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, NumberPolynomial):
            try:
                other = _as_number_poly(other)
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def subs(self, bindings: Mapping[str, CoeffLike] | None = None, **kw) -> "NumberPolynomial":
        return NumberPolynomial([c.subs(bindings, **kw) for c in self.coeffs])

    def eigenvalue(self, k: int, h: CoeffLike = 1) -> Coeff:
        """Exact eigenvalue on ``|k⟩``: the polynomial at ``n = h k``."""
        hc = as_h(h)
        p = [c.subs(_h_bindings(hc)) for c in self.coeffs]
        return _peval(p, hc * k)

    def spectrum(self, n: np.ndarray, h: float = 1.0, params: Mapping | None = None) -> np.ndarray:
        """Float eigenvalues ``H(h n)`` for an integer array ``n``."""
        c = self.numeric_coeffs(h, params)
        return np.polynomial.polynomial.polyval(h * np.asarray(n, dtype=float), c)

    def numeric_coeffs(self, h=1.0, params: Mapping | None = None) -> np.ndarray:
        b = {H_SYMBOL: h, **(params or {})}
        vals = [c.evaluate(b) for c in self.coeffs] or [0]
        return np.array([complex(v) if isinstance(v, complex) else float(v) for v in vals])

    def __str__(self):
        return _fmt_poly(self.coeffs, "n")

    def __repr__(self):
        return f"NumberPolynomial({str(self)!r})"


def _as_number_poly(x) -> NumberPolynomial:
    if isinstance(x, NumberPolynomial):
        return x
    if isinstance(x, (Coeff, int, Fraction, float, str)):
        return NumberPolynomial([x])
    raise TypeError(f"cannot combine NumberPolynomial with {type(x).__name__}")


def bose_hubbard(mu: CoeffLike = "mu", U: CoeffLike = "U") -> NumberPolynomial:
    """One-site Bose-Hubbard ``-μ n + (U/2) n (n - h)``; ``h = 1`` is the usual form."""
    n = NumberPolynomial.n()
    mu, U = Coeff.coerce(mu), Coeff.coerce(U)
    return -mu * n + (U / 2) * n * (n - Coeff.symbol(H_SYMBOL))


def harmonic(omega: CoeffLike = 1) -> NumberPolynomial:
    """``ω (n + h/2)``, the oscillator ``ω(p² + q²)/2``."""
    w = Coeff.coerce(omega)
    return NumberPolynomial([w * Coeff.symbol(H_SYMBOL) / 2, w])


# --------------------------------------------------------------------------
# normal-ordered boson polynomials


class BosonPolynomial:
    """Normal-ordered ``Σ c_{pq} (a†)^p a^q`` in the algebra ``[a, a†] = h``."""

    __slots__ = ("terms", "h")

    def __init__(self, terms: Mapping[tuple, CoeffLike] | None = None, h: CoeffLike | None = None):
        self.h = as_h(h)
        clean = {}
        for (p, q), c in (terms or {}).items():
            if p < 0 or q < 0:
                raise InputError("powers must be non-negative")
            c = Coeff.coerce(c)
            if not c.is_zero():
                clean[(int(p), int(q))] = clean.get((int(p), int(q)), ZERO) + c
        self.terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def a(cls, h=None):
        return cls({(0, 1): 1}, h)

    @classmethod
    def adag(cls, h=None):
        return cls({(1, 0): 1}, h)

    @classmethod
    def constant(cls, c, h=None):
        return cls({(0, 0): c}, h)

    def _check(self, other: "BosonPolynomial"):
        if self.h != other.h:
            raise InputError(f"cannot combine algebras with h={self.h} and h={other.h}")

    def _lift(self, other):
        if isinstance(other, BosonPolynomial):
            self._check(other)
            return other
        if isinstance(other, (Coeff, int, Fraction, float, str)):
            return BosonPolynomial.constant(other, self.h)
        raise TypeError(f"cannot combine BosonPolynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            t[k] = t.get(k, ZERO) + c
        return BosonPolynomial(t, self.h)

    __radd__ = __add__

    def __neg__(self):
        return BosonPolynomial({k: -c for k, c in self.terms.items()}, self.h)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for (p, q), c1 in self.terms.items():
            for (r, s), c2 in other.terms.items():
                # a^q (a†)^r = Σ_k C(q,k) C(r,k) k! h^k (a†)^{r-k} a^{q-k}
                for k in range(min(q, r) + 1):
                    w = c1 * c2 * (comb(q, k) * comb(r, k) * factorial(k)) * self.h ** k
                    key = (p + r - k, q + s - k)
                    out[key] = out.get(key, ZERO) + w
        return BosonPolynomial(out, self.h)

    def __rmul__(self, other):
        return self._lift(other) * self

    def __pow__(self, k: int):
        out = BosonPolynomial.constant(1, self.h)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BosonPolynomial):
            return NotImplemented
        return self.h == other.h and self.terms == other.terms

    def __hash__(self):
        return hash((self.h, frozenset(self.terms.items())))

    def subs(self, bindings=None, **kw) -> "BosonPolynomial":
        b = {**(bindings or {}), **kw}
        h = self.h.subs(b)
        return BosonPolynomial({k: c.subs(b) for k, c in self.terms.items()}, h)

    @property
    def degree(self) -> int:
        return max((p + q for p, q in self.terms), default=0)

    def is_number_conserving(self) -> bool:
        return all(p == q for p, q in self.terms)

    def to_number_polynomial(self) -> NumberPolynomial:
        """Rewrite a diagonal polynomial ``Σ c_k (a†)^k a^k`` in powers of ``n``.

        Uses ``(a†)^k a^k = n (n - h) ... (n - (k-1) h)``.
        """
        if not self.is_number_conserving():
            raise ShapeError("polynomial changes particle number; not a function of n")
        n = NumberPolynomial.n()
        out = NumberPolynomial()
        for (k, _), c in self.terms.items():
            term = NumberPolynomial([c])
            for j in range(k):
                term = term * (n - self.h * j)
            out = out + term
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (p, q) in sorted(self.terms, key=lambda k: (-(k[0] + k[1]), -k[0])):
            c = self.terms[(p, q)]
            ops = []
            if p:
                ops.append("adag" if p == 1 else f"adag^{p}")
            if q:
                ops.append("a" if q == 1 else f"a^{q}")
            mono = "*".join(ops)
            cs = str(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif len(c.terms) == 1:
                parts.append(f"{cs}*{mono}")
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"BosonPolynomial({str(self)!r}, h={self.h})"


_GEN = {"a": (0, 1), "adag": (1, 0)}


def _parse_word(word) -> list:
    if isinstance(word, str):
        word = word.replace("*", " ").split()
    out = []
    for g in word:
        if g not in _GEN:
            raise InputError(f"unknown generator {g!r}; expected 'a' or 'adag'")
        out.append(g)
    return out


def normal_order(p, h: CoeffLike | None = None) -> BosonPolynomial:
    """Normal-ordered canonical form of an operator polynomial.

    ``p`` may be a :class:`BosonPolynomial` (returned unchanged up to
    canonicalisation), a :class:`NumberPolynomial`, or an iterable of
    ``(coeff, word)`` pairs where ``word`` lists generators in written order,
    e.g. ``[(1, "a adag")]``.
    """
    if isinstance(p, BosonPolynomial):
        if h is not None and as_h(h) != p.h:
            p = p.subs({H_SYMBOL: as_h(h)}) if p.h == Coeff.symbol(H_SYMBOL) else p
        return BosonPolynomial(p.terms, p.h)
    hc = as_h(h)
    hb = _h_bindings(hc)
    if isinstance(p, NumberPolynomial):
        n = BosonPolynomial.adag(hc) * BosonPolynomial.a(hc)
        out = BosonPolynomial(h=hc)
        power = BosonPolynomial.constant(1, hc)
        for c in p.coeffs:
            out = out + power * c.subs(hb)
            power = power * n
        return out
    out = BosonPolynomial(h=hc)
    for coeff, word in p:
        term = BosonPolynomial.constant(coeff, hc)
        for g in _parse_word(word):
            term = term * (BosonPolynomial.a(hc) if g == "a" else BosonPolynomial.adag(hc))
        out = out + term
    return out


def fock_matrix(p, dim: int, h: CoeffLike = 1) -> list:
    """Exact matrix of an operator on the first ``dim`` Fock states.

    The basis is rescaled, ``|k)' = sqrt(k! h^k)|k⟩``, so that ``a†|k)' = |k+1)'``
    and ``a|k)' = h k |k-1)'``: every entry is rational.  Matrices of equal
    operators agree in the block of columns ``k < dim - degree``; entries near the
    cutoff are polluted by truncation.

    ``p`` is a :class:`BosonPolynomial` or an iterable of ``(coeff, word)`` pairs
    (words applied right to left, as operator products are).
    """
    hv = as_h(h).constant_value()
    if isinstance(p, BosonPolynomial):
        items = []
        for (a_d, a_), c in p.terms.items():
            items.append((c.subs({H_SYMBOL: hv}), ["adag"] * a_d + ["a"] * a_))
    else:
        items = [(Coeff.coerce(c), _parse_word(w)) for c, w in p]
    M = [[Fraction(0)] * dim for _ in range(dim)]
    for c, word in items:
        cv = c.constant_value()
        for col in range(dim):
            k, amp = col, Fraction(1)
            for g in reversed(word):
                if g == "a":
                    if k == 0:
                        amp = Fraction(0)
                        break
                    amp *= hv * k
                    k -= 1
                else:
                    k += 1
                    if k >= dim:
                        amp = Fraction(0)
                        break
            if amp:
                M[k][col] += cv * amp
    return M


# --------------------------------------------------------------------------
# phase-space forms and classical symbols


class PhaseSpacePolynomial:
    """``Σ coeffs[k] m^k`` with ``m = (p² + q²)/2``; unambiguous since powers of m commute."""

    __slots__ = ("coeffs", "h")

    def __init__(self, coeffs: Iterable[CoeffLike] = (), h: CoeffLike | None = None):
        self.coeffs = _coerce_coeffs(coeffs)
        self.h = as_h(h)

    def __eq__(self, other):
        if not isinstance(other, PhaseSpacePolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs and self.h == other.h

    def __hash__(self):
        return hash((self.coeffs, self.h))

    def __str__(self):
        return _fmt_poly(self.coeffs, "m")

    def __repr__(self):
        return f"PhaseSpacePolynomial({str(self)!r})"


class ClassicalSymbol:
    """Polynomial ``H(ζ) = Σ coeffs[k] ζ^k`` in ``ζ = |z|²/h`` (exact coefficients)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[CoeffLike] = ()):
        self.coeffs = _coerce_coeffs(coeffs)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def coeff(self, k: int) -> Coeff:
        return self.coeffs[k] if k < len(self.coeffs) else ZERO

    @property
    def constant_offset(self) -> Coeff:
        return self.coeff(0)

    def without_constant(self) -> "ClassicalSymbol":
        return ClassicalSymbol((ZERO,) + self.coeffs[1:])

    def __call__(self, zeta):
        """Exact value at ``zeta`` (rational or :class:`Coeff`)."""
        z = zeta if isinstance(zeta, Coeff) else Coeff.const(zeta)
        return _peval(list(self.coeffs), z)

    def evaluate(self, zeta, params: Mapping | None = None, **kw):
        """Float/complex (numpy-broadcasting) value at ``zeta``."""
        c = self.numeric_coeffs({**(params or {}), **kw})
        return np.polynomial.polynomial.polyval(zeta, c)

    def numeric_coeffs(self, params: Mapping | None = None, **kw) -> np.ndarray:
        b = {**(params or {}), **kw}
        vals = [c.evaluate(b) for c in self.coeffs] or [0]
        return np.array([complex(v) if isinstance(v, complex) else float(v) for v in vals])

    def subs(self, bindings=None, **kw) -> "ClassicalSymbol":
        return ClassicalSymbol([c.subs(bindings, **kw) for c in self.coeffs])

    @property
    def free_symbols(self) -> frozenset:
        return frozenset().union(*(c.free_symbols for c in self.coeffs))

    def __add__(self, other):
        other = _as_symbol(other)
        return ClassicalSymbol(_padd(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return ClassicalSymbol([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_symbol(other))

    def __rsub__(self, other):
        return _as_symbol(other) - self

    def __mul__(self, other):
        other = _as_symbol(other)
        return ClassicalSymbol(_pmul(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ClassicalSymbol):
            try:
                other = _as_symbol(other)
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        return _fmt_poly(self.coeffs, "zeta")

    def __repr__(self):
        return f"ClassicalSymbol({str(self)!r})"


def _as_symbol(x) -> ClassicalSymbol:
    if isinstance(x, ClassicalSymbol):
        return x
    if isinstance(x, (Coeff, int, Fraction, float, str)):
        return ClassicalSymbol([x])
    raise TypeError(f"cannot combine ClassicalSymbol with {type(x).__name__}")


class ZSymbol:
    """Polynomial ``Σ c_{jk} (z*)^j z^k`` in the physical phase-space variable z."""

    __slots__ = ("terms", "h")

    def __init__(self, terms: Mapping[tuple, CoeffLike], h: CoeffLike | None = None):
        self.terms = {k: Coeff.coerce(v) for k, v in terms.items() if not Coeff.coerce(v).is_zero()}
        self.h = as_h(h)

    def is_radial(self) -> bool:
        return all(j == k for j, k in self.terms)

    def to_classical(self) -> ClassicalSymbol:
        """Re-express a radial symbol in ``ζ``, using ``|z|² = h ζ``."""
        if not self.is_radial():
            raise ShapeError("symbol depends on the phase of z, not only on |z|^2")
        deg = max((k for k, _ in self.terms), default=0)
        coeffs = [ZERO] * (deg + 1)
        for (k, _), c in self.terms.items():
            coeffs[k] = c * self.h ** k
        return ClassicalSymbol(coeffs)

    def evaluate(self, z, params: Mapping | None = None):
        z = np.asarray(z, dtype=complex)
        b = {H_SYMBOL: self.h.evaluate(params or {}) if self.h.free_symbols else float(self.h), **(params or {})}
        out = np.zeros_like(z)
        for (j, k), c in self.terms.items():
            out = out + complex(c.evaluate(b)) * np.conj(z) ** j * z ** k
        return out

    def __eq__(self, other):
        if not isinstance(other, ZSymbol):
            return NotImplemented
        return self.terms == other.terms and self.h == other.h

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (j, k), c in sorted(self.terms.items(), key=lambda t: (-(t[0][0] + t[0][1]), t[0])):
            mono = "*".join(s for s in (
                "" if j == 0 else ("zs" if j == 1 else f"zs^{j}"),
                "" if k == 0 else ("z" if k == 1 else f"z^{k}")) if s)
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)

    def __repr__(self):
        return f"ZSymbol({str(self)!r})"


def to_phase_space(p: NumberPolynomial, h: CoeffLike = 1) -> PhaseSpacePolynomial:
    """Rewrite ``H(n)`` in powers of ``m = (p² + q²)/2`` via ``n = m - h/2``."""
    hc = as_h(h)
    coeffs = [c.subs(_h_bindings(hc)) for c in p.coeffs]
    return PhaseSpacePolynomial(_compose_affine(coeffs, ONE, -hc / 2), hc)


def classical_symbol(p: NumberPolynomial, h: CoeffLike = 1) -> ClassicalSymbol:
    """The classical Hamiltonian ``H^F(ζ; h)``: phase-space form followed by ``m -> h ζ``.

    >>> str(classical_symbol(bose_hubbard(), 1))
    '1/2*U*zeta^2 + (-U - mu)*zeta + 3/8*U + 1/2*mu'
    """
    ps = to_phase_space(p, h)
    return ClassicalSymbol(_compose_affine(list(ps.coeffs), ps.h, ZERO))


def normal_symbol(p: BosonPolynomial) -> ZSymbol:
    """``(a†)^j a^k -> (z*)^j z^k``."""
    return ZSymbol(dict(p.terms), p.h)


def smooth(sym: ZSymbol, t: CoeffLike) -> ZSymbol:
    """Apply ``exp(t ∂_z ∂_{z*})`` term by term."""
    tc = Coeff.coerce(t)
    out: dict = {}
    for (j, k), c in sym.terms.items():
        for r in range(min(j, k) + 1):
            w = Fraction(factorial(j) * factorial(k), factorial(j - r) * factorial(k - r) * factorial(r))
            key = (j - r, k - r)
            out[key] = out.get(key, ZERO) + c * w * tc ** r
    return ZSymbol(out, sym.h)


def weyl_symbol(p: BosonPolynomial, h: CoeffLike | None = None) -> ZSymbol:
    """Weyl symbol in ``(z*, z)``: ``exp(-(h/2) ∂_z ∂_{z*})`` applied to the normal symbol."""
    hc = p.h if h is None else as_h(h)
    if hc != p.h:
        p = normal_order(p, hc)
    return smooth(ZSymbol(dict(p.terms), hc), -hc / 2)


def weyl_transform(p: BosonPolynomial, h: CoeffLike | None = None):
    """Weyl symbol as a :class:`ClassicalSymbol` in ``ζ``.

    When the result depends on the phase of ``z`` the full :class:`ZSymbol` is
    returned instead; callers distinguish the two with ``isinstance``.
    """
    w = weyl_symbol(p, h)
    return w.to_classical() if w.is_radial() else w


def antinormal_symbol(p: BosonPolynomial) -> ClassicalSymbol:
    """Anti-normal (P-representation) symbol ``exp(-h ∂_z ∂_{z*})`` of the normal symbol.

    An operator whose anti-normal symbol is ``f`` equals ``∫ d²z/(π h) f |z⟩⟨z|``.
    """
    s = smooth(normal_symbol(p), -p.h)
    return s.to_classical()


def weyl_recipe_offset(p: NumberPolynomial, h: CoeffLike = 1) -> ClassicalSymbol:
    """``classical_symbol(p) - weyl_transform(p)``; constant for degree ≤ 2 in ``n``."""
    hc = as_h(h)
    w = weyl_transform(normal_order(p, hc), hc)
    return classical_symbol(p, hc) - w
