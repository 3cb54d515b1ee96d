"""Exact coefficients: polynomials over the rationals in named parameters.

Every coefficient that appears in the operator algebra (``mu``, ``U``, the
commutator scale ``h``, ...) is a :class:`Coeff`.  Arithmetic is exact; a
float only appears when :meth:`Coeff.evaluate` is handed a float binding.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number, Rational
from typing import Iterable, Mapping, Union

Monomial = tuple  # sorted tuple of (name, power) pairs

Scalar = Union[int, Fraction]
CoeffLike = Union["Coeff", int, Fraction, float, str]


def to_fraction(x) -> Fraction:
    """Convert ``x`` to an exact :class:`Fraction`.

    Floats go through their shortest ``repr`` so ``0.1`` becomes ``1/10``; strings
    such as ``"3/4"`` or ``"-0.25"`` are parsed exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite value {x!r} has no exact form")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    powers = dict(m1)
    for name, p in m2:
        powers[name] = powers.get(name, 0) + p
    return tuple(sorted(powers.items()))


class Coeff:
    """Immutable multivariate polynomial with rational coefficients.

    >>> mu, U = Coeff.symbol("mu"), Coeff.symbol("U")
    >>> str(-(mu + U) / 2)
    '-1/2*U - 1/2*mu'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self._terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    # construction ---------------------------------------------------------
    @classmethod
    def const(cls, value) -> "Coeff":
        v = to_fraction(value)
        return cls({(): v}) if v else cls()

    @classmethod
    def symbol(cls, name: str) -> "Coeff":
        if not name.isidentifier():
            raise ValueError(f"invalid parameter name {name!r}")
        return cls({((name, 1),): Fraction(1)})

    @classmethod
    def coerce(cls, x: CoeffLike) -> "Coeff":
        if isinstance(x, Coeff):
            return x
        if isinstance(x, str):
            try:
                return cls.const(Fraction(x))
            except ValueError:
                return cls.symbol(x)
        return cls.const(x)

    # inspection -----------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} depends on {sorted(self.free_symbols)}")
        return self._terms.get((), Fraction(0))

    @property
    def free_symbols(self) -> frozenset:
        return frozenset(name for m in self._terms for name, _ in m)

    def degree_in(self, name: str) -> int:
        return max((dict(m).get(name, 0) for m in self._terms), default=0)

    def coefficient_of(self, name: str, power: int) -> "Coeff":
        """Coefficient of ``name**power`` (other symbols kept)."""
        out = {}
        for m, c in self._terms.items():
            d = dict(m)
            if d.get(name, 0) == power:
                d.pop(name, None)
                out[tuple(sorted(d.items()))] = c
        return Coeff(out)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Coeff(out)

    __radd__ = __add__

    def __neg__(self):
        return Coeff({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Coeff(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Coeff):
            if not other.is_constant():
                raise ZeroDivisionError(f"division by non-constant coefficient {other}")
            other = other.constant_value()
        d = to_fraction(other)
        if d == 0:
            raise ZeroDivisionError("division by zero")
        return Coeff({m: c / d for m, c in self._terms.items()})

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Coeff.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return False
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # substitution / evaluation --------------------------------------------
    def subs(self, bindings: Mapping[str, CoeffLike] | None = None, **kw) -> "Coeff":
        """Substitute exact values (or other coefficients) for parameters."""
        b = {**(bindings or {}), **kw}
        if not b:
            return self
        vals = {k: Coeff.coerce(v) for k, v in b.items()}
        out = Coeff()
        for m, c in self._terms.items():
            term = Coeff({(): c})
            rest = []
            for name, p in m:
                if name in vals:
                    term = term * vals[name] ** p
                else:
                    rest.append((name, p))
            out = out + term * Coeff({tuple(rest): Fraction(1)})
        return out

    def evaluate(self, bindings: Mapping[str, Number] | None = None, **kw):
        """Numeric value; exact :class:`Fraction` when every binding is rational."""
        b = {**(bindings or {}), **kw}
        missing = self.free_symbols - b.keys()
        if missing:
            raise KeyError(f"unbound parameters: {', '.join(sorted(missing))}")
        total = Fraction(0)
        for m, c in self._terms.items():
            t = c
            for name, p in m:
                t = t * b[name] ** p
            total = total + t
        return total

    def __float__(self):
        return float(self.constant_value())

    # printing -------------------------------------------------------------
    def _mono_str(self, m: Monomial) -> str:
        return "*".join(name if p == 1 else f"{name}^{p}" for name, p in m)

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (-sum(p for _, p in m), m)):
            c = self._terms[m]
            ms = self._mono_str(m)
            if not ms:
                s = str(c)
            elif c == 1:
                s = ms
            elif c == -1:
                s = "-" + ms
            else:
                s = f"{c}*{ms}"
            parts.append(s)
        out = parts[0]
        for s in parts[1:]:
            out += " - " + s[1:] if s.startswith("-") else " + " + s
        return out

    def to_dsl(self) -> str:
        """Text accepted back by :func:`cspath.dsl.parse` (fully parenthesised)."""
        if not self._terms:
            return "0"
        parts = []
        for m in sorted(self._terms, key=lambda m: (-sum(p for _, p in m), m)):
            c = self._terms[m]
            ms = self._mono_str(m)
            num = f"({c})" if c.denominator != 1 or c < 0 else str(c)
            parts.append(num if not ms else f"{num}*{ms}")
        return "(" + " + ".join(parts) + ")"

    def __repr__(self):
        return f"Coeff({str(self)!r})"


def _as_coeff(x):
    if isinstance(x, Coeff):
        return x
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        return Coeff.const(x)
    if isinstance(x, float):
        return Coeff.const(x)
    return NotImplemented


ZERO = Coeff()
ONE = Coeff.const(1)


def coeff_sum(items: Iterable[Coeff]) -> Coeff:
    out = Coeff()
    for c in items:
        out = out + c
    return out
