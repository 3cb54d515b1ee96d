"""A small expression language for single-mode Hamiltonians.

Grammar (LL(1), highest precedence last)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('-' | '+') unary | power
    power  := atom (('^' | '**') INT)?
    atom   := NUMBER | IDENT | '(' expr ')'

``n`` is the number operator and ``a`` / ``adag`` the ladder operators; the two
vocabularies cannot be mixed in one expression.  ``h`` is the commutator scale
and every other identifier is a parameter.  Number literals are exact:
``0.5`` is read as ``1/2``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Mapping

from .algebra import BosonPolynomial, NumberPolynomial, as_h
from .coeff import Coeff, to_fraction
from .errors import InputError

GENERATORS_N = frozenset({"n"})
GENERATORS_A = frozenset({"a", "adag"})


@dataclass(frozen=True)
class Span:
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self):
        return f"line {self.line}, column {self.column}"


class ParseError(InputError):
    """Syntax or lowering error carrying a source span and the expected tokens."""

    def __init__(self, message: str, span: Span, expected: frozenset = frozenset()):
        self.span = span
        self.expected = frozenset(expected)
        self.line, self.column = span.line, span.column
        text = f"{span}: {message}"
        if self.expected:
            text += f" (expected {' or '.join(sorted(self.expected))})"
        super().__init__(text)


# --------------------------------------------------------------------------
# tokens

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<NUMBER>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<IDENT>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<OP>\*\*|[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER, IDENT, an operator literal, or EOF
    text: str
    span: Span


def tokenize(text: str) -> list:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", Span(line, col, line, col + 1),
                             frozenset({"NUMBER", "IDENT", "'('", "operator"}))
        s = m.group()
        start_line, start_col = line, col
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        if m.lastgroup != "ws":
            kind = m.lastgroup if m.lastgroup != "OP" else ("^" if s == "**" else s)
            tokens.append(Token(kind, s, Span(start_line, start_col, line, col)))
        pos = m.end()
    tokens.append(Token("EOF", "", Span(line, col, line, col)))
    return tokens


# --------------------------------------------------------------------------
# tree


@dataclass(frozen=True)
class Num:
    value: Fraction
    span: Span


@dataclass(frozen=True)
class Ident:
    name: str
    span: Span


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object
    span: Span


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    span: Span


@dataclass(frozen=True)
class Power:
    base: object
    exponent: int
    span: Span


@dataclass(frozen=True)
class HamiltonianExpr:
    """Parse tree plus the source text it came from."""

    root: object
    text: str

    def identifiers(self) -> set:
        out: set = set()
        _walk_idents(self.root, out)
        return out


def _walk_idents(node, out):
    if isinstance(node, Ident):
        out.add(node.name)
    elif isinstance(node, Unary):
        _walk_idents(node.operand, out)
    elif isinstance(node, Binary):
        _walk_idents(node.left, out)
        _walk_idents(node.right, out)
    elif isinstance(node, Power):
        _walk_idents(node.base, out)


def _join(a: Span, b: Span) -> Span:
    return Span(a.line, a.column, b.end_line, b.end_column)


def _exact_number(tok: Token) -> Fraction:
    v = Fraction(tok.text)
    # two independent exact readings of the literal must agree
    if v != Fraction(Decimal(tok.text)):
        raise ParseError(f"literal {tok.text} has no exact rational form", tok.span)
    return v


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected):
        t = self.tok
        got = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"unexpected {got}", t.span, frozenset(expected))

    def expr(self):
        node = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.term()
            node = Binary(op, node, rhs, _join(node.span, rhs.span))
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.advance().kind
            rhs = self.unary()
            node = Binary(op, node, rhs, _join(node.span, rhs.span))
        return node

    def unary(self):
        if self.tok.kind in ("+", "-"):
            t = self.advance()
            operand = self.unary()
            return Unary(t.kind, operand, _join(t.span, operand.span))
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "^":
            self.advance()
            t = self.tok
            if t.kind != "NUMBER" or not t.text.isdigit():
                self.fail({"INT"})
            self.advance()
            return Power(base, int(t.text), _join(base.span, t.span))
        return base

    def atom(self):
        t = self.tok
        if t.kind == "NUMBER":
            self.advance()
            return Num(_exact_number(t), t.span)
        if t.kind == "IDENT":
            self.advance()
            return Ident(t.text, t.span)
        if t.kind == "(":
            self.advance()
            node = self.expr()
            if self.tok.kind != ")":
                self.fail({"')'", "'+'", "'-'", "'*'", "'/'", "'^'"})
            close = self.advance()
            return _reparen(node, _join(t.span, close.span))
        self.fail({"NUMBER", "IDENT", "'('", "'-'", "'+'"})


def _reparen(node, span):
    # keep the node, widen its span to include the parentheses
    return type(node)(*[getattr(node, f) for f in node.__dataclass_fields__ if f != "span"], span)


def parse(text: str) -> HamiltonianExpr:
    """Parse Hamiltonian text; raises :class:`ParseError` with a span on bad input."""
    if not isinstance(text, str):
        raise TypeError("expected text")
    p = _Parser(text)
    if p.tok.kind == "EOF":
        p.fail({"NUMBER", "IDENT", "'('", "'-'", "'+'"})
    root = p.expr()
    if p.tok.kind != "EOF":
        p.fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
    return HamiltonianExpr(root, text)


# --------------------------------------------------------------------------
# lowering


def _find_ident(node, names):
    if isinstance(node, Ident):
        return node if node.name in names else None
    for child in (getattr(node, "operand", None), getattr(node, "left", None),
                  getattr(node, "right", None), getattr(node, "base", None)):
        if child is not None:
            hit = _find_ident(child, names)
            if hit is not None:
                return hit
    return None


def lower(expr: HamiltonianExpr | str, bindings: Mapping | None = None, symbolic: bool = True,
          h=None):
    """Lower a parse tree to a canonical polynomial.

    Parameters
    ----------
    expr : HamiltonianExpr or str
    bindings : mapping, optional
        Exact values for parameters (``"1/2"``, ``Fraction``, int or float).
    symbolic : bool
        Keep unbound parameters as symbols.  When false an unbound identifier
        is an error.
    h : optional
        Commutator scale of the ladder-operator algebra (``a``/``adag`` input);
        defaults to ``bindings["h"]`` or the symbol ``h``.

    Returns
    -------
    NumberPolynomial or BosonPolynomial
    """
    if isinstance(expr, str):
        expr = parse(expr)
    b = {k: Coeff.const(to_fraction(v)) if not isinstance(v, Coeff) else v
         for k, v in (bindings or {}).items()}
    for k in b:
        if k in GENERATORS_N | GENERATORS_A:
            raise InputError(f"cannot bind generator {k!r}")
    hit_n = _find_ident(expr.root, GENERATORS_N)
    hit_a = _find_ident(expr.root, GENERATORS_A)
    if hit_n is not None and hit_a is not None:
        later = hit_a if (hit_a.span.line, hit_a.span.column) > (hit_n.span.line, hit_n.span.column) else hit_n
        raise ParseError("cannot mix 'n' with 'a'/'adag' in one expression", later.span)
    if hit_a is not None:
        hval = as_h(h if h is not None else b.get("h"))
        ctx = _Ctx(b, symbolic, lambda c: BosonPolynomial.constant(c, hval),
                   {"a": BosonPolynomial.a(hval), "adag": BosonPolynomial.adag(hval)})
    else:
        ctx = _Ctx(b, symbolic, NumberPolynomial.constant, {"n": NumberPolynomial.n()})
    return ctx.eval(expr.root)


class _Ctx:
    def __init__(self, bindings, symbolic, const, gens):
        self.b, self.symbolic, self.const, self.gens = bindings, symbolic, const, gens

    def is_const(self, v):
        if isinstance(v, NumberPolynomial):
            return v.degree == 0
        return all(k == (0, 0) for k in v.terms)

    def const_of(self, v) -> Coeff:
        if isinstance(v, NumberPolynomial):
            return v.coeff(0)
        return v.terms.get((0, 0), Coeff())

    def eval(self, node):
        if isinstance(node, Num):
            return self.const(Coeff.const(node.value))
        if isinstance(node, Ident):
            if node.name in self.gens:
                return self.gens[node.name]
            if node.name in self.b:
                return self.const(self.b[node.name])
            if not self.symbolic and node.name != "h":
                raise ParseError(f"unknown identifier {node.name!r}", node.span)
            return self.const(Coeff.symbol(node.name))
        if isinstance(node, Unary):
            v = self.eval(node.operand)
            return -v if node.op == "-" else v
        if isinstance(node, Power):
            return self.eval(node.base) ** node.exponent
        if isinstance(node, Binary):
            lhs, rhs = self.eval(node.left), self.eval(node.right)
            if node.op == "+":
                return lhs + rhs
            if node.op == "-":
                return lhs - rhs
            if node.op == "*":
                return lhs * rhs
            if not self.is_const(rhs):
                raise ParseError("division by an operator expression", node.right.span)
            c = self.const_of(rhs)
            if not c.is_constant():
                raise ParseError("division by a parameter is not polynomial", node.right.span)
            if c.is_zero():
                raise ParseError("division by zero", node.right.span)
            return lhs * self.const(Coeff.const(1) / c)
        raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------
# printing


def to_text(p) -> str:
    """DSL text for a polynomial; ``lower(parse(to_text(p)))`` reproduces ``p``."""
    parts = []
    if isinstance(p, NumberPolynomial):
        for k, c in enumerate(p.coeffs):
            if c.is_zero():
                continue
            mono = "n" if k == 1 else f"n^{k}"
            parts.append(c.to_dsl() if k == 0 else f"{c.to_dsl()}*{mono}")
    elif isinstance(p, BosonPolynomial):
        for (i, j), c in sorted(p.terms.items()):
            mono = [c.to_dsl()] + ([f"adag^{i}"] if i else []) + ([f"a^{j}"] if j else [])
            parts.append("*".join(mono))
        if all(k == (0, 0) for k in p.terms):
            # a zero-weight ladder term keeps the vocabulary on re-parsing
            parts.append("0*a")
    else:
        raise TypeError("expected NumberPolynomial or BosonPolynomial")
    return " + ".join(parts) if parts else "0"
