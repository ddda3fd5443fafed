"""Exact polynomial expressions in jet coordinates.

An :class:`Expr` is a finite sum of monomials in the coordinates of a
:class:`~jetnoether.jet.JetContext`.  Coefficients live in a field that is
either the rationals (no parameters declared) or the field of rational
functions in the declared parameters.  Jet coordinates never appear in a
denominator, so the sparse dictionary representation is a normal form and
equality of expressions is equality of dictionaries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import TYPE_CHECKING, Callable, Iterable, Mapping

from .errors import ContextMismatch, ParseError, PreconditionError

if TYPE_CHECKING:  # pragma: no cover
    from .jet import JetContext

Monomial = tuple  # tuple[tuple[int, int], ...] sorted by coordinate index


@dataclass(frozen=True)
class Parameter:
    name: str
    nonzero: bool = True


@dataclass(frozen=True)
class Coordinate:
    """``kind`` is ``"x"`` (independent, ``index`` = i) or ``"y"`` (dependent,
    ``index`` = j, ``multi`` = multi-index I)."""

    kind: str
    index: int
    multi: tuple = ()
    name: str = dc_field(default="", compare=False)

    @property
    def order(self) -> int:
        return sum(self.multi)

    def __str__(self):
        return self.name


# ---------------------------------------------------------------------------
# coefficient fields


class RationalField:
    """Coefficients in Q, stored as :class:`fractions.Fraction`."""

    zero = Fraction(0)
    one = Fraction(1)
    has_parameters = False

    def convert(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise TypeError(f"cannot convert {value!r} to a rational coefficient")

    def inverse(self, a):
        return 1 / a

    def is_rational(self, a) -> bool:
        return True

    def as_fraction(self, a) -> Fraction:
        return a

    def evaluate(self, a, params: Mapping[str, Fraction]) -> Fraction:
        return a

    def format(self, a) -> str:
        return str(a)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


class ParameterField:
    """Rational functions in the declared parameters over Q (sympy backend)."""

    has_parameters = True

    def __init__(self, names: Iterable[str]):
        from sympy import QQ
        from sympy.polys.fields import field

        self.names = tuple(names)
        self._QQ = QQ
        self.K, *gens = field(",".join(self.names), QQ)
        self.gens = dict(zip(self.names, gens))
        self.zero = self.K.zero
        self.one = self.K.one

    def convert(self, value):
        if isinstance(value, str):
            value = Fraction(value)
        if isinstance(value, int):
            value = Fraction(value)
        if isinstance(value, Fraction):
            return self.K(self._QQ(value.numerator, value.denominator))
        if getattr(value, "field", None) is self.K:
            return value
        raise TypeError(f"cannot convert {value!r} to a parameter coefficient")

    def param(self, name):
        return self.gens[name]

    def inverse(self, a):
        return self.one / a

    def is_rational(self, a) -> bool:
        return a.numer.is_ground and a.denom.is_ground

    def as_fraction(self, a) -> Fraction:
        if not self.is_rational(a):
            raise ValueError(f"coefficient {a} depends on parameters")
        return _poly_ground(a.numer) / _poly_ground(a.denom)

    def evaluate(self, a, params: Mapping[str, Fraction]) -> Fraction:
        missing = [n for n in self.names if n not in params]
        num = _eval_poly(a.numer, self.names, params, missing)
        den = _eval_poly(a.denom, self.names, params, missing)
        if den == 0:
            raise PreconditionError(f"coefficient {self.format(a)} has a vanishing denominator")
        return num / den

    def format(self, a) -> str:
        num = _format_poly(a.numer, self.names)
        if a.denom.is_ground and _poly_ground(a.denom) == 1:
            return num
        den = _format_poly(a.denom, self.names)
        if len(a.numer.terms()) > 1:
            num = f"({num})"
        if len(a.denom.terms()) > 1 or "*" in den or "^" in den or "/" in den:
            den = f"({den})"
        return f"{num}/{den}"

    def __eq__(self, other):
        return isinstance(other, ParameterField) and other.names == self.names

    def __hash__(self):
        return hash(("QQ", self.names))


def _q(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _poly_ground(p) -> Fraction:
    terms = p.terms()
    return _q(terms[0][1]) if terms else Fraction(0)


def _eval_poly(p, names, params, missing) -> Fraction:
    total = Fraction(0)
    for monom, c in p.terms():
        val = _q(c)
        for name, e in zip(names, monom):
            if e:
                if name in missing:
                    raise PreconditionError(f"parameter {name} is not assigned")
                val *= Fraction(params[name]) ** e
        total += val
    return total


def _format_poly(p, names) -> str:
    terms = sorted(p.terms(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
    if not terms:
        return "0"
    out = []
    for i, (monom, c) in enumerate(terms):
        c = _q(c)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, monom) if e]
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1 else f"{_fmt_frac(mag)}*" + "*".join(factors)
        else:
            body = _fmt_frac(mag)
        out.append((sign, body))
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"({q.numerator}/{q.denominator})"


# ---------------------------------------------------------------------------
# monomials


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        ia, ea = a[i]
        ib, eb = b[j]
        if ia == ib:
            out.append((ia, ea + eb))
            i += 1
            j += 1
        elif ia < ib:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial):
    """``a / b`` if ``b`` divides ``a``, else ``None``."""
    if not b:
        return a
    da = dict(a)
    for idx, e in b:
        if da.get(idx, 0) < e:
            return None
        da[idx] -= e
    return tuple((i, e) for i, e in sorted(da.items()) if e)


def mono_degree(a: Monomial) -> int:
    return sum(e for _, e in a)


# ---------------------------------------------------------------------------
# expressions


class Expr:
    """Immutable polynomial in the coordinates of ``ctx``.

    ``terms`` maps monomials to nonzero coefficients.  Construct through the
    context (``ctx.coord``, ``ctx.const``) or :func:`parse_expr`.
    """

    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: "JetContext", terms: dict):
        self.ctx = ctx
        self.terms = terms
        self._hash = None

    # construction helpers ---------------------------------------------------
    @classmethod
    def from_terms(cls, ctx, pairs) -> "Expr":
        zero = ctx.field.zero
        acc: dict = {}
        for mono, c in pairs:
            acc[mono] = acc.get(mono, zero) + c
        return cls(ctx, {m: c for m, c in acc.items() if c != 0})

    def _lift(self, other) -> "Expr":
        if isinstance(other, Expr):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                raise ContextMismatch("expressions belong to different jet contexts")
            return other
        return self.ctx.const(other)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
        return Expr(self.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Expr(self.ctx, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Expr):
            c = self.ctx.field.convert(other) if not _is_coeff(other, self.ctx) else other
            if c == 0:
                return Expr(self.ctx, {})
            return Expr(self.ctx, {m: v * c for m, v in self.terms.items()})
        other = self._lift(other)
        if not self.terms or not other.terms:
            return Expr(self.ctx, {})
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = mono_mul(ma, mb)
                v = out.get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return Expr(self.ctx, {m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = self.ctx.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c) -> "Expr":
        """Multiply by a coefficient-field element."""
        return self * c

    # comparison -------------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Expr):
            if other.ctx is not self.ctx and other.ctx != self.ctx:
                return False
            return self.terms == other.terms
        try:
            other = self.ctx.const(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((), self.ctx.field.zero)

    # structure --------------------------------------------------------------
    def indices(self) -> set:
        return {i for m in self.terms for i, _ in m}

    def coordinates(self) -> list:
        return [self.ctx.coords[i] for i in sorted(self.indices())]

    def order(self) -> int:
        co = self.ctx.coord_order
        return max((co[i] for i in self.indices()), default=0)

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=0)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda t: self.ctx.monomial_key(t[0]))

    # calculus ---------------------------------------------------------------
    def diff_index(self, idx: int) -> "Expr":
        out: dict = {}
        for m, c in self.terms.items():
            for pos, (i, e) in enumerate(m):
                if i == idx:
                    nm = m[:pos] + (((i, e - 1),) if e > 1 else ()) + m[pos + 1:]
                    v = out.get(nm)
                    cc = c * e
                    out[nm] = cc if v is None else v + cc
                    break
        return Expr(self.ctx, {m: c for m, c in out.items() if c != 0})

    def exact_div(self, other: "Expr"):
        """Exact quotient ``self / other`` or ``None`` when ``other`` does not divide."""
        other = self._lift(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero expression")
        key = self.ctx.monomial_key
        lead_m, lead_c = min(other.terms.items(), key=lambda t: key(t[0]))
        inv = self.ctx.field.inverse(lead_c)
        rem = self
        quot: list = []
        while rem.terms:
            m, c = min(rem.terms.items(), key=lambda t: key(t[0]))
            q = mono_div(m, lead_m)
            if q is None:
                return None
            t = Expr(self.ctx, {q: c * inv})
            quot.append((q, c * inv))
            rem = rem - t * other
        return Expr.from_terms(self.ctx, quot)

    # evaluation -------------------------------------------------------------
    def evaluate(self, assignment: Mapping, params: Mapping | None = None) -> Fraction:
        return evaluate(self, assignment, params or {})

    def numeric(self, params: Mapping | None = None, number: Callable = float):
        """Compile to ``f(values)`` where ``values[i]`` is the value of coordinate ``i``."""
        params = params or {}
        fld = self.ctx.field
        plan = []
        for m, c in self.terms.items():
            q = fld.evaluate(c, {k: Fraction(v) for k, v in params.items()}) if fld.has_parameters else c
            plan.append((number(q.numerator) / number(q.denominator), m))

        def f(values):
            total = 0
            for c, m in plan:
                term = c
                for i, e in m:
                    term = term * (values[i] if e == 1 else values[i] ** e)
                total = total + term
            return total

        return f

    # printing ---------------------------------------------------------------
    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return f"Expr({format_expr(self)!r})"


def _is_coeff(value, ctx) -> bool:
    if isinstance(value, Fraction):
        return not ctx.field.has_parameters
    return ctx.field.has_parameters and getattr(value, "field", None) is ctx.field.K


def format_expr(e: Expr) -> str:
    if not e.terms:
        return "0"
    fld = e.ctx.field
    coords = e.ctx.coords
    parts = []
    for mono, c in e.sorted_terms():
        factors = [coords[i].name if p == 1 else f"{coords[i].name}^{p}" for i, p in mono]
        if fld.is_rational(c):
            q = fld.as_fraction(c)
            sign = "-" if q < 0 else "+"
            mag = abs(q)
            cs = None if (mag == 1 and factors) else _fmt_frac(mag)
        else:
            txt = fld.format(c)
            if txt.startswith("-") and "+" not in txt[1:] and " - " not in txt[1:]:
                sign, txt = "-", txt[1:]
            else:
                sign = "+"
            cs = f"({txt})" if (factors and (" " in txt or "/" in txt)) else txt
        body = "*".join(([cs] if cs is not None else []) + factors)
        parts.append((sign, body))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# public operations


def partial_derivative(e: Expr, c) -> Expr:
    idx = e.ctx.index_of(c)
    return e.diff_index(idx)


def equals(a: Expr, b: Expr) -> bool:
    if a.ctx is not b.ctx and a.ctx != b.ctx:
        raise ContextMismatch("expressions belong to different jet contexts")
    return a.terms == b.terms


def evaluate(e: Expr, assignment: Mapping, params: Mapping) -> Fraction:
    ctx = e.ctx
    vals = {}
    for key, v in assignment.items():
        vals[ctx.index_of(key)] = Fraction(v)
    pvals = {(p.name if isinstance(p, Parameter) else p): Fraction(v) for p, v in params.items()}
    fld = ctx.field
    total = Fraction(0)
    for mono, c in e.terms.items():
        q = fld.evaluate(c, pvals) if fld.has_parameters else c
        for i, p in mono:
            if i not in vals:
                raise PreconditionError(f"coordinate {ctx.coords[i].name} is not assigned")
            q *= vals[i] ** p
        total += q
    return total


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<ident>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    toks = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos)
        start = m.start(m.lastgroup)
        toks.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, ctx):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2])

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        e = self.sum()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return e

    def sum(self):
        e = self.product()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            r = self.product()
            e = e + r if op == "+" else e - r
        return e

    def product(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            pos = self.peek()[2]
            r = self.unary()
            if op == "*":
                e = e * r
            else:
                if not r.is_constant():
                    raise ParseError("division by an expression containing jet coordinates", pos)
                if r.is_zero():
                    raise ParseError("division by zero", pos)
                e = e * self.ctx.field.inverse(r.constant_value())
        return e

    def unary(self):
        t = self.peek()
        if t[1] == "-":
            self.take()
            return -self.unary()
        if t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num" or int(t[1]) < 1:
                raise ParseError("exponent must be a positive integer literal", t[2])
            base = base ** int(t[1])
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return self.ctx.const(int(val))
        if kind == "ident":
            try:
                return self.ctx.symbol(val)
            except KeyError as exc:
                raise ParseError(str(exc.args[0]), pos) from None
        if val == "(":
            e = self.sum()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse_expr(text: str, ctx: "JetContext") -> Expr:
    """Parse ``text`` in the expression grammar of ``ctx`` into canonical form."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text, ctx).parse()
