"""Jet contexts, multi-indices and truncated total derivatives.

A multi-index is a plain tuple ``(I_1, ..., I_m)`` of nonnegative integers.
Multi-indices of equal order are compared lexicographically, lower orders
first; pairs ``(j, J)`` compare by ``J`` and then by ``j``.
"""
from __future__ import annotations

from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .errors import ContextMismatch, PreconditionError, TruncationError
from .expr import Coordinate, Expr, Parameter, ParameterField, RationalField, mono_mul

MultiIndex = tuple


def zero_index(m: int) -> MultiIndex:
    return (0,) * m


def unit_index(m: int, i: int) -> MultiIndex:
    return tuple(1 if s == i else 0 for s in range(m))


def raise_index(I: MultiIndex, i: int) -> MultiIndex:
    return I[:i] + (I[i] + 1,) + I[i + 1:]


def lower_index(I: MultiIndex, i: int) -> MultiIndex:
    if I[i] == 0:
        raise ValueError(f"cannot lower entry {i} of {I}")
    return I[:i] + (I[i] - 1,) + I[i + 1:]


def multi_indices(m: int, order: int) -> list:
    """All multi-indices of exactly ``order`` in increasing lexicographic order."""
    out = set()
    for combo in combinations_with_replacement(range(m), order):
        I = [0] * m
        for s in combo:
            I[s] += 1
        out.add(tuple(I))
    return sorted(out)


def multi_indices_upto(m: int, order: int) -> list:
    return [I for r in range(order + 1) for I in multi_indices(m, r)]


def index_key(I: MultiIndex) -> tuple:
    return (sum(I), I)


def lex_compare(a, b) -> int:
    """-1, 0 or 1.  Accepts two multi-indices or two ``(j, J)`` pairs."""
    if len(a) == 2 and isinstance(a[1], tuple):
        if not (len(b) == 2 and isinstance(b[1], tuple)):
            raise PreconditionError("cannot compare a pair with a multi-index")
        ka, kb = (index_key(a[1]), a[0]), (index_key(b[1]), b[0])
        if len(a[1]) != len(b[1]):
            raise PreconditionError("multi-index arity mismatch")
    else:
        if len(a) != len(b):
            raise PreconditionError("multi-index arity mismatch")
        ka, kb = index_key(tuple(a)), index_key(tuple(b))
    return (ka > kb) - (ka < kb)


class JetContext:
    """Adapted coordinates ``x^i, y^j_I`` on ``J^k`` with ``|I| <= k``.

    Coordinates are ordered by kind (independent first), then by dependent
    index ``j``, then by multi-index.
    """

    def __init__(self, independent: Sequence[str], dependent: Sequence[str], k: int,
                 parameters: Iterable = ()):
        independent = tuple(independent)
        dependent = tuple(dependent)
        params = tuple(p if isinstance(p, Parameter) else Parameter(p) for p in parameters)
        names = list(independent) + list(dependent) + [p.name for p in params]
        if not independent or not dependent:
            raise PreconditionError("need at least one independent and one dependent variable")
        if not isinstance(k, int) or k < 1:
            raise PreconditionError(f"jet order must be >= 1, got {k!r}")
        if len(set(names)) != len(names):
            raise PreconditionError(f"duplicate names in {names}")
        for n in names:
            if not n.isidentifier() or "_" in n or not n[0].isalpha():
                raise PreconditionError(f"invalid variable name {n!r}")
        self.independent = independent
        self.dependent = dependent
        self.k = k
        self.parameters = params
        self.m = len(independent)
        self.n = len(dependent)
        self.field = ParameterField([p.name for p in params]) if params else RationalField()

        coords = [Coordinate("x", i, (), name) for i, name in enumerate(independent)]
        for j, name in enumerate(dependent):
            for I in multi_indices_upto(self.m, k):
                coords.append(Coordinate("y", j, I, self._jet_name(name, I)))
        self.coords = tuple(coords)
        self._index = {c: i for i, c in enumerate(coords)}
        self._by_name = {c.name: i for i, c in enumerate(coords)}
        self.coord_order = tuple(c.order for c in coords)

    # identity -----------------------------------------------------------------
    def _key(self):
        return (self.independent, self.dependent, self.k, self.parameters)

    def __eq__(self, other):
        return isinstance(other, JetContext) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"JetContext(independent={list(self.independent)}, "
                f"dependent={list(self.dependent)}, k={self.k})")

    def with_order(self, k: int) -> "JetContext":
        return JetContext(self.independent, self.dependent, k, self.parameters)

    # naming -------------------------------------------------------------------
    def _jet_name(self, base: str, I: MultiIndex) -> str:
        if not any(I):
            return base
        return base + "_" + "".join(self.independent[s] for s in range(self.m) for _ in range(I[s]))

    def split_suffix(self, suffix: str) -> MultiIndex:
        """Multi-index spelled by ``suffix`` (independent names in any order)."""
        found = set()

        def walk(rest, counts):
            if not rest:
                found.add(tuple(counts))
                return
            for s, name in enumerate(self.independent):
                if rest.startswith(name):
                    counts[s] += 1
                    walk(rest[len(name):], counts)
                    counts[s] -= 1

        walk(suffix, [0] * self.m)
        if not found:
            raise KeyError(f"cannot read derivative suffix {suffix!r}")
        if len(found) > 1:
            raise KeyError(f"ambiguous derivative suffix {suffix!r}")
        return found.pop()

    # lookup -------------------------------------------------------------------
    def index_of(self, c) -> int:
        if isinstance(c, int):
            if not 0 <= c < len(self.coords):
                raise PreconditionError(f"coordinate index {c} out of range")
            return c
        if isinstance(c, str):
            try:
                return self._by_name[c] if c in self._by_name else self._index[self.parse_coordinate(c)]
            except KeyError:
                raise ContextMismatch(f"unknown coordinate {c!r}") from None
        if isinstance(c, Expr):
            if c.ctx != self or len(c.terms) != 1:
                raise ContextMismatch(f"{c} is not a coordinate of this context")
            (mono, coeff), = c.terms.items()
            if len(mono) != 1 or mono[0][1] != 1 or coeff != 1:
                raise ContextMismatch(f"{c} is not a coordinate")
            return mono[0][0]
        try:
            return self._index[c]
        except KeyError:
            raise ContextMismatch(f"coordinate {c} does not belong to this context") from None

    def parse_coordinate(self, name: str) -> Coordinate:
        base, _, suffix = name.partition("_")
        if base in self.independent and not suffix:
            return self.coords[self.independent.index(base)]
        if base not in self.dependent:
            raise KeyError(f"unknown identifier {name!r}")
        I = self.split_suffix(suffix) if suffix else zero_index(self.m)
        if sum(I) > self.k:
            raise KeyError(f"{name!r} exceeds the jet order k={self.k}")
        return Coordinate("y", self.dependent.index(base), I)

    def x(self, i: int) -> int:
        return i

    def y(self, j: int, I: MultiIndex | None = None) -> int:
        I = zero_index(self.m) if I is None else tuple(I)
        if sum(I) > self.k:
            raise TruncationError(f"multi-index {I} exceeds jet order {self.k}")
        return self._index[Coordinate("y", j, I)]

    def has_y(self, I: MultiIndex) -> bool:
        return sum(I) <= self.k

    # expression builders -----------------------------------------------------
    def const(self, value) -> Expr:
        c = self.field.convert(value) if not _is_field_elem(self, value) else value
        return Expr(self, {(): c} if c != 0 else {})

    def zero(self) -> Expr:
        return Expr(self, {})

    def var(self, idx: int) -> Expr:
        return Expr(self, {((idx, 1),): self.field.one})

    def coord(self, c) -> Expr:
        return self.var(self.index_of(c))

    def symbol(self, name: str) -> Expr:
        """Coordinate or parameter named ``name`` (raises ``KeyError``)."""
        if any(p.name == name for p in self.parameters):
            return Expr(self, {(): self.field.param(name)})
        if name in self._by_name:
            return self.var(self._by_name[name])
        return self.var(self._index[self.parse_coordinate(name)])

    def parse(self, text: str) -> Expr:
        from .expr import parse_expr

        return parse_expr(text, self)

    # ordering -----------------------------------------------------------------
    @cached_property
    def _rank(self):
        return {i: i for i in range(len(self.coords))}

    def monomial_key(self, mono) -> tuple:
        """Sort key: higher total degree first, then lexicographically larger
        exponents on earlier coordinates."""
        deg = sum(e for _, e in mono)
        return (-deg,) + tuple(x for i, e in mono for x in (i, -e)) + (len(self.coords),)

    # enumeration --------------------------------------------------------------
    def jet_indices(self, max_order: int | None = None, exact: int | None = None) -> list:
        out = []
        for idx, c in enumerate(self.coords):
            if c.kind != "y":
                continue
            if exact is not None and c.order != exact:
                continue
            if max_order is not None and c.order > max_order:
                continue
            out.append(idx)
        return out


def _is_field_elem(ctx, value) -> bool:
    from fractions import Fraction

    if isinstance(value, Fraction):
        return not ctx.field.has_parameters
    return ctx.field.has_parameters and getattr(value, "field", None) is ctx.field.K


def make_context(independent, dependent, k: int, parameters=()) -> JetContext:
    return JetContext(independent, dependent, k, parameters)


def check_context(*exprs) -> JetContext:
    ctx = exprs[0].ctx
    for e in exprs[1:]:
        if e.ctx is not ctx and e.ctx != ctx:
            raise ContextMismatch("expressions belong to different jet contexts")
    return ctx


# ---------------------------------------------------------------------------
# total derivatives


def _td_table(ctx: JetContext, i: int) -> dict:
    """Map coordinate index -> index of the raised coordinate (``None`` at top order)."""
    cache = ctx.__dict__.setdefault("_td_tables", {})
    if i not in cache:
        table = {}
        for idx, c in enumerate(ctx.coords):
            if c.kind == "y":
                table[idx] = ctx.y(c.index, raise_index(c.multi, i)) if c.order < ctx.k else None
        cache[i] = table
    return cache[i]


def total_derivative(e: Expr, i: int, ctx: JetContext | None = None) -> Expr:
    """Truncated total derivative ``D_i``; jet coordinates raised past ``k`` are 0."""
    if ctx is not None and e.ctx != ctx:
        raise ContextMismatch("expression does not belong to the given context")
    ctx = e.ctx
    if not 0 <= i < ctx.m:
        raise PreconditionError(f"independent index {i} out of range 0..{ctx.m - 1}")
    table = _td_table(ctx, i)
    out: dict = {}
    for mono, c in e.terms.items():
        for pos, (idx, p) in enumerate(mono):
            if idx == i:
                target = None
            elif idx in table:
                target = table[idx]
                if target is None:
                    continue
            else:
                continue
            rest = mono[:pos] + (((idx, p - 1),) if p > 1 else ()) + mono[pos + 1:]
            if target is not None:
                rest = mono_mul(rest, ((target, 1),))
            v = c * p
            prev = out.get(rest)
            out[rest] = v if prev is None else prev + v
    return Expr(ctx, {m: c for m, c in out.items() if c != 0})


def iterated_total_derivative(e: Expr, I: MultiIndex, truncate: bool = False) -> Expr:
    """``D_1^{I_1} ... D_m^{I_m} e`` (rightmost factor applied first).

    Refuses to truncate unless ``truncate`` is set: ``order(e) + |I|`` must not
    exceed the jet order.
    """
    ctx = e.ctx
    I = tuple(I)
    if len(I) != ctx.m:
        raise PreconditionError(f"multi-index {I} has wrong arity for m={ctx.m}")
    if not truncate and e.terms and e.order() + sum(I) > ctx.k:
        raise TruncationError(
            f"D^{I} of an order-{e.order()} expression needs jet order "
            f"{e.order() + sum(I)} > k={ctx.k}")
    for i in reversed(range(ctx.m)):
        for _ in range(I[i]):
            e = total_derivative(e, i)
    return e


def expr_order(e: Expr) -> int:
    return e.order()


def lift_expr(e: Expr, ctx: JetContext) -> Expr:
    """Re-express ``e`` in another context sharing its variable names."""
    if e.ctx == ctx:
        return e
    if e.ctx.independent != ctx.independent or e.ctx.dependent != ctx.dependent:
        raise ContextMismatch("contexts have different variables")
    if e.ctx.parameters != ctx.parameters:
        raise ContextMismatch("contexts have different parameters")
    mapping = {}
    for idx in e.indices():
        c = e.ctx.coords[idx]
        mapping[idx] = ctx.index_of(c)
    terms = {}
    for mono, coeff in e.terms.items():
        nm = tuple(sorted((mapping[i], p) for i, p in mono))
        terms[nm] = coeff
    return Expr(ctx, terms)
