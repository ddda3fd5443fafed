"""Jet vector fields, prolongation and the symmetry criteria."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .errors import ContextMismatch, PreconditionError
from .expr import Expr
from .forms import Form, as_form, basis, evaluate_form, exterior_derivative, interior_product
from .jet import JetContext, lift_expr, multi_indices_upto, raise_index, total_derivative
from .variational import SourceForm, is_poincare_cartan


class JetVectorField:
    """Vector field on ``J^k`` given by its component on every coordinate."""

    __slots__ = ("ctx", "components")

    def __init__(self, ctx: JetContext, components: Mapping | None = None):
        self.ctx = ctx
        self.components = {}
        for key, v in (components or {}).items():
            idx = ctx.index_of(key)
            if not isinstance(v, Expr):
                v = ctx.const(v)
            if v.ctx != ctx:
                raise ContextMismatch("component belongs to another context")
            if v.terms:
                self.components[idx] = v

    def component(self, idx) -> Expr:
        if not isinstance(idx, int):
            idx = self.ctx.index_of(idx)
        return self.components.get(idx) or self.ctx.zero()

    def _combine(self, other: "JetVectorField", sign: int) -> "JetVectorField":
        if other.ctx != self.ctx:
            raise ContextMismatch("vector fields belong to different contexts")
        out = dict(self.components)
        for idx, v in other.components.items():
            v = v if sign > 0 else -v
            out[idx] = out[idx] + v if idx in out else v
        return JetVectorField(self.ctx, out)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, c):
        if not isinstance(c, Expr):
            c = self.ctx.const(c)
        return JetVectorField(self.ctx, {i: v * c for i, v in self.components.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, JetVectorField) and other.ctx == self.ctx
                and other.components == self.components)

    def apply(self, f: Expr) -> Expr:
        """``X(f)``."""
        out = self.ctx.zero()
        for idx in f.indices():
            c = self.components.get(idx)
            if c is not None:
                out = out + c * f.diff_index(idx)
        return out

    def __str__(self):
        if not self.components:
            return "0"
        parts = []
        for idx in sorted(self.components):
            v = self.components[idx]
            txt = str(v)
            name = f"d/d{self.ctx.coords[idx].name}"
            if txt == "1":
                parts.append(name)
                continue
            txt = f"({txt})" if len(v.terms) > 1 else txt
            parts.append(f"{txt}*{name}")
        return " + ".join(parts)

    __repr__ = __str__


def partial_field(ctx: JetContext, c) -> JetVectorField:
    return JetVectorField(ctx, {ctx.index_of(c): ctx.const(1)})


def total_derivative_field(ctx: JetContext, i: int) -> JetVectorField:
    """The truncated holonomic field ``d/dx^i``."""
    comps = {i: ctx.const(1)}
    for idx, c in enumerate(ctx.coords):
        if c.kind == "y" and c.order < ctx.k:
            comps[idx] = ctx.coord(ctx.y(c.index, raise_index(c.multi, i)))
    return JetVectorField(ctx, comps)


@dataclass(frozen=True)
class Generator:
    """``(v_B^1..v_B^m, v^1..v^n)``; an optional polynomial ``denominator``
    means the actual generator is ``(v_B, v) / denominator``."""

    v_B: tuple
    v: tuple
    denominator: Expr | None = None

    @property
    def ctx(self) -> JetContext:
        return (self.v_B + self.v)[0].ctx

    def characteristic(self) -> tuple:
        """``Q^j = v^j - y^j_{1_r} v_B^r``."""
        ctx = self.ctx
        out = []
        for j in range(ctx.n):
            q = self.v[j]
            for r in range(ctx.m):
                if self.v_B[r].terms:
                    q = q - ctx.coord(ctx.y(j, _unit(ctx.m, r))) * self.v_B[r]
            out.append(q)
        return tuple(out)

    def is_zero(self) -> bool:
        return all(not c.terms for c in self.v_B + self.v)

    def cleared(self) -> "Generator":
        """Numerator generator (denominator dropped)."""
        return Generator(self.v_B, self.v)

    def lift(self, ctx: JetContext) -> "Generator":
        den = None if self.denominator is None else lift_expr(self.denominator, ctx)
        return Generator(tuple(lift_expr(e, ctx) for e in self.v_B),
                         tuple(lift_expr(e, ctx) for e in self.v), den)


def make_generator(ctx: JetContext, xi: Mapping | None = None, phi: Mapping | None = None) -> Generator:
    """Build a generator from ``{independent name: expr}`` and ``{dependent name: expr}``."""
    from .expr import parse_expr

    def conv(v):
        if isinstance(v, Expr):
            return v
        if isinstance(v, str):
            return parse_expr(v, ctx)
        return ctx.const(v)

    xi = xi or {}
    phi = phi or {}
    for name in xi:
        if name not in ctx.independent:
            raise PreconditionError(f"{name!r} is not an independent variable")
    for name in phi:
        if name not in ctx.dependent:
            raise PreconditionError(f"{name!r} is not a dependent variable")
    v_B = tuple(conv(xi.get(n, 0)) for n in ctx.independent)
    v = tuple(conv(phi.get(n, 0)) for n in ctx.dependent)
    return Generator(v_B, v)


def _unit(m, r):
    return tuple(1 if s == r else 0 for s in range(m))


def characteristic_derivatives(Q: Expr, ctx: JetContext) -> dict:
    """``{J: D^J Q}`` for ``|J| <= k`` with the truncated total derivative."""
    table = {(0,) * ctx.m: Q}
    for J in multi_indices_upto(ctx.m, ctx.k):
        if J in table:
            continue
        i = next(s for s in range(ctx.m) if J[s] > 0)
        prev = J[:i] + (J[i] - 1,) + J[i + 1:]
        table[J] = total_derivative(table[prev], i)
    return table


def prolong(g: Generator, ctx: JetContext | None = None) -> JetVectorField:
    """``X_v`` with ``v^j_J = D^J(Q^j) + y^j_{J+1_r} v_B^r`` (``y`` past order k is 0)."""
    if g.denominator is not None:
        raise PreconditionError("cannot prolong a generator with a denominator; use its numerator")
    ctx = ctx or g.ctx
    if len(g.v_B) != ctx.m or len(g.v) != ctx.n:
        raise PreconditionError("generator does not match the context dimensions")
    if g.ctx != ctx:
        g = g.lift(ctx)
    comps = {}
    for i in range(ctx.m):
        comps[i] = g.v_B[i]
    Q = g.characteristic()
    for j in range(ctx.n):
        table = characteristic_derivatives(Q[j], ctx)
        for J in multi_indices_upto(ctx.m, ctx.k):
            val = table[J]
            for r in range(ctx.m):
                if g.v_B[r].terms:
                    R = raise_index(J, r)
                    if sum(R) <= ctx.k:
                        val = val + ctx.coord(ctx.y(j, R)) * g.v_B[r]
            comps[ctx.y(j, J)] = val
    return JetVectorField(ctx, comps)


def d_symmetry_residual(X: JetVectorField, labelled: bool = False) -> list:
    """Residuals ``X^j_{I+1_i} - D_i X^j_I + y^j_{I+1_r} D_i X_B^r``."""
    ctx = X.ctx
    DB = [[total_derivative(X.component(r), i) for r in range(ctx.m)] for i in range(ctx.m)]
    out = []
    for I in multi_indices_upto(ctx.m, ctx.k - 1):
        for j in range(ctx.n):
            XI = X.component(ctx.y(j, I))
            for i in range(ctx.m):
                res = X.component(ctx.y(j, raise_index(I, i))) - total_derivative(XI, i)
                for r in range(ctx.m):
                    if DB[i][r].terms:
                        res = res + ctx.coord(ctx.y(j, raise_index(I, r))) * DB[i][r]
                out.append(((j, I, i), res) if labelled else res)
    return out


def lie_derivative_form(X: JetVectorField, a) -> Form:
    """``L_X a = i_X da + d i_X a``."""
    a = as_form(a)
    if a.degree == 0:
        f = a.terms.get((), a.ctx.zero())
        return Form.scalar(X.apply(f))
    out = interior_product(X, exterior_derivative(a))
    out = out + exterior_derivative(interior_product(X, a))
    return out


@dataclass
class SymmetryReport:
    residuals_43: list
    residuals_49: list
    residual_410: Expr
    verdict: bool = field(default=False)


def residuals_49(dia: Form) -> list:
    """Coefficients of ``d(i_X alpha)`` on ``r`` holonomic and ``m - r`` top-order
    vertical slots, ``1 <= r <= m-1``."""
    ctx = dia.ctx
    items = basis(ctx).items
    out = []
    for w, c in dia.sorted_terms():
        kinds = [items[b].kind for b in w]
        ndx = kinds.count("dx")
        if "w" in kinds:
            continue
        if 1 <= ndx <= ctx.m - 1 and kinds.count("psi") == ctx.m - ndx:
            out.append(c)
    return out


def is_weak_symmetry(X: JetVectorField, alpha: Form, beta: SourceForm,
                     check_pc: bool = True) -> SymmetryReport:
    ctx = X.ctx
    if alpha.ctx != ctx or beta.ctx != ctx:
        raise ContextMismatch("field, form and source form must share a context")
    if check_pc and not is_poincare_cartan(alpha, beta):
        raise PreconditionError("alpha is not of Poincaré–Cartan type for the given source form")
    r43 = [r for r in d_symmetry_residual(X) if r.terms]
    if r43:
        raise PreconditionError(f"vector field violates the prolongation equations ({len(r43)} residuals)")
    ia = interior_product(X, alpha) if alpha.terms else Form(ctx, ctx.m - 1, {})
    dia = exterior_derivative(ia) if ia.terms else Form(ctx, ctx.m, {})
    r49 = residuals_49(dia)
    D = [total_derivative_field(ctx, i) for i in range(ctx.m)]
    lhs = dia.terms.get(basis(ctx).volume, ctx.zero())
    rhs = evaluate_form(beta.form, [X] + D) if beta.form.terms else ctx.zero()
    r410 = lhs + rhs
    verdict = all(not r.terms for r in r49) and not r410.terms
    return SymmetryReport(r43, [r for r in r49 if r.terms], r410, verdict)
