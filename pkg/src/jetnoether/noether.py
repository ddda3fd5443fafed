"""Conserved currents, conservation certificates and both Noether maps."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    ContextMismatch,
    PreconditionError,
    SolverBoundsExhausted,
    TruncationError,
    VerificationError,
)
from .expr import Expr, parse_expr
from .forms import (
    Form,
    basis,
    interior_product,
    lagrangian_part,
    volume_without,
)
from .jet import JetContext, index_key, lift_expr, lower_index, total_derivative
from .solver import SolverBounds, find_multipliers
from .symmetry import (
    Generator,
    JetVectorField,
    characteristic_derivatives,
    is_weak_symmetry,
    partial_field,
    prolong,
    total_derivative_field,
)
from .variational import ProlongedSystem, SourceForm, euler_lagrange, is_poincare_cartan, prolonged_system


@dataclass(frozen=True)
class Current:
    """Components ``P^1..P^m``; the associated (m-1)-form is
    ``sum_i (-1)^(i-1) P^i dx^1 ∧ .. (omit i) .. ∧ dx^m``."""

    components: tuple

    @property
    def ctx(self) -> JetContext:
        return self.components[0].ctx

    @property
    def order(self) -> int:
        return max(p.order() for p in self.components)

    def is_zero(self) -> bool:
        return all(not p.terms for p in self.components)

    @property
    def form(self) -> Form:
        ctx = self.ctx
        out = Form(ctx, ctx.m - 1, {})
        for i, p in enumerate(self.components):
            if p.terms:
                out = out + volume_without(ctx, i, p if i % 2 == 0 else -p)
        return out

    def __add__(self, other: "Current") -> "Current":
        return Current(tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other: "Current") -> "Current":
        return Current(tuple(a - b for a, b in zip(self.components, other.components)))

    def scale(self, c) -> "Current":
        return Current(tuple(p * c for p in self.components))

    def lift(self, ctx: JetContext) -> "Current":
        return Current(tuple(lift_expr(p, ctx) for p in self.components))

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.components) + ")"


def zero_current(ctx: JetContext) -> Current:
    return Current(tuple(ctx.zero() for _ in range(ctx.m)))


def make_current(ctx: JetContext, components: Sequence) -> Current:
    if len(components) != ctx.m:
        raise PreconditionError(f"a current needs {ctx.m} components, got {len(components)}")
    return Current(tuple(parse_expr(c, ctx) if isinstance(c, str) else c for c in components))


def current_part(eta: Form) -> tuple:
    """Split an (m-1)-form into its current and the non-holonomic rest.

    Returns ``(Current, rest)`` where ``rest`` collects terms that are neither
    volume-type nor holonomic on their own (zero for well-formed inputs).
    """
    ctx = eta.ctx
    m = ctx.m
    comps = [ctx.zero() for _ in range(m)]
    rest = {}
    if m == 1:
        comps[0] = eta.terms.get((), ctx.zero()) if eta.degree == 0 else ctx.zero()
        return Current(tuple(comps)), Form(ctx, 0, {})
    items = basis(ctx).items
    for w, c in eta.terms.items():
        if all(items[b].kind == "dx" for b in w):
            missing = [i for i in range(m) if i not in w][0]
            comps[missing] = c if missing % 2 == 0 else -c
        elif not any(items[b].kind == "w" for b in w):
            rest[w] = c
    return Current(tuple(comps)), Form(ctx, eta.degree, rest)


def _checked_D(e: Expr, i: int) -> Expr:
    if e.terms and e.order() + 1 > e.ctx.k:
        raise TruncationError(f"total derivative of an order-{e.order()} expression overflows k={e.ctx.k}")
    return total_derivative(e, i)


def divergence(P: Current) -> Expr:
    ctx = P.ctx
    out = ctx.zero()
    for i, p in enumerate(P.components):
        out = out + _checked_D(p, i)
    return out


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Certificate:
    """``Div P = sum Q_(j,I) D^I beta_j``; ``multipliers`` lists nonzero ``(j, I, Q)``."""

    multipliers: tuple
    residual: Expr

    @property
    def valid(self) -> bool:
        return not self.residual.terms

    def multiplier(self, j: int, I: tuple) -> Expr | None:
        for jj, II, q in self.multipliers:
            if jj == j and II == tuple(I):
                return q
        return None

    def to_json(self) -> dict:
        return {
            "multipliers": [{"j": j, "I": list(I), "Q": str(q)} for j, I, q in self.multipliers],
            "residual": str(self.residual),
        }

    @classmethod
    def from_json(cls, data: dict, ctx: JetContext) -> "Certificate":
        mults = tuple((int(d["j"]), tuple(d["I"]), parse_expr(d["Q"], ctx)) for d in data["multipliers"])
        return cls(mults, parse_expr(data.get("residual", "0"), ctx))


def certificate_residual(target: Expr, multipliers, sys: ProlongedSystem) -> Expr:
    table = sys.lookup()
    out = target
    for j, I, q in multipliers:
        if (j, tuple(I)) not in table:
            raise PreconditionError(f"multiplier index ({j}, {I}) is not in the prolonged system")
        out = out - q * table[(j, tuple(I))]
    return out


def recheck_certificate(cert: Certificate, P: Current, sys: ProlongedSystem) -> Certificate:
    """Recompute the residual of ``cert`` from scratch."""
    return Certificate(cert.multipliers, certificate_residual(divergence(P), cert.multipliers, sys))


def _default_bounds(sys: ProlongedSystem, bounds: SolverBounds | None) -> SolverBounds:
    if bounds is None:
        return SolverBounds(order=sys.k_prime)
    if bounds.order is None:
        return SolverBounds(bounds.degree, sys.k_prime, bounds.max_unknowns)
    return bounds


def decompose(target: Expr, sys: ProlongedSystem, bounds: SolverBounds | None = None) -> Certificate:
    """Certificate for ``target`` as a combination of the prolonged system."""
    bounds = _default_bounds(sys, bounds)
    gens = sys.generators
    sol = find_multipliers(target, [g for _, _, g in gens], bounds)
    mults = tuple((j, I, q) for (j, I, _), q in zip(gens, sol) if q.terms)
    residual = certificate_residual(target, mults, sys)
    if residual.terms:
        raise VerificationError("solver returned multipliers with a nonzero residual",
                                {"residual_zero": False})
    return Certificate(mults, residual)


def verify_conservation(P: Current, sys: ProlongedSystem, bounds: SolverBounds | None = None) -> Certificate:
    if P.ctx != sys.ctx:
        raise ContextMismatch("current and prolonged system belong to different contexts")
    return decompose(divergence(P), sys, bounds)


# ---------------------------------------------------------------------------
# forward map


def forward_noether(X: JetVectorField, alpha: Form, beta: SourceForm | None = None,
                    check: bool = True) -> Current:
    """Current of ``i_X alpha`` with holonomic terms discarded."""
    ctx = X.ctx
    if beta is None:
        beta = euler_lagrange(lagrangian_part(alpha))
    if check:
        rep = is_weak_symmetry(X, alpha, beta)
        if not rep.verdict:
            raise PreconditionError("vector field is not a weak symmetry of the given form")
    eta = interior_product(X, alpha) if alpha.terms else Form(ctx, ctx.m - 1, {})
    P, rest = current_part(eta)
    if rest.terms:
        raise VerificationError("contraction has non-holonomic terms outside the current",
                                {"current_part": False})
    return P


def characteristic_certificate(g: Generator, P: Current, sys: ProlongedSystem) -> Certificate:
    """Certificate ``Div P = sum_j Q^j beta_j`` from the characteristic of ``g``,
    falling back to the solver if that identity fails."""
    Q = g.characteristic()
    mults = tuple((j, (0,) * sys.ctx.m, q) for j, q in enumerate(Q) if q.terms)
    res = certificate_residual(divergence(P), mults, sys)
    if not res.terms:
        return Certificate(mults, res)
    return verify_conservation(P, sys)


# ---------------------------------------------------------------------------
# triviality


class Triviality(str, enum.Enum):
    FIRST_KIND = "first_kind"
    SECOND_KIND = "second_kind"
    NONTRIVIAL = "nontrivial"
    UNDETERMINED = "undetermined"


@dataclass
class Classification:
    kind: Triviality
    certificate: Certificate | None = None
    component_certificates: list | None = None
    note: str = ""


def classify_trivial(P: Current, sys: ProlongedSystem, bounds: SolverBounds | None = None) -> Classification:
    if not divergence(P).terms:
        return Classification(Triviality.SECOND_KIND)
    try:
        cert = verify_conservation(P, sys, bounds)
    except SolverBoundsExhausted as exc:
        return Classification(Triviality.UNDETERMINED, note=str(exc))
    comps = []
    try:
        for p in P.components:
            comps.append(decompose(p, sys, bounds))
    except SolverBoundsExhausted as exc:
        return Classification(Triviality.NONTRIVIAL, cert, note=str(exc))
    return Classification(Triviality.FIRST_KIND, cert, comps)


# ---------------------------------------------------------------------------
# inverse map


def form_order(a: Form) -> int:
    """Smallest r such that ``a`` is a pullback from ``J^r``."""
    items = basis(a.ctx).items
    out = 0
    for w, c in a.terms.items():
        out = max(out, c.order())
        for b in w:
            it = items[b]
            if it.kind == "w":
                out = max(out, sum(it.multi) + 1)
            elif it.kind == "psi":
                out = max(out, sum(it.multi))
    return out


@dataclass
class InverseResult:
    generator: Generator
    trivial_part: Current
    certificate: Certificate
    initial_certificate: Certificate
    trivial_certificates: list
    verification: dict = field(default_factory=dict)


def contraction_coefficients(alpha: Form) -> dict:
    """``{(j, J): current of i_{d/dy^j_J} alpha}`` for the nonzero contractions."""
    ctx = alpha.ctx
    out = {}
    for idx, c in enumerate(ctx.coords):
        if c.kind != "y":
            continue
        C, _ = current_part(interior_product(partial_field(ctx, idx), alpha))
        if not C.is_zero():
            out[(c.index, c.multi)] = C
    return out


def _explicit_field(v_B: Sequence[Expr], Q: Sequence[Expr], den: Expr) -> JetVectorField:
    """``sum v_B^i d/dx^i + den * sum D^J(Q^j) d/dy^j_J`` (the prolongation scaled by ``den``
    when ``v_B`` already carries the factor)."""
    ctx = den.ctx
    X = JetVectorField(ctx, {})
    for i, vb in enumerate(v_B):
        if vb.terms:
            X = X + total_derivative_field(ctx, i) * vb
    comps = {}
    for j, q in enumerate(Q):
        for J, d in characteristic_derivatives(q, ctx).items():
            if d.terms:
                comps[ctx.y(j, J)] = d * den
    return X + JetVectorField(ctx, comps)


def inverse_noether(P: Current, alpha: Form, beta: SourceForm, k_o: int,
                    bounds: SolverBounds | None = None) -> InverseResult:
    """Reconstruct a symmetry generator whose current is ``P`` up to a trivial part."""
    ctx = P.ctx
    if alpha.ctx != ctx or beta.ctx != ctx:
        raise ContextMismatch("current, form and source form must share a context")
    k_beta = beta.order
    if k_o > ctx.k // 2 - 1:
        raise PreconditionError(f"need k_o <= floor(k/2) - 1 = {ctx.k // 2 - 1}, got k_o={k_o}")
    if k_o < k_beta:
        raise PreconditionError(f"k_o={k_o} is below the source order {k_beta}")
    if not P.is_zero() and P.order > k_o - 1:
        raise PreconditionError(f"current has order {P.order} > k_o - 1 = {k_o - 1}")
    if form_order(alpha) > k_o - 1:
        raise PreconditionError(f"form has order {form_order(alpha)} > k_o - 1 = {k_o - 1}")
    alpha0 = lagrangian_part(alpha)
    if not alpha0.terms:
        raise PreconditionError("the Lagrangian part of alpha vanishes identically")
    if not is_poincare_cartan(alpha, beta):
        raise PreconditionError("alpha is not of Poincaré–Cartan type for the given source form")

    sys = prolonged_system(beta, k_o)
    bounds = bounds or SolverBounds(order=k_o)
    if bounds.order is None:
        bounds = SolverBounds(bounds.degree, k_o, bounds.max_unknowns)
    g = divergence(P)
    cert0 = decompose(g, sys, bounds)

    # peel the top-order multipliers into a first-kind trivial current
    vhat = {(j, I): q for j, I, q in cert0.multipliers}
    z = [ctx.zero() for _ in range(ctx.m)]
    z_parts: list = [[] for _ in range(ctx.m)]
    table = sys.lookup()
    for level in range(k_o - k_beta, 0, -1):
        keys = sorted((key for key in vhat if sum(key[1]) == level), key=lambda t: (index_key(t[1]), t[0]))
        for j, I in keys:
            q = vhat.pop((j, I))
            if not q.terms:
                continue
            i = next(s for s in range(ctx.m) if I[s] > 0)
            lower = lower_index(I, i)
            z[i] = z[i] + q * table[(j, lower)]
            z_parts[i].append((j, lower, q))
            prev = vhat.get((j, lower), ctx.zero())
            vhat[(j, lower)] = prev - _checked_D(q, i)
    zero_I = (0,) * ctx.m
    Q = tuple(vhat.get((j, zero_I), ctx.zero()) for j in range(ctx.n))
    zc = Current(tuple(z))
    Pz = P - zc

    # generator assembly: P - z = alpha0 v_B + sum D^J(Q^j) C_{j,J}
    C = contraction_coefficients(alpha)
    numer = list(Pz.components)
    for (j, J), Cj in C.items():
        if not Q[j].terms:
            continue
        if Q[j].order() + sum(J) > ctx.k:
            raise TruncationError("characteristic derivatives overflow the jet order")
        DJ = characteristic_derivatives(Q[j], ctx)[J]
        for h in range(ctx.m):
            if Cj.components[h].terms:
                numer[h] = numer[h] - DJ * Cj.components[h]
    quotients = [n.exact_div(alpha0) for n in numer]
    if all(q is not None for q in quotients):
        den = ctx.const(1)
        v_B = tuple(quotients)
        denominator = None
    else:
        den = alpha0
        v_B = tuple(numer)
        denominator = alpha0
    v = []
    for j in range(ctx.n):
        vj = Q[j] * den
        for r in range(ctx.m):
            if v_B[r].terms:
                vj = vj + ctx.coord(ctx.y(j, tuple(1 if s == r else 0 for s in range(ctx.m)))) * v_B[r]
        v.append(vj)
    gen = Generator(v_B, tuple(v), denominator)

    # verification
    flags = {}
    X = prolong(gen) if denominator is None else _explicit_field(v_B, Q, den)
    eta, rest = current_part(interior_product(X, alpha))
    flags["contraction_matches"] = (eta.components == Pz.scale(den).components) and not rest.terms
    final_mults = tuple((j, zero_I, q) for j, q in enumerate(Q) if q.terms)
    final_res = certificate_residual(divergence(Pz), final_mults, sys)
    flags["divergence_identity"] = not final_res.terms
    triv = []
    ok = True
    for h in range(ctx.m):
        res = certificate_residual(z[h], z_parts[h], sys)
        triv.append(Certificate(tuple(z_parts[h]), res))
        ok = ok and not res.terms
    flags["trivial_part_first_kind"] = ok
    if denominator is None:
        flags["weak_symmetry"] = is_weak_symmetry(X, alpha, beta, check_pc=False).verdict
    if not all(flags.values()):
        raise VerificationError("inverse Noether verification failed", flags)
    return InverseResult(gen, zc, Certificate(final_mults, final_res), cert0, triv, flags)


@dataclass
class LiftedInverse:
    result: InverseResult
    context: JetContext
    alpha: Form
    beta: SourceForm
    k_o: int


def inverse_noether_for_lagrangian(L, P: Current, k_o: int | None = None,
                                   bounds: SolverBounds | None = None) -> LiftedInverse:
    """Run :func:`inverse_noether` for a first-order Lagrangian on a jet space deep
    enough for ``k_o`` (``k >= 2 k_o + 2``); ``k_o`` defaults to
    ``max(k_beta, order(P) + 1)``."""
    from .forms import lift_form
    from .variational import Lagrangian, poincare_cartan

    L = L if isinstance(L, Lagrangian) else Lagrangian(L)
    beta0 = euler_lagrange(L)
    if k_o is None:
        k_o = max(beta0.order, P.order + 1)
    ctx = L.ctx.with_order(max(L.ctx.k, 2 * k_o + 2))
    alpha = lift_form(poincare_cartan(L), ctx)
    beta = euler_lagrange(Lagrangian(lift_expr(L.L, ctx)))
    res = inverse_noether(P.lift(ctx), alpha, beta, k_o, bounds)
    return LiftedInverse(res, ctx, alpha, beta, k_o)
