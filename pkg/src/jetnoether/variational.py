"""Lagrangians, source forms, Poincaré–Cartan forms and prolonged systems."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import PreconditionError, VerificationError
from .expr import Expr
from .forms import (
    Form,
    exterior_derivative,
    is_holonomic,
    omega,
    volume,
    volume_without,
    wedge,
)
from .jet import JetContext, iterated_total_derivative, multi_indices_upto


@dataclass(frozen=True)
class Lagrangian:
    L: Expr

    @property
    def ctx(self) -> JetContext:
        return self.L.ctx

    @property
    def order(self) -> int:
        return self.L.order()


def _as_lagrangian(L) -> Lagrangian:
    return L if isinstance(L, Lagrangian) else Lagrangian(L)


@dataclass(frozen=True)
class SourceForm:
    """Components ``beta_j`` of a source form.

    The associated (m+1)-form is ``(-1)^(m+1) sum_j beta_j vol ∧ w^j``, the
    orientation for which ``d(alpha) - form`` is holonomic for the
    Poincaré–Cartan form built by :func:`poincare_cartan` in every dimension.
    """

    ctx: JetContext
    components: tuple

    @property
    def order(self) -> int:
        return max((b.order() for b in self.components), default=0)

    @property
    def form(self) -> Form:
        ctx = self.ctx
        out = Form(ctx, ctx.m + 1, {})
        for j, b in enumerate(self.components):
            if b.terms:
                out = out + wedge(volume(ctx, b), omega(ctx, j))
        return out if ctx.m % 2 else -out

    def __getitem__(self, j) -> Expr:
        return self.components[j]

    def __iter__(self):
        return iter(self.components)


def euler_lagrange(L) -> SourceForm:
    """``beta_j = -sum_{|I|<=r} (-1)^|I| D_I(dL/dy^j_I)``."""
    L = _as_lagrangian(L)
    ctx = L.ctx
    r = L.order
    if ctx.k < 2 * r:
        raise PreconditionError(f"Euler–Lagrange needs k >= 2r = {2 * r}, context has k={ctx.k}")
    comps = []
    for j in range(ctx.n):
        acc = ctx.zero()
        for I in multi_indices_upto(ctx.m, r):
            dL = L.L.diff_index(ctx.y(j, I))
            if not dL.terms:
                continue
            t = iterated_total_derivative(dL, I)
            acc = acc + t if sum(I) % 2 else acc - t
        comps.append(acc)
    return SourceForm(ctx, tuple(comps))


def poincare_cartan(L) -> Form:
    """``alpha = L vol + sum_{j,h} dL/dy^j_h  w^j ∧ i_{d/dx^h} vol`` for first-order L."""
    L = _as_lagrangian(L)
    ctx = L.ctx
    if L.order > 1:
        raise PreconditionError("Poincaré–Cartan forms are only built for first-order Lagrangians")
    if ctx.k < 2:
        raise PreconditionError("Poincaré–Cartan construction needs k >= 2")
    alpha = volume(ctx, L.L)
    for j in range(ctx.n):
        for h in range(ctx.m):
            p = L.L.diff_index(ctx.y(j, tuple(1 if s == h else 0 for s in range(ctx.m))))
            if not p.terms:
                continue
            # i_{d/dx^h} vol = (-1)^h vol_h  (0-based h)
            contracted = volume_without(ctx, h, p if h % 2 == 0 else -p)
            alpha = alpha + wedge(omega(ctx, j), contracted)
    beta = euler_lagrange(L)
    if not is_poincare_cartan(alpha, beta):
        raise VerificationError("constructed form is not of Poincaré–Cartan type",
                                {"poincare_cartan": False})
    return alpha


def is_poincare_cartan(alpha: Form, beta: SourceForm) -> bool:
    ctx = beta.ctx
    if alpha.terms and alpha.degree != ctx.m:
        raise PreconditionError(f"expected an {ctx.m}-form, got degree {alpha.degree}")
    da = exterior_derivative(alpha) if alpha.terms else Form(ctx, ctx.m + 1, {})
    return is_holonomic(da - beta.form)


# ---------------------------------------------------------------------------
# prolonged systems


@dataclass(frozen=True)
class ProlongedSystem:
    source: SourceForm
    k_prime: int
    generators: tuple  # ((j, I, Expr), ...)

    @property
    def ctx(self) -> JetContext:
        return self.source.ctx

    @property
    def k_beta(self) -> int:
        return self.source.order

    def expressions(self) -> list:
        return [g for _, _, g in self.generators]

    def lookup(self) -> dict:
        return {(j, I): g for j, I, g in self.generators}


def prolonged_system(beta: SourceForm, k_prime: int) -> ProlongedSystem:
    """All ``D^I beta_j`` with ``|I| <= k' - k_beta``, ordered by ``(I, j)``."""
    ctx = beta.ctx
    kb = beta.order
    if k_prime < kb:
        raise PreconditionError(f"prolongation order k'={k_prime} below source order {kb}")
    if k_prime > ctx.k:
        raise PreconditionError(f"prolongation order k'={k_prime} exceeds jet order {ctx.k}")
    gens = []
    for I in multi_indices_upto(ctx.m, k_prime - kb):
        for j, b in enumerate(beta.components):
            gens.append((j, I, iterated_total_derivative(b, I)))
    return ProlongedSystem(beta, k_prime, tuple(gens))


# ---------------------------------------------------------------------------
# regularity probe


@dataclass
class RankPoint:
    rank: int
    residual: float
    full: bool


@dataclass
class RankReport:
    expected: int
    points: list = field(default_factory=list)
    tolerance: float = 1e-9

    @property
    def verdict(self) -> bool:
        """``True`` means submersion evidence at every sample."""
        return bool(self.points) and all(p.full for p in self.points)


def _numeric_system(sys: ProlongedSystem, params: Mapping | None):
    ctx = sys.ctx
    funcs = [g.numeric(params) for g in sys.expressions()]
    grads = [[g.diff_index(c).numeric(params) for c in range(len(ctx.coords))]
             for g in sys.expressions()]
    return funcs, grads


def _to_vector(ctx: JetContext, sample) -> np.ndarray:
    if isinstance(sample, np.ndarray):
        return sample.astype(float)
    vec = np.zeros(len(ctx.coords))
    for key, v in sample.items():
        vec[ctx.index_of(key)] = float(v)
    return vec


def regularity_probe(sys: ProlongedSystem, samples: Sequence, params: Mapping | None = None,
                     rank_tol: float = 1e-9, residual_tol: float = 1e-8) -> RankReport:
    """Numeric Jacobian rank of the prolonged system at each sample point.

    Samples are assignments ``{coordinate: value}`` (missing coordinates are 0)
    or dense vectors indexed like ``ctx.coords``.
    """
    if not samples:
        raise PreconditionError("regularity probe needs at least one sample")
    ctx = sys.ctx
    funcs, grads = _numeric_system(sys, params)
    N = len(funcs)
    report = RankReport(expected=N, tolerance=rank_tol)
    for sample in samples:
        vec = _to_vector(ctx, sample)
        res = max((abs(f(vec)) for f in funcs), default=0.0)
        if res > residual_tol:
            raise PreconditionError(f"sample is not on the zero set (residual {res:.3e})")
        jac = np.array([[g(vec) for g in row] for row in grads], dtype=float).reshape(N, len(ctx.coords))
        if N == 0:
            rank = 0
        else:
            sv = np.linalg.svd(jac, compute_uv=False)
            rank = int(np.sum(sv > rank_tol * sv[0])) if sv.size and sv[0] > 0 else 0
        report.points.append(RankPoint(rank, float(res), rank == N))
    return report


def sample_zero_set(sys: ProlongedSystem, count: int, seed: int = 0, params: Mapping | None = None,
                    scale: float = 1.0, iterations: int = 50) -> list:
    """Random points projected onto the zero set by Newton steps (least-squares)."""
    ctx = sys.ctx
    funcs, grads = _numeric_system(sys, params)
    rng = np.random.default_rng(seed)
    out = []
    attempts = 0
    while len(out) < count and attempts < 20 * count:
        attempts += 1
        vec = rng.uniform(-scale, scale, len(ctx.coords))
        for _ in range(iterations):
            F = np.array([f(vec) for f in funcs], dtype=float)
            if np.max(np.abs(F), initial=0.0) < 1e-13:
                break
            J = np.array([[g(vec) for g in row] for row in grads], dtype=float)
            vec = vec - np.linalg.pinv(J) @ F
        F = np.array([f(vec) for f in funcs], dtype=float)
        if np.max(np.abs(F), initial=0.0) < 1e-10:
            out.append(vec)
    if len(out) < count:
        raise PreconditionError("could not project random samples onto the zero set")
    return out
