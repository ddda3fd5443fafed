"""Numeric cross-checks of conservation along integrated solutions."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import mpmath
import numpy as np

from .errors import PreconditionError
from .expr import Expr
from .jet import JetContext
from .variational import SourceForm


@dataclass
class DriftEntry:
    name: str
    value: float
    tolerance: float

    @property
    def ok(self) -> bool:
        return self.value <= self.tolerance


@dataclass
class DriftReport:
    kind: str
    step: float
    scheme: str
    order: int
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "step": self.step,
            "scheme": self.scheme,
            "order": self.order,
            "currents": [{"name": e.name, "drift": e.value, "tolerance": e.tolerance, "ok": e.ok}
                         for e in self.entries],
        }


# ---------------------------------------------------------------------------
# m = 1: fixed-step RK4


class FirstOrderSystem:
    """EL equations of an ODE model solved for the top derivatives.

    State layout: ``y^j_{(p)}`` for ``p < s`` with ``s`` the source order,
    stored ``[j * s + p]``.
    """

    def __init__(self, beta: SourceForm, params: Mapping | None = None):
        ctx = beta.ctx
        if ctx.m != 1:
            raise PreconditionError("ODE integration needs exactly one independent variable")
        s = beta.order
        if s < 1:
            raise PreconditionError("source form has no derivatives to integrate")
        self.ctx, self.s, self.n = ctx, s, ctx.n
        top = [ctx.y(j, (s,)) for j in range(ctx.n)]
        M = []
        for b in beta.components:
            row = []
            for t in top:
                c = b.diff_index(t)
                if not c.is_constant():
                    raise PreconditionError("top-derivative coefficient is not constant")
                row.append(c.constant_value())
            M.append(row)
        fld = ctx.field
        pv = {k: Fraction(v) for k, v in (params or {}).items()}
        Mq = [[fld.evaluate(c, pv) if fld.has_parameters else c for c in row] for row in M]
        self.Minv = _invert(Mq)
        self.top = top


def _invert(M):
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise PreconditionError("top-derivative coefficient matrix is singular")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def _rk4_step(f, x, y, h):
    k1 = f(x, y)
    k2 = f(x + h / 2, [a + h / 2 * b for a, b in zip(y, k1)])
    k3 = f(x + h / 2, [a + h / 2 * b for a, b in zip(y, k2)])
    k4 = f(x + h, [a + h * b for a, b in zip(y, k3)])
    return [a + h / 6 * (b + 2 * c + 2 * d + e) for a, b, c, d, e in zip(y, k1, k2, k3, k4)]


def rk4_drift(beta: SourceForm, currents: Mapping, initial: Mapping, h: float, t_end: float,
              params: Mapping | None = None, precision: int | None = None) -> dict:
    """Max ``|P(t) - P(0)|`` per current along an RK4 trajectory.

    ``precision`` (decimal digits) switches to mpmath arithmetic so that drift
    far below double-precision round-off can be measured.
    """
    if precision is None:
        return _rk4_drift(beta, currents, initial, h, t_end, params, float)
    with mpmath.workdps(precision):
        return _rk4_drift(beta, currents, initial, h, t_end, params, mpmath.mpf)


def _rk4_drift(beta, currents, initial, h, t_end, params, number) -> dict:
    system = FirstOrderSystem(beta, params)
    ctx = system.ctx

    def conv(v):
        q = Fraction(v).limit_denominator(10 ** 12) if isinstance(v, float) else Fraction(v)
        return number(q.numerator) / number(q.denominator)

    def fconv(q):
        return number(q.numerator) / number(q.denominator)

    evals = {name: _compile(P.components[0], params, fconv) for name, P in currents.items()}
    for P in currents.values():
        if P.ctx != ctx:
            raise PreconditionError("current belongs to another context")
    state = []
    for j, name in enumerate(ctx.dependent):
        for p in range(system.s):
            key = ctx.coords[ctx.y(j, (p,))].name
            state.append(conv(initial.get(key, 0)))
    rest = [_compile(r, params, fconv) for r in _rest_exprs(system, beta)]
    minv = [[fconv(c) for c in row] for row in system.Minv]

    def rhs(x, y):
        vals = _state_coords(system, x, y, number)
        r = [g(vals) for g in rest]
        out = []
        for j in range(system.n):
            for p in range(system.s):
                out.append(y[j * system.s + p + 1] if p + 1 < system.s
                           else -sum(minv[j][b] * r[b] for b in range(system.n)))
        return out

    def coords(x, y):
        vals = _state_coords(system, x, y, number)
        if system.s <= ctx.k:
            d = rhs(x, y)
            for j in range(system.n):
                vals[ctx.y(j, (system.s,))] = d[j * system.s + system.s - 1]
        return vals

    steps = int(round(t_end / h))
    hh = conv(h) if number is not float else float(h)
    x = number(0)
    vals = coords(x, state)
    P0 = {name: f(vals) for name, f in evals.items()}
    drift = {name: 0.0 for name in evals}
    for _ in range(steps):
        state = _rk4_step(rhs, x, state, hh)
        x = x + hh
        if any(not math.isfinite(float(v)) for v in state):
            raise PreconditionError("integration became unstable (non-finite state)")
        vals = coords(x, state)
        for name, f in evals.items():
            d = abs(f(vals) - P0[name])
            if d > drift[name]:
                drift[name] = d
    return {name: float(v) for name, v in drift.items()}


def _rest_exprs(system: FirstOrderSystem, beta: SourceForm) -> list:
    ctx = system.ctx
    out = []
    for b in beta.components:
        r = b
        for t in system.top:
            r = r - ctx.coord(t) * b.diff_index(t)
        out.append(r)
    return out


def _state_coords(system: FirstOrderSystem, x, state, number) -> list:
    ctx = system.ctx
    vals = [number(0)] * len(ctx.coords)
    vals[0] = x
    for j in range(system.n):
        for p in range(system.s):
            vals[ctx.y(j, (p,))] = state[j * system.s + p]
    return vals


def _compile(e: Expr, params: Mapping | None, conv: Callable):
    fld = e.ctx.field
    pv = {k: Fraction(v) for k, v in (params or {}).items()}
    plan = []
    for mono, c in e.terms.items():
        q = fld.evaluate(c, pv) if fld.has_parameters else c
        plan.append((conv(q), mono))

    def f(vals):
        total = 0
        for c, mono in plan:
            t = c
            for i, p in mono:
                t = t * vals[i] ** p
            total = total + t
        return total

    return f


# ---------------------------------------------------------------------------
# m = 2: leapfrog for the wave family


def _wave_coefficients(beta: SourceForm):
    """``beta = a u_tt + b u_xx + e u`` with rational constants; returns (a, b, e)."""
    ctx = beta.ctx
    if ctx.m != 2 or ctx.n != 1:
        raise PreconditionError("the grid check supports one field in two variables")
    b0 = beta.components[0]
    allowed = {ctx.y(0, (2, 0)): "tt", ctx.y(0, (0, 2)): "xx", ctx.y(0, (0, 0)): "u"}
    coeffs = {"tt": Fraction(0), "xx": Fraction(0), "u": Fraction(0)}
    for mono, c in b0.terms.items():
        if len(mono) != 1 or mono[0][1] != 1 or mono[0][0] not in allowed:
            raise PreconditionError("source form is not in the linear wave family")
        coeffs[allowed[mono[0][0]]] = ctx.field.as_fraction(c)
    if coeffs["tt"] == 0:
        raise PreconditionError("source form does not contain the second time derivative")
    return coeffs["tt"], coeffs["xx"], coeffs["u"]


def leapfrog_divergence(beta: SourceForm, currents: Mapping, grid: int = 256, cfl: float = 0.5,
                        t_end: float = 1.0, mode: int = 1) -> dict:
    """Max centered-difference divergence of each current along a leapfrog run.

    Periodic domain ``[0, 2π)``; initial data are two exact levels of the
    travelling wave ``sin(mode (x - c t))``.
    """
    a, b, e = _wave_coefficients(beta)
    if e != 0:
        raise PreconditionError("only the massless wave equation has the travelling-wave initial data")
    c2 = float(-b / a)
    if c2 <= 0:
        raise PreconditionError("source form is not hyperbolic")
    speed = math.sqrt(c2)
    ctx = beta.ctx
    dx = 2 * math.pi / grid
    dt = cfl * dx / speed
    steps = max(int(round(t_end / dt)), 3)
    xs = np.arange(grid) * dx
    levels = [np.sin(mode * (xs - speed * (n - 1) * dt)) for n in range(2)]  # t = -dt, 0
    r2 = c2 * (dt / dx) ** 2
    for _ in range(steps + 1):
        u, v = levels[-2], levels[-1]
        levels.append(2 * v - u + r2 * (np.roll(v, -1) - 2 * v + np.roll(v, 1)))
        if not np.all(np.isfinite(levels[-1])):
            raise PreconditionError("leapfrog run became unstable")
    U = np.array(levels)  # U[n] is the level at time (n - 1) dt
    ut = (U[2:] - U[:-2]) / (2 * dt)  # at levels 1..N-2
    ux = (np.roll(U, -1, axis=1) - np.roll(U, 1, axis=1))[1:-1] / (2 * dx)
    utt = (U[2:] - 2 * U[1:-1] + U[:-2]) / dt ** 2
    uxx = (np.roll(U, -1, axis=1) - 2 * U + np.roll(U, 1, axis=1))[1:-1] / dx ** 2
    uu = U[1:-1]
    arrays = {ctx.y(0, (0, 0)): uu, ctx.y(0, (1, 0)): ut, ctx.y(0, (0, 1)): ux,
              ctx.y(0, (2, 0)): utt, ctx.y(0, (0, 2)): uxx}
    out = {}
    for name, P in currents.items():
        comps = []
        for p in P.components:
            for idx in p.indices():
                if idx not in arrays:
                    raise PreconditionError(f"current {name!r} uses {ctx.coords[idx].name}, not sampled on the grid")
            comps.append(p.numeric(number=float)(_Lookup(arrays, uu.shape)))
        Pt, Px = (np.broadcast_to(c, uu.shape) for c in comps)
        div = (Pt[2:] - Pt[:-2]) / (2 * dt) + ((np.roll(Px, -1, axis=1) - np.roll(Px, 1, axis=1)) / (2 * dx))[1:-1]
        out[name] = float(np.max(np.abs(div))) if div.size else 0.0
    return out


class _Lookup:
    def __init__(self, arrays, shape):
        self.arrays = arrays
        self.shape = shape

    def __getitem__(self, idx):
        if idx in self.arrays:
            return self.arrays[idx]
        return np.zeros(self.shape)


# ---------------------------------------------------------------------------
# Maxwell plane waves


@dataclass(frozen=True)
class PlaneWave:
    """``A_k = amplitude * eps_k * sin(k_i x^i + phase)`` with ``k`` null and ``eps . k = 0``."""

    covector: tuple
    polarization: tuple
    amplitude: float = 1.0
    phase: float = 0.0

    def check(self):
        eta = [1.0] + [-1.0] * (len(self.covector) - 1)
        if abs(sum(g * k * k for g, k in zip(eta, self.covector))) > 1e-12:
            raise PreconditionError(f"plane-wave covector {self.covector} is not null")
        if abs(sum(g * k * e for g, k, e in zip(eta, self.covector, self.polarization))) > 1e-12:
            raise PreconditionError("polarization is not orthogonal to the covector")


def plane_wave_jet(ctx: JetContext, waves: Sequence[PlaneWave], point: Sequence[float]) -> list:
    """Jet coordinates (up to order 2) of a superposition of plane waves at ``point``."""
    vals = [0.0] * len(ctx.coords)
    for i in range(ctx.m):
        vals[i] = float(point[i])
    for w in waves:
        s = sum(k * x for k, x in zip(w.covector, point)) + w.phase
        derivs = (math.sin(s), math.cos(s), -math.sin(s))
        for idx, c in enumerate(ctx.coords):
            if c.kind != "y" or c.order > 2:
                continue
            kprod = 1.0
            for a, e in enumerate(c.multi):
                kprod *= w.covector[a] ** e
            vals[idx] += w.amplitude * w.polarization[c.index] * kprod * derivs[c.order]
    return vals


def waves_from_scenario(sc: Mapping) -> list:
    out = []
    for item in sc["waves"]:
        w = PlaneWave(tuple(float(v) for v in item["covector"]), tuple(float(v) for v in item["polarization"]),
                      float(item.get("amplitude", 1.0)), float(item.get("phase", 0.0)))
        w.check()
        out.append(w)
    return out


def plane_wave_divergence(currents: Mapping, ctx: JetContext, waves: Sequence[PlaneWave], params: Mapping,
                          samples: int = 8, h: float = 1e-3, seed: int = 0) -> dict:
    """Max centered-difference divergence of each current at random spacetime points."""
    for w in waves:
        w.check()
    rng = np.random.default_rng(seed)
    points = rng.uniform(-1.0, 1.0, size=(samples, ctx.m))
    out = {}
    for name, P in currents.items():
        funcs = [p.numeric(params) for p in P.components]
        worst = 0.0
        for pt in points:
            div = 0.0
            for i in range(ctx.m):
                up, dn = pt.copy(), pt.copy()
                up[i] += h
                dn[i] -= h
                div += (funcs[i](plane_wave_jet(ctx, waves, up)) - funcs[i](plane_wave_jet(ctx, waves, dn))) / (2 * h)
            worst = max(worst, abs(div))
        out[name] = worst
    return out


def max_on_solution(e: Expr, waves: Sequence[PlaneWave], params: Mapping, points) -> float:
    f = e.numeric(params)
    return max(abs(f(plane_wave_jet(e.ctx, waves, p))) for p in points)
