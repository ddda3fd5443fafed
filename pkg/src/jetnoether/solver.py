"""Exact search for polynomial multipliers ``target = sum_g Q_g * G_g``.

Candidate multiplier monomials are generated by closure: starting from the
support ``S`` of the target, every ``t / lead`` with ``t`` in ``S`` and
``lead`` a monomial of some ``G_g`` is a candidate, and the supports of the
products ``candidate * G_g`` are added to ``S`` until nothing changes.  A
multiplier monomial outside the closure only ever produces monomials outside
``S``, so it can be set to zero in any solution; the search is therefore
complete for the given degree and order bounds.  The coefficient equations
are solved by sparse Gauss–Jordan elimination over the coefficient field.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import SolverBoundsExhausted
from .expr import Expr, mono_degree, mono_div, mono_mul


@dataclass(frozen=True)
class SolverBounds:
    degree: int = 4
    order: int | None = None
    max_unknowns: int = 20000

    def doubled(self, k: int) -> "SolverBounds":
        order = None if self.order is None else min(2 * max(self.order, 1), k)
        return SolverBounds(2 * self.degree, order, self.max_unknowns)

    def as_dict(self) -> dict:
        return {"degree": self.degree, "order": self.order, "max_unknowns": self.max_unknowns}


def _admissible(mono, bounds: SolverBounds, coord_order) -> bool:
    if mono_degree(mono) > bounds.degree:
        return False
    if bounds.order is not None:
        return all(coord_order[i] <= bounds.order for i, _ in mono)
    return True


def _closure(target: Expr, gens: Sequence[Expr], bounds: SolverBounds) -> list:
    co = target.ctx.coord_order
    supports = [list(g.terms) for g in gens]
    S = set(target.terms)
    frontier = set(S)
    cands = [set() for _ in gens]
    total = 0
    while frontier:
        new_cands = []
        for g, supp in enumerate(supports):
            for t in frontier:
                for lead in supp:
                    mu = mono_div(t, lead)
                    if mu is None or mu in cands[g] or not _admissible(mu, bounds, co):
                        continue
                    cands[g].add(mu)
                    new_cands.append((g, mu))
                    total += 1
                    if total > bounds.max_unknowns:
                        raise SolverBoundsExhausted(
                            f"more than {bounds.max_unknowns} candidate multiplier monomials",
                            bounds.as_dict())
        frontier = set()
        for g, mu in new_cands:
            for lead in supports[g]:
                p = mono_mul(mu, lead)
                if p not in S:
                    S.add(p)
                    frontier.add(p)
    return [sorted(c, key=target.ctx.monomial_key) for c in cands]


def _eliminate(rows, zero):
    """Solve ``rows`` = [(dict var->coeff, rhs)]; ``None`` if inconsistent."""
    pivots: dict = {}  # var -> (creation index, row dict normalized, rhs)
    order: list = []
    for coeffs, rhs in rows:
        row = dict(coeffs)
        while True:
            hits = [v for v in row if v in pivots]
            if not hits:
                break
            v = min(hits, key=lambda h: pivots[h][0])
            f = row[v]
            _, prow, prhs = pivots[v]
            for w, c in prow.items():
                nv = row.get(w, zero) - f * c
                if nv == 0:
                    row.pop(w, None)
                else:
                    row[w] = nv
            rhs = rhs - f * prhs
        if not row:
            if rhs != 0:
                return None
            continue
        # pivot on the simplest variable; free (higher-degree) variables end up 0
        v = min(row)
        inv = 1 / row[v]
        prow = {w: c * inv for w, c in row.items()}
        pivots[v] = (len(order), prow, rhs * inv)
        order.append(v)
    values: dict = {}
    for v in reversed(order):
        _, prow, prhs = pivots[v]
        val = prhs
        for w, c in prow.items():
            if w != v and w in values:
                val = val - c * values[w]
        values[v] = val
    return values


def solve_multipliers(target: Expr, gens: Sequence[Expr], bounds: SolverBounds | None = None):
    """Multipliers ``Q_g`` with ``target == sum Q_g * gens[g]``, or ``None`` when
    no polynomial solution exists inside ``bounds``."""
    ctx = target.ctx
    bounds = bounds or SolverBounds()
    zero = ctx.field.zero
    if not target.terms:
        return [ctx.zero() for _ in gens]
    cands = _closure(target, gens, bounds)
    # variables (degree, g, position) sort simplest first
    eqs: dict = {}
    for g, mus in enumerate(cands):
        for pos, mu in enumerate(mus):
            var = (mono_degree(mu), g, pos)
            for lead, c in gens[g].terms.items():
                p = mono_mul(mu, lead)
                eqs.setdefault(p, {})[var] = c
    if any(p not in eqs for p in target.terms):
        return None
    rows = []
    for p in sorted(eqs, key=ctx.monomial_key):
        rows.append((eqs[p], target.terms.get(p, zero)))
    values = _eliminate(rows, zero)
    if values is None:
        return None
    out = []
    for g, mus in enumerate(cands):
        terms = {}
        for pos, mu in enumerate(mus):
            v = values.get((mono_degree(mu), g, pos))
            if v is not None and v != 0:
                terms[mu] = v
        out.append(Expr(ctx, terms))
    return out


def find_multipliers(target: Expr, gens: Sequence[Expr], bounds: SolverBounds | None = None,
                     escalate: bool = True):
    """Like :func:`solve_multipliers` but retries once with doubled bounds and
    raises :class:`SolverBoundsExhausted` when both attempts fail."""
    bounds = bounds or SolverBounds()
    tried = [bounds]
    sol = solve_multipliers(target, gens, bounds)
    if sol is None and escalate:
        bigger = bounds.doubled(target.ctx.k)
        tried.append(bigger)
        sol = solve_multipliers(target, gens, bigger)
    if sol is None:
        raise SolverBoundsExhausted(
            "no polynomial multipliers within bounds " +
            ", ".join(f"(degree<={b.degree}, order<={b.order})" for b in tried),
            tried[-1].as_dict())
    return sol
