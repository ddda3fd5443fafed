"""Differential forms on J^k expanded in the contact basis.

The basis 1-forms are ``dx^i``, the contact forms
``w^j_J = dy^j_J - sum_l y^j_{J+1_l} dx^l`` for ``|J| <= k-1`` and the top
differentials ``psi^j_L = dy^j_L`` for ``|L| = k``.  A :class:`Form` stores,
for every strictly increasing tuple of basis ids, an :class:`Expr`
coefficient.  The dx/dy basis only appears in :func:`to_contact_basis`.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ContextMismatch, PreconditionError
from .expr import Expr
from .jet import JetContext, index_key, lift_expr, multi_indices_upto, raise_index, total_derivative

KIND_RANK = {"dx": 0, "w": 1, "psi": 2}


@dataclass(frozen=True)
class BasisOneForm:
    """``kind`` is ``"dx"`` (``index`` = i), ``"w"`` or ``"psi"`` (``index`` = j)."""

    kind: str
    index: int
    multi: tuple = ()

    def sort_key(self):
        if self.kind == "dx":
            return (0, self.index)
        return (KIND_RANK[self.kind], index_key(self.multi), self.index)


class _Basis:
    """Per-context table of basis 1-forms, numbered in the global order."""

    def __init__(self, ctx: JetContext):
        items = [BasisOneForm("dx", i) for i in range(ctx.m)]
        for J in multi_indices_upto(ctx.m, ctx.k):
            kind = "w" if sum(J) < ctx.k else "psi"
            for j in range(ctx.n):
                items.append(BasisOneForm(kind, j, J))
        items.sort(key=BasisOneForm.sort_key)
        self.items = tuple(items)
        self.id = {b: i for i, b in enumerate(items)}
        # coordinate index whose differential is this basis form (None for dx)
        self.coord = tuple(None if b.kind == "dx" else ctx.y(b.index, b.multi) for b in items)
        self.by_coord = {c: i for i, c in enumerate(self.coord) if c is not None}
        self.volume = tuple(range(ctx.m))


def basis(ctx: JetContext) -> _Basis:
    b = ctx.__dict__.get("_form_basis")
    if b is None:
        b = ctx.__dict__["_form_basis"] = _Basis(ctx)
    return b


def basis_name(ctx: JetContext, b: BasisOneForm) -> str:
    if b.kind == "dx":
        return "d" + ctx.independent[b.index]
    suffix = "".join(ctx.independent[s] for s in range(ctx.m) for _ in range(b.multi[s]))
    inner = ctx.dependent[b.index] + ("," + suffix if suffix else "")
    return f"{b.kind}[{inner}]"


def _merge(a: tuple, b: tuple):
    """Sorted union of two increasing id tuples with the sign of the shuffle,
    or ``None`` if they share a factor."""
    if not a:
        return b, 1
    if not b:
        return a, 1
    out = []
    sign = 1
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            if (len(a) - i) % 2:
                sign = -sign
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def _sort_with_sign(ids: Iterable[int]):
    ids = list(ids)
    if len(set(ids)) != len(ids):
        return None
    sign = 1
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if ids[i] > ids[j]:
                sign = -sign
    return tuple(sorted(ids)), sign


class Form:
    """Homogeneous form of degree ``degree``; ``terms`` maps id tuples to nonzero Exprs."""

    __slots__ = ("ctx", "degree", "terms")

    def __init__(self, ctx: JetContext, degree: int, terms: dict | None = None):
        self.ctx = ctx
        self.degree = degree
        self.terms = {w: c for w, c in (terms or {}).items() if c.terms}

    @classmethod
    def scalar(cls, e: Expr) -> "Form":
        return cls(e.ctx, 0, {(): e})

    @classmethod
    def zero(cls, ctx: JetContext, degree: int) -> "Form":
        return cls(ctx, degree, {})

    @classmethod
    def basis_wedge(cls, ctx: JetContext, ids: Iterable[int], coeff: Expr | None = None) -> "Form":
        r = _sort_with_sign(ids)
        if r is None:
            return cls(ctx, len(list(ids)), {})
        w, s = r
        c = ctx.const(1) if coeff is None else coeff
        return cls(ctx, len(w), {w: c if s > 0 else -c})

    def _check(self, other: "Form"):
        if other.ctx is not self.ctx and other.ctx != self.ctx:
            raise ContextMismatch("forms belong to different jet contexts")

    def __add__(self, other):
        other = as_form(other, self.ctx)
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.degree != self.degree:
            raise PreconditionError(f"cannot add forms of degree {self.degree} and {other.degree}")
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return Form(self.ctx, self.degree, out)

    def __neg__(self):
        return Form(self.ctx, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-as_form(other, self.ctx))

    def __mul__(self, other):
        """Scale by an Expr or a number."""
        if isinstance(other, Form):
            return wedge(self, other)
        if not isinstance(other, Expr):
            other = self.ctx.const(other)
        return Form(self.ctx, self.degree, {w: c * other for w, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, Expr):
            other = Form.scalar(other)
        if not isinstance(other, Form):
            return NotImplemented
        if not self.terms and not other.terms:
            return True
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, ids: Iterable[int]) -> Expr:
        r = _sort_with_sign(ids)
        if r is None:
            return self.ctx.zero()
        w, s = r
        c = self.terms.get(w)
        if c is None:
            return self.ctx.zero()
        return c if s > 0 else -c

    def sorted_terms(self) -> list:
        return sorted(self.terms.items())

    def map_coefficients(self, fn) -> "Form":
        return Form(self.ctx, self.degree, {w: fn(c) for w, c in self.terms.items()})

    def __str__(self):
        return format_form(self)

    def __repr__(self):
        return f"Form({format_form(self)!r})"


def as_form(a, ctx: JetContext | None = None) -> Form:
    if isinstance(a, Form):
        return a
    if isinstance(a, Expr):
        return Form.scalar(a)
    if ctx is None:
        raise TypeError(f"cannot interpret {a!r} as a form")
    return Form.scalar(ctx.const(a))


def format_form(a: Form) -> str:
    if not a.terms:
        return "0"
    if a.degree == 0:
        return str(a.terms[()])
    items = basis(a.ctx).items
    parts = []
    for w, c in a.sorted_terms():
        wedge_txt = "∧".join(basis_name(a.ctx, items[i]) for i in w)
        txt = str(c)
        if c.is_constant():
            if txt == "1":
                parts.append(("+", wedge_txt))
                continue
            if txt == "-1":
                parts.append(("-", wedge_txt))
                continue
        if len(c.terms) == 1 and txt.startswith("-"):
            parts.append(("-", f"{txt[1:]}*{wedge_txt}"))
        elif len(c.terms) == 1:
            parts.append(("+", f"{txt}*{wedge_txt}"))
        else:
            parts.append(("+", f"({txt})*{wedge_txt}"))
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


# ---------------------------------------------------------------------------
# constructors


def dx(ctx: JetContext, i: int) -> Form:
    return Form.basis_wedge(ctx, [i])


def omega(ctx: JetContext, j: int, J: tuple | None = None) -> Form:
    J = (0,) * ctx.m if J is None else tuple(J)
    if sum(J) >= ctx.k:
        raise PreconditionError(f"contact form w needs |J| <= k-1, got {J}")
    return Form.basis_wedge(ctx, [basis(ctx).id[BasisOneForm("w", j, J)]])


def psi(ctx: JetContext, j: int, L: tuple) -> Form:
    L = tuple(L)
    if sum(L) != ctx.k:
        raise PreconditionError(f"psi needs |L| = k, got {L}")
    return Form.basis_wedge(ctx, [basis(ctx).id[BasisOneForm("psi", j, L)]])


def volume(ctx: JetContext, coeff: Expr | None = None) -> Form:
    """``coeff * dx^1 ∧ ... ∧ dx^m``."""
    return Form.basis_wedge(ctx, range(ctx.m), coeff)


def volume_without(ctx: JetContext, i: int, coeff: Expr | None = None) -> Form:
    """``coeff * dx^1 ∧ .. (omit i) .. ∧ dx^m`` (no sign)."""
    return Form.basis_wedge(ctx, [s for s in range(ctx.m) if s != i], coeff)


# ---------------------------------------------------------------------------
# algebra


def wedge(a, b) -> Form:
    ctx = (a.ctx if isinstance(a, (Form, Expr)) else b.ctx)
    a, b = as_form(a, ctx), as_form(b, ctx)
    a._check(b)
    out: dict = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            r = _merge(wa, wb)
            if r is None:
                continue
            w, s = r
            c = ca * cb
            if s < 0:
                c = -c
            out[w] = out[w] + c if w in out else c
    return Form(ctx, a.degree + b.degree, out)


def _scalar_differential(f: Expr) -> Form:
    ctx = f.ctx
    B = basis(ctx)
    out: dict = {}
    for i in range(ctx.m):
        c = total_derivative(f, i)
        if c.terms:
            out[(i,)] = c
    for idx in f.indices():
        bid = B.by_coord.get(idx)
        if bid is not None:
            out[(bid,)] = f.diff_index(idx)
    return Form(ctx, 1, out)


def _basis_differential(ctx: JetContext, bid: int) -> Form:
    cache = ctx.__dict__.setdefault("_form_dbasis", {})
    if bid in cache:
        return cache[bid]
    B = basis(ctx)
    b = B.items[bid]
    res = Form(ctx, 2, {})
    if b.kind == "w":
        # d w_J = -sum_l theta_{J+1_l} ∧ dx^l
        for l in range(ctx.m):
            R = raise_index(b.multi, l)
            kind = "w" if sum(R) < ctx.k else "psi"
            tid = B.id[BasisOneForm(kind, b.index, R)]
            res = res - Form.basis_wedge(ctx, [tid, l])
    cache[bid] = res
    return res


def exterior_derivative(a) -> Form:
    a = as_form(a)
    ctx = a.ctx
    out = Form(ctx, a.degree + 1, {})
    for w, c in a.terms.items():
        rest = Form(ctx, a.degree, {w: ctx.const(1)})
        out = out + wedge(_scalar_differential(c), rest)
        for s, bid in enumerate(w):
            db = _basis_differential(ctx, bid)
            if not db.terms:
                continue
            left = Form.basis_wedge(ctx, w[:s], c if s % 2 == 0 else -c)
            right = Form.basis_wedge(ctx, w[s + 1:])
            out = out + wedge(wedge(left, db), right)
    return out


def basis_value(ctx: JetContext, bid: int, X) -> Expr:
    """The basis 1-form ``bid`` evaluated on the vector field ``X``."""
    B = basis(ctx)
    b = B.items[bid]
    if b.kind == "dx":
        return X.component(b.index)
    val = X.component(B.coord[bid])
    if b.kind == "w":
        for l in range(ctx.m):
            xl = X.component(l)
            if xl.terms:
                val = val - ctx.coord(ctx.y(b.index, raise_index(b.multi, l))) * xl
    return val


def interior_product(X, a) -> Form:
    a = as_form(a)
    if a.degree == 0:
        raise PreconditionError("interior product of a 0-form is undefined")
    ctx = a.ctx
    if X.ctx != ctx:
        raise ContextMismatch("vector field and form belong to different contexts")
    values: dict = {}
    out: dict = {}
    for w, c in a.terms.items():
        for s, bid in enumerate(w):
            v = values.get(bid)
            if v is None:
                v = values[bid] = basis_value(ctx, bid, X)
            if not v.terms:
                continue
            t = c * v
            if s % 2:
                t = -t
            key = w[:s] + w[s + 1:]
            out[key] = out[key] + t if key in out else t
    return Form(ctx, a.degree - 1, out)


def evaluate_form(a, fields) -> Expr:
    """``a(X_1, ..., X_q)``."""
    a = as_form(a)
    fields = list(fields)
    if len(fields) != a.degree:
        raise PreconditionError(f"a {a.degree}-form needs {a.degree} vector fields, got {len(fields)}")
    for X in fields:
        a = interior_product(X, a)
    return a.terms.get((), a.ctx.zero())


# ---------------------------------------------------------------------------
# predicates


def _counts(ctx: JetContext, w: tuple):
    items = basis(ctx).items
    ndx = nw = npsi = 0
    for bid in w:
        kind = items[bid].kind
        if kind == "dx":
            ndx += 1
        elif kind == "w":
            nw += 1
        else:
            npsi += 1
    return ndx, nw, npsi


def is_holonomic(a) -> bool:
    a = as_form(a)
    ctx = a.ctx
    for w in a.terms:
        ndx, nw, npsi = _counts(ctx, w)
        if a.degree < ctx.m:
            if nw == 0:
                return False
        elif ndx + npsi >= ctx.m:
            return False
    return True


def is_proper(a) -> bool:
    a = as_form(a)
    return all(_counts(a.ctx, w)[2] == 0 for w in a.terms)


def bidegree(a):
    """``(l, r)`` when every term has ``l`` dx and ``r`` contact factors, else ``None``."""
    a = as_form(a)
    if not a.terms:
        raise PreconditionError("the bidegree of the zero form is undefined")
    if not is_proper(a):
        raise PreconditionError("bidegree is defined for proper forms only")
    pairs = {_counts(a.ctx, w)[:2] for w in a.terms}
    return pairs.pop() if len(pairs) == 1 else None


def lagrangian_part(a) -> Expr:
    a = as_form(a)
    ctx = a.ctx
    if a.terms and a.degree != ctx.m:
        raise PreconditionError(f"expected an {ctx.m}-form, got degree {a.degree}")
    if not is_proper(a):
        raise PreconditionError("lagrangian part requires a proper form")
    return a.terms.get(basis(ctx).volume, ctx.zero())


def holonomic_part_removed(a: Form) -> Form:
    """Drop every term that is holonomic on its own (terms with an ω factor
    when ``degree < m``)."""
    ctx = a.ctx
    keep = {}
    for w, c in a.terms.items():
        ndx, nw, npsi = _counts(ctx, w)
        if a.degree < ctx.m and nw > 0:
            continue
        if a.degree >= ctx.m and ndx + npsi < ctx.m:
            continue
        keep[w] = c
    return Form(ctx, a.degree, keep)


# ---------------------------------------------------------------------------
# change of basis and context


def coordinate_differential(ctx: JetContext, c) -> Form:
    return exterior_derivative(Form.scalar(ctx.coord(c)))


def to_contact_basis(ctx: JetContext, raw: Mapping) -> Form:
    """Convert ``{(c_1, ..., c_q): coeff}`` meaning ``coeff dc_1 ∧ ... ∧ dc_q``.

    Coordinates may be given by name, index or :class:`Coordinate`; coefficients
    by Expr or expression string.
    """
    from .expr import parse_expr

    out = None
    for coords, coeff in raw.items():
        if isinstance(coords, (str, int)):
            coords = (coords,)
        if isinstance(coeff, str):
            coeff = parse_expr(coeff, ctx)
        elif not isinstance(coeff, Expr):
            coeff = ctx.const(coeff)
        term = Form.scalar(coeff)
        for c in coords:
            try:
                idx = ctx.index_of(c)
            except ContextMismatch as exc:
                raise PreconditionError(str(exc)) from None
            term = wedge(term, coordinate_differential(ctx, idx))
        out = term if out is None else out + term
    return out if out is not None else Form(ctx, 0, {})


def lift_form(a: Form, ctx: JetContext) -> Form:
    """Re-express ``a`` on a jet space of order ``ctx.k`` >= the original order.

    Top-order ``psi_L`` of the source become ``d(y_L)`` in the target.
    """
    src = a.ctx
    if src == ctx:
        return a
    if ctx.k < src.k:
        raise PreconditionError("can only lift forms to a higher jet order")
    Bs = basis(src)
    images = {}
    for bid, b in enumerate(Bs.items):
        if b.kind == "dx":
            images[bid] = dx(ctx, b.index)
        elif b.kind == "w":
            images[bid] = omega(ctx, b.index, b.multi)
        else:
            images[bid] = coordinate_differential(ctx, ctx.y(b.index, b.multi))
    out = Form(ctx, a.degree, {})
    for w, c in a.terms.items():
        term = Form.scalar(lift_expr(c, ctx))
        for bid in w:
            term = wedge(term, images[bid])
        out = out + term
    return out
