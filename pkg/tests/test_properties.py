"""Randomized identities on small jet spaces (m, n <= 2, k <= 4, degree <= 3)."""
from __future__ import annotations

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import PROPERTY_CASES, contexts, exprs, forms
from jetnoether.expr import format_expr, parse_expr, partial_derivative
from jetnoether.forms import (
    Form,
    basis,
    dx,
    exterior_derivative,
    interior_product,
    is_holonomic,
    lagrangian_part,
    omega,
    volume,
    wedge,
)
from jetnoether.jet import JetContext, iterated_total_derivative, multi_indices_upto, total_derivative
from jetnoether.noether import Current, certificate_residual, decompose, divergence
from jetnoether.symmetry import Generator, JetVectorField, d_symmetry_residual, lie_derivative_form, prolong
from jetnoether.variational import euler_lagrange, is_poincare_cartan, poincare_cartan, prolonged_system

cases = settings(max_examples=PROPERTY_CASES, deadline=None)


# -- criterion-6 suites --------------------------------------------------------

@cases
@given(st.data())
def test_d_squared_is_zero(data):
    ctx = data.draw(contexts())
    q = data.draw(st.integers(0, 2))
    a = data.draw(forms(ctx, q, max_order=ctx.k - 1))
    assert exterior_derivative(exterior_derivative(a)).is_zero()


@cases
@given(st.data())
def test_total_derivatives_commute(data):
    ctx = data.draw(contexts())
    # below truncation: D_i D_j f never reaches past order k
    f = data.draw(exprs(ctx, max_order=ctx.k - 2)) if ctx.k >= 2 else ctx.zero()
    i = data.draw(st.integers(0, ctx.m - 1))
    j = data.draw(st.integers(0, ctx.m - 1))
    assert total_derivative(total_derivative(f, i), j) == total_derivative(total_derivative(f, j), i)


@cases
@given(st.data())
def test_euler_lagrange_kills_divergences(data):
    ctx = data.draw(contexts(min_k=2))
    r = (ctx.k // 2) - 1  # EL of an order-(r+1) density needs k >= 2(r+1)
    L = ctx.zero()
    for i in range(ctx.m):
        L = L + total_derivative(data.draw(exprs(ctx, max_order=r)), i)
    beta = euler_lagrange(L)
    assert all(b.is_zero() for b in beta)


@cases
@given(st.data())
def test_euler_lagrange_is_linear(data):
    ctx = data.draw(contexts(min_k=2))
    r = ctx.k // 2
    a = data.draw(exprs(ctx, max_order=r))
    b = data.draw(exprs(ctx, max_order=r))
    c = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=3))
    lhs = euler_lagrange(a * c + b).components
    rhs = tuple(x * c + y for x, y in zip(euler_lagrange(a).components, euler_lagrange(b).components))
    assert lhs == rhs


@cases
@given(st.data())
def test_prolongation_solves_symmetry_equations(data):
    ctx = data.draw(contexts())
    order = data.draw(st.integers(0, 1))
    v_B = tuple(data.draw(exprs(ctx, max_order=order, max_degree=2, max_terms=2)) for _ in range(ctx.m))
    v = tuple(data.draw(exprs(ctx, max_order=order, max_degree=2, max_terms=2)) for _ in range(ctx.n))
    X = prolong(Generator(v_B, v))
    assert all(r.is_zero() for r in d_symmetry_residual(X))


@cases
@given(st.data())
def test_normalization_is_idempotent(data):
    ctx = data.draw(contexts())
    e = data.draw(exprs(ctx))
    text = format_expr(e)
    again = parse_expr(text, ctx)
    assert again == e
    assert format_expr(again) == text
    assert (e + ctx.zero()) == e and (e * 1) == e


@cases
@given(st.data())
def test_volume_part_of_d_eta_is_divergence(data):
    ctx = data.draw(contexts())
    P = Current(tuple(data.draw(exprs(ctx, max_order=ctx.k - 1)) for _ in range(ctx.m)))
    dP = exterior_derivative(P.form)
    vol = basis(ctx).volume
    assert dP.terms.get(vol, ctx.zero()) == divergence(P)


# -- supporting algebraic laws ---------------------------------------------------

@cases
@given(st.data())
def test_ring_axioms(data):
    ctx = data.draw(contexts())
    a, b, c = (data.draw(exprs(ctx)) for _ in range(3))
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@cases
@given(st.data())
def test_partials_commute_and_obey_leibniz(data):
    ctx = data.draw(contexts())
    a, b = data.draw(exprs(ctx)), data.draw(exprs(ctx))
    n = len(ctx.coords)
    p = data.draw(st.integers(0, n - 1))
    r = data.draw(st.integers(0, n - 1))
    assert partial_derivative(partial_derivative(a, p), r) == partial_derivative(partial_derivative(a, r), p)
    assert partial_derivative(a * b, p) == partial_derivative(a, p) * b + a * partial_derivative(b, p)


@cases
@given(st.data())
def test_evaluation_is_a_homomorphism(data):
    ctx = data.draw(contexts())
    a, b = data.draw(exprs(ctx)), data.draw(exprs(ctx))
    point = {i: data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=5)) for i in range(len(ctx.coords))}
    ea, eb = a.evaluate(point), b.evaluate(point)
    assert (a + b).evaluate(point) == ea + eb
    assert (a * b).evaluate(point) == ea * eb


@cases
@given(st.data())
def test_total_derivative_is_a_derivation(data):
    ctx = data.draw(contexts())
    a = data.draw(exprs(ctx, max_order=ctx.k - 1))
    b = data.draw(exprs(ctx, max_order=ctx.k - 1))
    i = data.draw(st.integers(0, ctx.m - 1))
    assert total_derivative(a * b, i) == total_derivative(a, i) * b + a * total_derivative(b, i)


@cases
@given(st.data())
def test_iterated_total_derivative_matches_repeated_steps(data):
    ctx = data.draw(contexts(min_k=2))
    f = data.draw(exprs(ctx, max_order=ctx.k - 2))
    I = tuple(1 if s == 0 else 0 for s in range(ctx.m))
    I2 = tuple(2 * v for v in I)
    assert iterated_total_derivative(f, I2) == total_derivative(total_derivative(f, 0), 0)


@cases
@given(st.data())
def test_wedge_graded_commutativity_and_d_leibniz(data):
    ctx = data.draw(contexts())
    p, q = data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2))
    a = data.draw(forms(ctx, p, max_order=ctx.k - 1))
    b = data.draw(forms(ctx, q, max_order=ctx.k - 1))
    sign = -1 if (p * q) % 2 else 1
    ab = wedge(a, b)
    ba = wedge(b, a)
    assert ab == (ba if sign > 0 else -ba)
    lhs = exterior_derivative(ab)
    da = exterior_derivative(a)
    rhs = wedge(da, b) + (wedge(a, exterior_derivative(b)) * (-1 if p % 2 else 1))
    assert lhs == rhs


def _random_field(data, ctx):
    comps = {}
    for idx in data.draw(st.lists(st.integers(0, len(ctx.coords) - 1), max_size=3, unique=True)):
        comps[idx] = data.draw(exprs(ctx, max_degree=2, max_terms=2))
    return JetVectorField(ctx, comps)


@cases
@given(st.data())
def test_interior_product_anticommutes(data):
    ctx = data.draw(contexts())
    a = data.draw(forms(ctx, data.draw(st.integers(2, 3))))
    X, Y = _random_field(data, ctx), _random_field(data, ctx)
    assert (interior_product(X, interior_product(Y, a)) + interior_product(Y, interior_product(X, a))).is_zero()
    assert interior_product(X, interior_product(X, a)).is_zero()


@cases
@given(st.data())
def test_cartan_formula_commutes_with_d(data):
    ctx = data.draw(contexts())
    a = data.draw(forms(ctx, data.draw(st.integers(1, 2)), max_order=ctx.k - 2 if ctx.k >= 2 else 0))
    X = _random_field(data, ctx)
    assume(not X.components.keys() & set(ctx.jet_indices(exact=ctx.k)))
    # L_X d = d L_X holds for any field when nothing is truncated
    assume(all(c.order() <= ctx.k - 2 for c in X.components.values()))
    assert lie_derivative_form(X, exterior_derivative(a)) == exterior_derivative(lie_derivative_form(X, a))


@cases
@given(st.data())
def test_total_derivative_order_and_x_only(data):
    ctx = data.draw(contexts())
    e = data.draw(exprs(ctx))
    i = data.draw(st.integers(0, ctx.m - 1))
    assert total_derivative(e, i).order() <= e.order() + 1
    xs = data.draw(exprs(ctx, base_only=True))
    assert total_derivative(xs, i) == partial_derivative(xs, i)


@cases
@given(st.data())
def test_holonomic_closure_under_dx(data):
    ctx = data.draw(contexts())
    assume(ctx.m == 2)
    lam = _holonomic_one_form(data, ctx)
    i = data.draw(st.integers(0, ctx.m - 1))
    # degree 1 < m and degree + 1 = m: the omega-count bound for degree m is #dx + #psi < m
    assert is_holonomic(lam)
    assert is_holonomic(wedge(lam, dx(ctx, i)))


def _holonomic_one_form(data, ctx):
    out = Form(ctx, 1, {})
    for j in range(ctx.n):
        for J in multi_indices_upto(ctx.m, ctx.k - 1):
            if data.draw(st.booleans()):
                out = out + omega(ctx, j, J) * data.draw(exprs(ctx, max_degree=2, max_terms=2))
    return out


@cases
@given(st.data())
def test_lagrangian_part_ignores_holonomic_terms(data):
    ctx = data.draw(contexts())
    L = data.draw(exprs(ctx))
    lam = Form(ctx, ctx.m, {})
    for _ in range(data.draw(st.integers(0, 3))):
        j = data.draw(st.integers(0, ctx.n - 1))
        J = data.draw(st.sampled_from(multi_indices_upto(ctx.m, ctx.k - 1)))
        term = omega(ctx, j, J)
        if ctx.m == 2:
            term = wedge(dx(ctx, data.draw(st.integers(0, 1))), term)
        lam = lam + term * data.draw(exprs(ctx, max_degree=2, max_terms=2))
    assume(lam.is_zero() or is_holonomic(lam))
    a = volume(ctx, L)
    assert lagrangian_part(a + lam) == lagrangian_part(a) == L


@cases
@given(st.data())
def test_poincare_cartan_defining_property(data):
    ctx = data.draw(contexts(min_k=2))
    L = data.draw(exprs(ctx, max_order=1))
    alpha = poincare_cartan(L)
    beta = euler_lagrange(L)
    assert lagrangian_part(alpha) == L
    assert is_poincare_cartan(alpha, beta)
    diff = exterior_derivative(alpha) - beta.form
    assert diff.is_zero() or is_holonomic(diff)


@cases
@given(st.data())
def test_lie_derivative_is_a_derivation_of_wedge(data):
    ctx = data.draw(contexts())
    top = ctx.k - 2 if ctx.k >= 2 else 0
    a = data.draw(forms(ctx, 1, max_terms=2, max_order=top))
    b = data.draw(forms(ctx, 1, max_terms=2, max_order=top))
    X = _random_field(data, ctx)
    assume(all(c.order() <= top for c in X.components.values()))
    assume(not X.components.keys() & set(ctx.jet_indices(exact=ctx.k)))
    lhs = lie_derivative_form(X, wedge(a, b))
    rhs = wedge(lie_derivative_form(X, a), b) + wedge(a, lie_derivative_form(X, b))
    assert lhs == rhs


@cases
@given(st.data())
def test_symmetry_residuals_are_linear(data):
    ctx = data.draw(contexts())
    X, Y = _random_field(data, ctx), _random_field(data, ctx)
    rx, ry, rxy = d_symmetry_residual(X), d_symmetry_residual(Y), d_symmetry_residual(X + Y)
    assert all(a + b == c for a, b, c in zip(rx, ry, rxy))


@cases
@given(st.data())
def test_certificates_are_sound(data):
    ctx = JetContext(("x",), ("y",), 4)
    beta = euler_lagrange(ctx.parse("(1/2)*y_x^2 - (1/2)*y^2"))
    sys = prolonged_system(beta, 3)
    mults = [data.draw(exprs(ctx, max_order=2, max_degree=2, max_terms=3)) for _ in sys.generators]
    target = sum((q * g for q, (_, _, g) in zip(mults, sys.generators)), ctx.zero())
    cert = decompose(target, sys)
    assert cert.valid
    assert certificate_residual(target, cert.multipliers, sys).is_zero()
