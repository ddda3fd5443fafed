import pytest

from jetnoether.errors import SolverBoundsExhausted
from jetnoether.jet import JetContext
from jetnoether.solver import SolverBounds, find_multipliers, solve_multipliers


@pytest.fixture
def ctx():
    return JetContext(["x"], ["y"], 3)


def combine(mults, gens, ctx):
    return sum((q * g for q, g in zip(mults, gens)), ctx.zero())


def test_simple_ideal_membership(ctx):
    gens = [ctx.parse("y + y_xx"), ctx.parse("y_x + y_xxx")]
    target = ctx.parse("-y_x*y - y_x*y_xx")
    sol = solve_multipliers(target, gens)
    assert combine(sol, gens, ctx) == target


def test_not_in_ideal(ctx):
    gens = [ctx.parse("y + y_xx")]
    assert solve_multipliers(ctx.parse("y"), gens) is None
    with pytest.raises(SolverBoundsExhausted) as exc:
        find_multipliers(ctx.parse("y"), gens, SolverBounds(degree=1))
    assert exc.value.bounds["degree"] == 2  # escalated once


def test_escalation_reaches_higher_degree(ctx):
    gens = [ctx.parse("y + y_xx")]
    target = ctx.parse("y^3*(y + y_xx)")
    assert solve_multipliers(target, gens, SolverBounds(degree=2)) is None
    sol = find_multipliers(target, gens, SolverBounds(degree=2))
    assert combine(sol, gens, ctx) == target


def test_unknown_cap(ctx):
    gens = [ctx.parse("y + y_x + y_xx + y_xxx")]
    target = ctx.parse("(y + y_x + y_xx + y_xxx)*(x + y + y_x)^4")
    with pytest.raises(SolverBoundsExhausted):
        solve_multipliers(target, gens, SolverBounds(degree=4, max_unknowns=10))


def test_order_bound_restricts_candidates(ctx):
    gens = [ctx.parse("y + y_xx")]
    target = ctx.parse("y_xxx*(y + y_xx)")
    assert solve_multipliers(target, gens, SolverBounds(order=2)) is None
    assert solve_multipliers(target, gens, SolverBounds(order=3)) is not None


def test_zero_target(ctx):
    gens = [ctx.parse("y + y_xx")]
    assert all(q.is_zero() for q in solve_multipliers(ctx.zero(), gens))


def test_parameter_coefficients():
    c = JetContext(["x"], ["y"], 2, ["c"])
    gens = [c.parse("c*y + y_xx")]
    target = c.parse("(1/c)*y_x*(c*y + y_xx)")
    sol = solve_multipliers(target, gens)
    assert sol[0] == c.parse("(1/c)*y_x")
