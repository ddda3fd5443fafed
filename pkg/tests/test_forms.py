import pytest

from jetnoether.errors import PreconditionError
from jetnoether.forms import (
    Form,
    bidegree,
    coordinate_differential,
    dx,
    exterior_derivative,
    interior_product,
    is_holonomic,
    is_proper,
    lagrangian_part,
    lift_form,
    omega,
    psi,
    to_contact_basis,
    volume,
    wedge,
)
from jetnoether.jet import JetContext
from jetnoether.symmetry import JetVectorField, partial_field


@pytest.fixture
def c1():
    return JetContext(["x"], ["y"], 2)


@pytest.fixture
def c2():
    return JetContext(["x", "t"], ["u"], 2)


def test_coordinate_differentials(c1):
    assert coordinate_differential(c1, "y") == omega(c1, 0) + dx(c1, 0) * c1.parse("y_x")
    assert coordinate_differential(c1, "x") == dx(c1, 0)
    assert coordinate_differential(c1, "y_xx") == psi(c1, 0, (2,))
    assert str(coordinate_differential(c1, "y")) == "y_x*dx + w[y]"


def test_wedge(c1):
    assert wedge(dx(c1, 0), dx(c1, 0)).is_zero()
    assert wedge(omega(c1, 0), dx(c1, 0)) == -wedge(dx(c1, 0), omega(c1, 0))
    y = c1.parse("y")
    assert wedge(dx(c1, 0) * y, omega(c1, 0)) == wedge(dx(c1, 0), omega(c1, 0)) * y


def test_exterior_derivative(c1):
    assert exterior_derivative(Form.scalar(c1.parse("x"))) == dx(c1, 0)
    assert exterior_derivative(omega(c1, 0)) == -wedge(omega(c1, 0, (1,)), dx(c1, 0))
    assert exterior_derivative(dx(c1, 0) * c1.parse("y")) == wedge(omega(c1, 0), dx(c1, 0))


def test_interior_product(c1):
    X = partial_field(c1, "x")
    assert interior_product(X, dx(c1, 0)) == Form.scalar(c1.const(1))
    dxdy = to_contact_basis(c1, {("x", "y"): 1})
    assert interior_product(X, dxdy) == coordinate_differential(c1, "y")
    assert interior_product(JetVectorField(c1), dxdy).is_zero()
    with pytest.raises(PreconditionError):
        interior_product(X, Form.scalar(c1.parse("y")))


def test_holonomic_and_proper(c1, c2):
    assert is_holonomic(omega(c1, 0))
    assert not is_holonomic(dx(c1, 0))
    assert not is_holonomic(wedge(dx(c1, 0), omega(c1, 0)))
    # m = 2, degree 2: dx∧w has #dx + #psi = 1 < 2
    assert is_holonomic(wedge(dx(c2, 0), omega(c2, 0)))
    assert not is_holonomic(wedge(dx(c2, 0), psi(c2, 0, (2, 0))))
    assert is_proper(volume(c1, c1.parse("y")))
    assert not is_proper(psi(c1, 0, (2,)))
    assert not is_proper(wedge(omega(c1, 0), psi(c1, 0, (2,))))


def test_bidegree(c2):
    b = c2.parse("u_xx - u_tt")
    assert bidegree(wedge(volume(c2, b), omega(c2, 0))) == (2, 1)
    assert bidegree(wedge(dx(c2, 0), dx(c2, 1))) == (2, 0)
    assert bidegree(dx(c2, 0) + omega(c2, 0)) is None
    with pytest.raises(PreconditionError):
        bidegree(Form(c2, 1, {}))


def test_lagrangian_part(c1):
    L = c1.parse("(1/2)*y_x^2 - (1/2)*y^2")
    assert lagrangian_part(volume(c1, L)) == L
    alpha = volume(c1, L) + omega(c1, 0) * c1.parse("y_x")
    assert lagrangian_part(alpha) == L
    assert lagrangian_part(omega(c1, 0)).is_zero()
    with pytest.raises(PreconditionError):
        lagrangian_part(wedge(dx(c1, 0), omega(c1, 0)))


def test_lift_form_replaces_top_order_contact(c1):
    big = c1.with_order(4)
    a = psi(c1, 0, (2,)) * c1.parse("y")
    lifted = lift_form(a, big)
    assert lifted == coordinate_differential(big, "y_xx") * big.parse("y")
    assert lift_form(omega(c1, 0), big) == omega(big, 0)
