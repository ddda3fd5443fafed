import math

import pytest

from jetnoether.errors import PreconditionError
from jetnoether.jet import JetContext
from jetnoether.noether import make_current, zero_current
from jetnoether.numeric import PlaneWave, leapfrog_divergence, plane_wave_divergence, plane_wave_jet, rk4_drift
from jetnoether.variational import SourceForm, euler_lagrange


@pytest.fixture
def osc():
    c = JetContext(["x"], ["y"], 4)
    return c, euler_lagrange(c.parse("(1/2)*y_x^2 - (1/2)*y^2"))


def test_oscillator_energy_drift(osc):
    c, beta = osc
    cur = {"energy": make_current(c, ["-(1/2)*y_x^2 - (1/2)*y^2"]), "zero": zero_current(c)}
    drift = rk4_drift(beta, cur, {"y": 1, "y_x": 0}, 1e-3, 10.0)
    assert drift["energy"] <= 1e-6
    assert drift["zero"] == 0


def test_non_conserved_current_drifts(osc):
    c, beta = osc
    drift = rk4_drift(beta, {"y": make_current(c, ["y"])}, {"y": 1, "y_x": 0}, 1e-2, 3.0)
    assert drift["y"] > 0.5


def test_anharmonic_convergence_is_fourth_order():
    # quartic potential: the O(h^4) global error term no longer cancels in the energy
    c = JetContext(["x"], ["y"], 4)
    beta = euler_lagrange(c.parse("(1/2)*y_x^2 - (1/4)*y^4"))
    cur = {"E": make_current(c, ["(1/2)*y_x^2 + (1/4)*y^4"])}
    coarse = rk4_drift(beta, cur, {"y": 1, "y_x": 0}, 0.02, 5.0, precision=30)["E"]
    fine = rk4_drift(beta, cur, {"y": 1, "y_x": 0}, 0.01, 5.0, precision=30)["E"]
    assert 12 <= coarse / fine <= 20


def test_rk4_preconditions():
    w = JetContext(["t", "x"], ["u"], 4)
    with pytest.raises(PreconditionError):
        rk4_drift(euler_lagrange(w.parse("(1/2)*u_t^2")), {}, {}, 0.1, 1.0)
    c = JetContext(["x"], ["y"], 4)
    with pytest.raises(PreconditionError):
        rk4_drift(SourceForm(c, (c.parse("y*y_xx"),)), {}, {"y": 1}, 0.1, 1.0)


def test_wave_leapfrog_residual():
    w = JetContext(["t", "x"], ["u"], 4)
    beta = euler_lagrange(w.parse("(1/2)*u_t^2 - (1/2)*u_x^2"))
    cur = {"energy": make_current(w, ["(1/2)*u_t^2 + (1/2)*u_x^2", "-u_t*u_x"]),
           "zero": zero_current(w)}
    coarse = leapfrog_divergence(beta, cur, 128, 0.5, 1.0, 1)
    fine = leapfrog_divergence(beta, cur, 256, 0.5, 1.0, 1)
    assert fine["energy"] <= 1e-3
    assert fine["zero"] == 0
    # second-order scheme: halving the mesh divides the residual by about 4
    assert 3 <= coarse["energy"] / fine["energy"] <= 5


def test_plane_waves_validate():
    with pytest.raises(PreconditionError):
        PlaneWave((1.0, 1.0, 1.0, 0.0), (0.0, 0.0, 0.0, 1.0)).check()
    with pytest.raises(PreconditionError):
        PlaneWave((1.0, 0.0, 0.0, 1.0), (0.0, 0.0, 0.0, 1.0)).check()
    PlaneWave((1.0, 0.0, 0.0, 1.0), (0.0, 1.0, 0.0, 0.0)).check()


def test_plane_wave_jet_entries(maxwell):
    ctx = maxwell.context
    wave = PlaneWave((1.0, 0.0, 0.0, 1.0), (0.0, 1.0, 0.0, 0.0), 2.0, 0.5)
    pt = (0.1, 0.2, 0.3, 0.4)
    vals = plane_wave_jet(ctx, [wave], pt)
    s = 0.1 + 0.4 + 0.5
    assert vals[ctx.index_of("A1")] == pytest.approx(2 * math.sin(s))
    assert vals[ctx.index_of("A1_x3")] == pytest.approx(2 * math.cos(s))
    assert vals[ctx.index_of("A1_x0x3")] == pytest.approx(-2 * math.sin(s))
    assert vals[ctx.index_of("A2")] == 0


def test_maxwell_divergence_on_plane_waves(maxwell):
    ctx = maxwell.context
    waves = [PlaneWave((1.0, 0.0, 0.0, 1.0), (0.0, 1.0, 0.0, 0.0)),
             PlaneWave((1.0, 0.6, 0.8, 0.0), (0.0, 0.0, 0.0, 1.0), 0.7, 1.1)]
    params = {"c": 1, "pi": math.pi}
    # a non-conserved current is caught, a trivially conserved one passes
    bad = make_current(ctx, ["A1^2", "0", "0", "0"])
    good = make_current(ctx, ["A1_x1", "-A1_x0", "0", "0"])
    out = plane_wave_divergence({"bad": bad, "good": good}, ctx, waves, params)
    assert out["bad"] > 1e-2
    assert out["good"] < 1e-6
