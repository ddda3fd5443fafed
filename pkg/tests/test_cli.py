import json

import pytest

from jetnoether.cli import Options, main, run_command
from jetnoether.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_el_oscillator(capsys):
    code, out, _ = run(capsys, "el", "--model", "builtin:oscillator")
    assert code == 0
    assert out.strip() == "beta[y] = y + y_xx"


def test_noether_oscillator(capsys):
    code, out, _ = run(capsys, "noether", "--model", "builtin:oscillator", "--symmetry", "time-translation")
    assert code == 0
    assert "P[x] = -(1/2)*y^2 - (1/2)*y_x^2" in out
    assert "Q[y] = -y_x" in out and "residual = 0" in out


def test_noether_then_verify_current(capsys, tmp_path):
    for model, syms in (("oscillator", ["time-translation"]),
                        ("wave", ["time-translation", "space-translation", "shift"]),
                        ("free-particle", ["time-translation", "shift"])):
        for sym in syms:
            report = tmp_path / f"{model}-{sym}.json"
            code, _, _ = run(capsys, "noether", "--model", f"builtin:{model}", "--symmetry", sym,
                             "--json", str(report))
            assert code == 0
            code, out, _ = run(capsys, "verify-current", "--model", f"builtin:{model}",
                               "--current", str(report), "--json", "-")
            assert code == 0, out
            data = json.loads(out[out.index("{"):])
            assert data["certificate"]["residual"] == "0"
            assert data["roundtrip_residual"] == "0"


def test_inverse_then_noether(capsys, tmp_path):
    code, out, _ = run(capsys, "inverse-noether", "--model", "builtin:oscillator", "--current", "energy",
                       "--json", "-")
    assert code == 0
    data = json.loads(out[out.index("{"):])
    assert data["generator"]["xi"] == {"x": "1"}
    assert all(data["verification"].values())


def test_classify(capsys):
    expected = {("wave", "curl"): "second_kind", ("oscillator", "beta-multiple"): "first_kind",
                ("oscillator", "energy"): "nontrivial", ("wave", "beta-multiple"): "first_kind"}
    for (model, cur), kind in expected.items():
        code, out, _ = run(capsys, "classify", "--model", f"builtin:{model}", "--current", cur)
        assert code == 0 and out.splitlines()[0] == f"{cur}: {kind}"


def test_check_symmetry(capsys):
    code, out, _ = run(capsys, "check-symmetry", "--model", "builtin:free-particle")
    assert code == 0
    assert "scaling: not a symmetry" in out and "shift: symmetry" in out


def test_prolong_and_probe(capsys):
    code, out, _ = run(capsys, "prolong-system", "--model", "builtin:oscillator", "--k-prime", "3")
    assert code == 0
    assert out.splitlines() == ["D[-] beta[y] = y + y_xx", "D[x] beta[y] = y_x + y_xxx"]
    code, out, _ = run(capsys, "probe-rank", "--model", "builtin:oscillator")
    assert code == 0 and "submersion evidence: True" in out


def test_numeric_check(capsys):
    for model in ("oscillator", "wave", "free-particle"):
        code, out, _ = run(capsys, "numeric-check", "--model", f"builtin:{model}")
        assert code == 0, out
        assert "FAIL" not in out


@pytest.mark.parametrize("argv, code", [
    (["el", "--model", "builtin:nope"], 3),
    (["noether", "--model", "builtin:oscillator", "--symmetry", "boost"], 3),
    (["verify-current", "--model", "builtin:oscillator"], 3),
    (["verify-current", "--model", "builtin:free-particle", "--current", "energy", "--k-prime", "2",
      "--degree-bound", "1"], 0),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"independent": ["x"], "dependent": ["y"], "order": 2, "lagrangian": "y_x^^2"}))
    code, _, err = run(capsys, "el", "--model", str(bad))
    assert code == 2 and "lagrangian" in err


def test_solver_exhaustion_exit_code(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({
        "independent": ["x"], "dependent": ["y"], "order": 4, "lagrangian": "(1/2)*y_x^2 - (1/2)*y^2",
        "currents": [{"name": "bogus", "components": ["y^2"]}]}))
    code, _, err = run(capsys, "verify-current", "--model", str(model), "--current", "bogus")
    assert code == 4 and "bounds" in err


def test_verification_failure_exit_code(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(json.dumps({
        "independent": ["x"], "dependent": ["y"], "order": 4, "lagrangian": "(1/2)*y_x^2 - (1/2)*y^2",
        "currents": [{"name": "y", "components": ["y"]}],
        "scenario": {"kind": "ode", "initial": {"y": "1", "y_x": "0"}, "t_end": 2, "h": 0.01,
                     "tolerance": 1e-6}}))
    code, _, _ = run(capsys, "numeric-check", "--model", str(model), "--current", "y")
    assert code == 5


def test_reports_are_byte_stable(capsys):
    outs = [run(capsys, "cartan", "--model", "builtin:wave", "--json", "-")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_run_command_api(oscillator):
    rep = run_command(oscillator, "noether", Options(symmetry="time-translation"))
    assert rep.to_json()["current"]["components"] == ["-(1/2)*y^2 - (1/2)*y_x^2"]
    with pytest.raises(PreconditionError):
        run_command(oscillator, "bogus")
