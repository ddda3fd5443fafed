"""Model files and the built-in examples."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import JetError, ParseError, PreconditionError
from .expr import parse_expr
from .jet import JetContext
from .noether import Current
from .symmetry import Generator
from .variational import Lagrangian

OSCILLATOR = """{
  "name": "oscillator",
  "independent": ["x"],
  "dependent": ["y"],
  "order": 4,
  "parameters": [],
  "lagrangian": "(1/2)*y_x^2 - (1/2)*y^2",
  "symmetries": [
    {"name": "time-translation", "xi": {"x": "1"}, "phi": {}}
  ],
  "currents": [
    {"name": "energy", "components": ["-(1/2)*y_x^2 - (1/2)*y^2"]},
    {"name": "beta-multiple", "components": ["y + y_xx"]},
    {"name": "zero", "components": ["0"]}
  ],
  "scenario": {
    "kind": "ode",
    "initial": {"y": "1", "y_x": "0"},
    "t_end": 10,
    "h": 0.001,
    "tolerance": 1e-06
  }
}
"""

FREE_PARTICLE = """{
  "name": "free-particle",
  "independent": ["x"],
  "dependent": ["y"],
  "order": 4,
  "parameters": [],
  "lagrangian": "(1/2)*y_x^2",
  "symmetries": [
    {"name": "time-translation", "xi": {"x": "1"}, "phi": {}},
    {"name": "shift", "xi": {}, "phi": {"y": "1"}},
    {"name": "scaling", "xi": {}, "phi": {"y": "y"}}
  ],
  "currents": [
    {"name": "momentum", "components": ["y_x"]},
    {"name": "energy", "components": ["-(1/2)*y_x^2"]}
  ],
  "scenario": {
    "kind": "ode",
    "initial": {"y": "0", "y_x": "1"},
    "t_end": 10,
    "h": 0.001,
    "tolerance": 1e-06
  }
}
"""

WAVE = """{
  "name": "wave",
  "independent": ["t", "x"],
  "dependent": ["u"],
  "order": 4,
  "parameters": [],
  "lagrangian": "(1/2)*u_t^2 - (1/2)*u_x^2",
  "symmetries": [
    {"name": "time-translation", "xi": {"t": "1"}, "phi": {}},
    {"name": "space-translation", "xi": {"x": "1"}, "phi": {}},
    {"name": "shift", "xi": {}, "phi": {"u": "1"}}
  ],
  "currents": [
    {"name": "energy", "components": ["(1/2)*u_t^2 + (1/2)*u_x^2", "-u_t*u_x"]},
    {"name": "curl", "components": ["u_x", "-u_t"]},
    {"name": "beta-multiple", "components": ["u_tt - u_xx", "0"]}
  ],
  "scenario": {
    "kind": "wave",
    "grid": 256,
    "cfl": 0.5,
    "t_end": 1.0,
    "mode": 1,
    "tolerance": 0.001
  }
}
"""

MAXWELL = """{
  "name": "maxwell",
  "independent": ["x0", "x1", "x2", "x3"],
  "dependent": ["A0", "A1", "A2", "A3"],
  "order": 2,
  "parameters": ["c", "pi"],
  "lagrangian": "-1/(16*pi*c)*(-2*(A1_x0 - A0_x1)^2 - 2*(A2_x0 - A0_x2)^2 - 2*(A3_x0 - A0_x3)^2 + 2*(A2_x1 - A1_x2)^2 + 2*(A3_x1 - A1_x3)^2 + 2*(A3_x2 - A2_x3)^2)",
  "symmetries": [
    {"name": "translation-0", "xi": {"x0": "1"}, "phi": {"A0": "A0_x0", "A1": "A0_x1", "A2": "A0_x2", "A3": "A0_x3"}},
    {"name": "translation-1", "xi": {"x1": "1"}, "phi": {"A0": "A1_x0", "A1": "A1_x1", "A2": "A1_x2", "A3": "A1_x3"}},
    {"name": "translation-2", "xi": {"x2": "1"}, "phi": {"A0": "A2_x0", "A1": "A2_x1", "A2": "A2_x2", "A3": "A2_x3"}},
    {"name": "translation-3", "xi": {"x3": "1"}, "phi": {"A0": "A3_x0", "A1": "A3_x1", "A2": "A3_x2", "A3": "A3_x3"}}
  ],
  "currents": [],
  "scenario": {
    "kind": "plane-wave",
    "params": {"c": 1, "pi": 3.141592653589793},
    "waves": [
      {"covector": [1, 0, 0, 1], "polarization": [0, 1, 0, 0], "amplitude": 1.0, "phase": 0.0},
      {"covector": [2, 2, 0, 0], "polarization": [0, 0, 0, 1], "amplitude": 0.5, "phase": 0.3},
      {"covector": [1, 0.6, 0.8, 0], "polarization": [0, 0, 0, 1], "amplitude": 0.7, "phase": 1.1}
    ],
    "samples": 8,
    "h": 0.001,
    "seed": 0,
    "tolerance": 0.001
  }
}
"""

BUILTINS = {
    "oscillator": OSCILLATOR,
    "free-particle": FREE_PARTICLE,
    "wave": WAVE,
    "maxwell": MAXWELL,
}


@dataclass
class Model:
    name: str
    context: JetContext
    lagrangian: Lagrangian
    symmetries: dict = field(default_factory=dict)
    currents: dict = field(default_factory=dict)
    scenario: dict | None = None

    def symmetry(self, name: str) -> Generator:
        try:
            return self.symmetries[name]
        except KeyError:
            raise PreconditionError(
                f"model {self.name!r} has no symmetry {name!r} (known: {', '.join(self.symmetries) or 'none'})"
            ) from None

    def current(self, name: str) -> Current:
        try:
            return self.currents[name]
        except KeyError:
            raise PreconditionError(
                f"model {self.name!r} has no current {name!r} (known: {', '.join(self.currents) or 'none'})"
            ) from None


def _field_error(path: str, exc: Exception) -> ParseError:
    msg = exc.args[0] if exc.args else str(exc)
    return ParseError(f"{path}: {msg}")


def _expr(text, ctx, path):
    if not isinstance(text, str):
        raise ParseError(f"{path}: expected an expression string")
    try:
        return parse_expr(text, ctx)
    except ParseError as exc:
        raise _field_error(path, exc) from None


def model_from_dict(data: dict, name: str = "model") -> Model:
    if not isinstance(data, dict):
        raise ParseError("model: expected a JSON object")
    for key in ("independent", "dependent", "order", "lagrangian"):
        if key not in data:
            raise ParseError(f"{key}: missing field")
    try:
        ctx = JetContext(data["independent"], data["dependent"], data["order"], data.get("parameters", []))
    except JetError as exc:
        raise _field_error("context", exc) from None
    except TypeError as exc:
        raise _field_error("context", exc) from None
    L = Lagrangian(_expr(data["lagrangian"], ctx, "lagrangian"))
    if L.order > ctx.k:
        raise ParseError("lagrangian: order exceeds the jet order")
    syms = {}
    for s, item in enumerate(data.get("symmetries", [])):
        path = f"symmetries[{s}]"
        sname = item.get("name") if isinstance(item, dict) else None
        if not sname:
            raise ParseError(f"{path}.name: missing")
        xi, phi = item.get("xi", {}), item.get("phi", {})
        for key in xi:
            if key not in ctx.independent:
                raise ParseError(f"{path}.xi.{key}: not an independent variable")
        for key in phi:
            if key not in ctx.dependent:
                raise ParseError(f"{path}.phi.{key}: not a dependent variable")
        v_B = tuple(_expr(xi[n], ctx, f"{path}.xi.{n}") if n in xi else ctx.zero() for n in ctx.independent)
        v = tuple(_expr(phi[n], ctx, f"{path}.phi.{n}") if n in phi else ctx.zero() for n in ctx.dependent)
        syms[sname] = Generator(v_B, v)
    currents = {}
    for s, item in enumerate(data.get("currents", [])):
        path = f"currents[{s}]"
        cname = item.get("name") if isinstance(item, dict) else None
        if not cname:
            raise ParseError(f"{path}.name: missing")
        comps = item.get("components", [])
        if len(comps) != ctx.m:
            raise ParseError(f"{path}.components: expected {ctx.m} entries, got {len(comps)}")
        currents[cname] = Current(tuple(_expr(c, ctx, f"{path}.components[{i}]") for i, c in enumerate(comps)))
    return Model(data.get("name", name), ctx, L, syms, currents, data.get("scenario"))


def load_model(source: str) -> Model:
    """``builtin:NAME`` or a path to a JSON model file."""
    if source.startswith("builtin:"):
        key = source.split(":", 1)[1]
        if key not in BUILTINS:
            raise PreconditionError(f"unknown builtin model {key!r} (known: {', '.join(BUILTINS)})")
        text, name = BUILTINS[key], key
    else:
        path = Path(source)
        if not path.exists():
            raise PreconditionError(f"model file {source} does not exist")
        text, name = path.read_text(), path.stem
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"model: invalid JSON ({exc.msg})", exc.pos) from None
    return model_from_dict(data, name)
