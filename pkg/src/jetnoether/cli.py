"""Command-line entry point: ``jetnoether <command> --model ...``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import JetError, PreconditionError, VerificationError
from .forms import basis, basis_name, lagrangian_part
from .models import Model, load_model
from .noether import (
    Certificate,
    Current,
    characteristic_certificate,
    classify_trivial,
    divergence,
    forward_noether,
    inverse_noether_for_lagrangian,
    make_current,
    recheck_certificate,
    verify_conservation,
)
from .numeric import (
    DriftEntry,
    DriftReport,
    leapfrog_divergence,
    plane_wave_divergence,
    rk4_drift,
    waves_from_scenario,
)
from .solver import SolverBounds
from .symmetry import is_weak_symmetry, prolong
from .variational import (
    euler_lagrange,
    is_poincare_cartan,
    poincare_cartan,
    prolonged_system,
    regularity_probe,
    sample_zero_set,
)

COMMANDS = ("el", "cartan", "check-symmetry", "noether", "verify-current", "classify",
            "inverse-noether", "prolong-system", "probe-rank", "numeric-check")


@dataclass
class Options:
    symmetry: str | None = None
    current: str | None = None
    k_prime: int | None = None
    degree_bound: int | None = None
    precision: int | None = None


@dataclass
class Report:
    command: str
    model: str
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def text(self) -> str:
        return "\n".join(self.lines)

    def to_json(self) -> dict:
        return {"command": self.command, "model": self.model, **self.data}


def _bounds(model: Model, opts: Options, order: int | None = None) -> SolverBounds:
    return SolverBounds(degree=opts.degree_bound or 4, order=order)


def _current_json(P: Current) -> dict:
    return {"components": [str(p) for p in P.components]}


def _generator_json(model: Model, g) -> dict:
    ctx = g.ctx
    out = {"xi": {n: str(e) for n, e in zip(ctx.independent, g.v_B)},
           "phi": {n: str(e) for n, e in zip(ctx.dependent, g.v)}}
    if g.denominator is not None:
        out["denominator"] = str(g.denominator)
    return out


def _resolve_current(model: Model, opts: Options, ctx=None) -> tuple:
    if not opts.current:
        raise PreconditionError("this command needs --current NAME")
    ctx = ctx or model.context
    if opts.current in model.currents:
        return opts.current, model.currents[opts.current]
    path = Path(opts.current)
    if path.exists():
        data = json.loads(path.read_text())
        comps = data.get("current", data).get("components")
        if comps is None:
            raise PreconditionError(f"{path} holds no current components")
        return path.name, make_current(ctx, comps)
    return opts.current, model.current(opts.current)


def _cert_lines(model: Model, cert: Certificate) -> list:
    ctx = model.context
    if not cert.multipliers:
        return ["certificate: (empty)"]
    lines = ["certificate:"]
    for j, I, q in cert.multipliers:
        suffix = "".join(ctx.independent[s] * I[s] for s in range(ctx.m))
        label = ctx.dependent[j] + (f",{suffix}" if suffix else "")
        lines.append(f"  Q[{label}] = {q}")
    lines.append(f"  residual = {cert.residual}")
    return lines


def _default_k_prime(model: Model, beta, opts: Options, target_order: int = 0) -> int:
    if opts.k_prime is not None:
        return opts.k_prime
    return min(max(beta.order, target_order), model.context.k)


# ---------------------------------------------------------------------------
# commands


def cmd_el(model: Model, opts: Options, rep: Report):
    beta = euler_lagrange(model.lagrangian)
    ctx = model.context
    comps = []
    for name, b in zip(ctx.dependent, beta.components):
        rep.lines.append(f"beta[{name}] = {b}")
        comps.append({"dependent": name, "expr": str(b)})
    rep.data.update(components=comps, order=beta.order)


def cmd_cartan(model: Model, opts: Options, rep: Report):
    alpha = poincare_cartan(model.lagrangian)
    beta = euler_lagrange(model.lagrangian)
    ok = is_poincare_cartan(alpha, beta)
    items = basis(model.context).items
    rep.lines.append(f"alpha = {alpha}")
    rep.lines.append(f"lagrangian part = {lagrangian_part(alpha)}")
    rep.lines.append(f"Poincaré–Cartan type: {ok}")
    rep.data.update(
        form=str(alpha),
        terms=[{"basis": [basis_name(model.context, items[b]) for b in w], "coeff": str(c)}
               for w, c in alpha.sorted_terms()],
        lagrangian_part=str(lagrangian_part(alpha)),
        is_poincare_cartan=ok,
    )


def _symmetry_names(model: Model, opts: Options) -> list:
    if opts.symmetry:
        model.symmetry(opts.symmetry)
        return [opts.symmetry]
    if not model.symmetries:
        raise PreconditionError("model declares no symmetries")
    return list(model.symmetries)


def cmd_check_symmetry(model: Model, opts: Options, rep: Report):
    alpha = poincare_cartan(model.lagrangian)
    beta = euler_lagrange(model.lagrangian)
    results = []
    for name in _symmetry_names(model, opts):
        X = prolong(model.symmetry(name))
        r = is_weak_symmetry(X, alpha, beta)
        rep.lines.append(f"{name}: {'symmetry' if r.verdict else 'not a symmetry'}")
        if r.residual_410.terms:
            rep.lines.append(f"  volume residual = {r.residual_410}")
        for e in r.residuals_49:
            rep.lines.append(f"  mixed-slot residual = {e}")
        results.append({"name": name, "verdict": r.verdict,
                        "residuals_43": [str(e) for e in r.residuals_43],
                        "residuals_49": [str(e) for e in r.residuals_49],
                        "residual_410": str(r.residual_410)})
    rep.data.update(results=results)


def cmd_noether(model: Model, opts: Options, rep: Report):
    alpha = poincare_cartan(model.lagrangian)
    beta = euler_lagrange(model.lagrangian)
    out = []
    for name in _symmetry_names(model, opts):
        g = model.symmetry(name)
        P = forward_noether(prolong(g), alpha, beta)
        sysk = prolonged_system(beta, _default_k_prime(model, beta, opts, divergence(P).order()))
        cert = characteristic_certificate(g, P, sysk)
        rep.lines.append(f"{name}:")
        for x, p in zip(model.context.independent, P.components):
            rep.lines.append(f"  P[{x}] = {p}")
        rep.lines.extend("  " + s for s in _cert_lines(model, cert))
        out.append({"name": name, "current": _current_json(P), "certificate": cert.to_json()})
    rep.data.update(results=out)
    if len(out) == 1:
        rep.data.update(current=out[0]["current"], certificate=out[0]["certificate"])


def cmd_verify_current(model: Model, opts: Options, rep: Report):
    beta = euler_lagrange(model.lagrangian)
    name, P = _resolve_current(model, opts)
    kp = _default_k_prime(model, beta, opts, divergence(P).order())
    sysk = prolonged_system(beta, kp)
    cert = verify_conservation(P, sysk, _bounds(model, opts, kp))
    # the emitted certificate must survive a text round trip
    again = recheck_certificate(Certificate.from_json(cert.to_json(), model.context), P, sysk)
    rep.lines.append(f"{name}: conserved (k' = {kp})")
    rep.lines.extend(_cert_lines(model, cert))
    rep.data.update(current=_current_json(P), k_prime=kp, certificate=cert.to_json(),
                    roundtrip_residual=str(again.residual))


def cmd_classify(model: Model, opts: Options, rep: Report):
    beta = euler_lagrange(model.lagrangian)
    name, P = _resolve_current(model, opts)
    kp = _default_k_prime(model, beta, opts, max(divergence(P).order(), P.order))
    sysk = prolonged_system(beta, kp)
    c = classify_trivial(P, sysk, _bounds(model, opts, kp))
    rep.lines.append(f"{name}: {c.kind.value}")
    if c.note:
        rep.lines.append(f"  note: {c.note}")
    rep.data.update(current=_current_json(P), k_prime=kp, classification=c.kind.value,
                    certificate=c.certificate.to_json() if c.certificate else None)


def cmd_inverse_noether(model: Model, opts: Options, rep: Report):
    name, P0 = _resolve_current(model, opts)
    run = inverse_noether_for_lagrangian(model.lagrangian, P0, opts.k_prime, _bounds(model, opts))
    res, ctx, k_o, k = run.result, run.context, run.k_o, run.context.k
    g = res.generator
    rep.lines.append(f"{name}: recovered generator (k_o = {k_o}, working order k = {k})")
    for x, e in zip(ctx.independent, g.v_B):
        rep.lines.append(f"  xi[{x}] = {e}")
    for y, e in zip(ctx.dependent, g.v):
        rep.lines.append(f"  phi[{y}] = {e}")
    if g.denominator is not None:
        rep.lines.append(f"  (all components divided by {g.denominator})")
    rep.lines.append(f"  trivial part z = {res.trivial_part}")
    rep.lines.append("  verification: " + ", ".join(f"{k}={v}" for k, v in res.verification.items()))
    rep.data.update(current=_current_json(P0), k_o=k_o, working_order=k,
                    generator=_generator_json(model, g), trivial_part=_current_json(res.trivial_part),
                    certificate=res.certificate.to_json(), verification=res.verification)


def cmd_prolong_system(model: Model, opts: Options, rep: Report):
    beta = euler_lagrange(model.lagrangian)
    kp = opts.k_prime if opts.k_prime is not None else min(beta.order + 1, model.context.k)
    sysk = prolonged_system(beta, kp)
    ctx = model.context
    gens = []
    for j, I, e in sysk.generators:
        suffix = "".join(ctx.independent[s] * I[s] for s in range(ctx.m))
        rep.lines.append(f"D[{suffix or '-'}] beta[{ctx.dependent[j]}] = {e}")
        gens.append({"j": j, "I": list(I), "expr": str(e)})
    rep.data.update(k_prime=kp, generators=gens)


def cmd_probe_rank(model: Model, opts: Options, rep: Report):
    beta = euler_lagrange(model.lagrangian)
    kp = opts.k_prime if opts.k_prime is not None else min(beta.order + 1, model.context.k)
    sysk = prolonged_system(beta, kp)
    params = (model.scenario or {}).get("params")
    samples = sample_zero_set(sysk, 5, seed=0, params=params)
    r = regularity_probe(sysk, samples, params=params)
    rep.lines.append(f"k' = {kp}, generators = {r.expected}")
    for s, p in enumerate(r.points):
        rep.lines.append(f"  sample {s}: rank {p.rank}{'' if p.full else ' (deficient)'}")
    rep.lines.append(f"submersion evidence: {r.verdict}")
    rep.data.update(k_prime=kp, expected=r.expected, ranks=[p.rank for p in r.points], verdict=r.verdict)


def _numeric_currents(model: Model, opts: Options) -> dict:
    if opts.current:
        name, P = _resolve_current(model, opts)
        return {name: P}
    out = dict(model.currents)
    alpha = poincare_cartan(model.lagrangian) if model.lagrangian.order <= 1 else None
    if alpha is not None:
        beta = euler_lagrange(model.lagrangian)
        for name, g in model.symmetries.items():
            X = prolong(g)
            if is_weak_symmetry(X, alpha, beta).verdict:
                out[f"noether:{name}"] = forward_noether(X, alpha, beta, check=False)
    return out


def cmd_numeric_check(model: Model, opts: Options, rep: Report):
    sc = model.scenario
    if not sc:
        raise PreconditionError(f"model {model.name!r} has no numeric scenario")
    beta = euler_lagrange(model.lagrangian)
    currents = _numeric_currents(model, opts)
    kind = sc.get("kind")
    tol = float(sc.get("tolerance", 1e-6))
    if kind == "ode":
        h = float(sc.get("h", 1e-3))
        drift = rk4_drift(beta, currents, sc.get("initial", {}), h, float(sc.get("t_end", 10)),
                          precision=opts.precision)
        report = DriftReport("max |P(t) - P(0)|", h, "rk4", 4)
    elif kind == "wave":
        drift = leapfrog_divergence(beta, currents, int(sc.get("grid", 256)), float(sc.get("cfl", 0.5)),
                                    float(sc.get("t_end", 1.0)), int(sc.get("mode", 1)))
        report = DriftReport("max discrete divergence", 2 * math.pi / int(sc.get("grid", 256)),
                             "leapfrog", 2)
    elif kind == "plane-wave":
        params = sc.get("params", {})
        h = float(sc.get("h", 1e-3))
        drift = plane_wave_divergence(currents, model.context, waves_from_scenario(sc), params,
                                      int(sc.get("samples", 8)), h, int(sc.get("seed", 0)))
        report = DriftReport("max centered divergence on a plane wave", h, "central-difference", 2)
    else:
        raise PreconditionError(f"unknown scenario kind {kind!r}")
    for name, v in drift.items():
        report.entries.append(DriftEntry(name, v, tol))
        rep.lines.append(f"{name}: {v:.3e} (tolerance {tol:.0e}) {'ok' if v <= tol else 'FAIL'}")
    rep.data.update(report=report.to_json(), ok=report.ok)
    if not report.ok:
        raise VerificationError("numeric drift exceeds tolerance", {e.name: e.ok for e in report.entries})


HANDLERS = {
    "el": cmd_el,
    "cartan": cmd_cartan,
    "check-symmetry": cmd_check_symmetry,
    "noether": cmd_noether,
    "verify-current": cmd_verify_current,
    "classify": cmd_classify,
    "inverse-noether": cmd_inverse_noether,
    "prolong-system": cmd_prolong_system,
    "probe-rank": cmd_probe_rank,
    "numeric-check": cmd_numeric_check,
}


def run_command(model: Model, command: str, options: Options | None = None) -> Report:
    if command not in HANDLERS:
        raise PreconditionError(f"unknown command {command!r}")
    rep = Report(command, model.name)
    HANDLERS[command](model, options or Options(), rep)
    return rep


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jetnoether", description="Noether correspondence on jet spaces.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", required=True, help="model file or builtin:NAME")
    p.add_argument("--symmetry", help="declared symmetry name")
    p.add_argument("--current", help="declared current name or a JSON report holding a current")
    p.add_argument("--k-prime", type=int, help="prolongation order (k_o for inverse-noether)")
    p.add_argument("--degree-bound", type=int, help="multiplier degree bound (default 4)")
    p.add_argument("--precision", type=int, help="decimal digits for the ODE integrator (default float64)")
    p.add_argument("--json", help="write the machine-readable report here ('-' for stdout)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    opts = Options(args.symmetry, args.current, args.k_prime, args.degree_bound, args.precision)
    rep = None
    try:
        model = load_model(args.model)
        rep = Report(args.command, model.name)
        HANDLERS[args.command](model, opts, rep)
        code = 0
    except JetError as exc:
        if rep is not None and rep.lines:
            print(rep.text())
        print(f"error: {exc}", file=sys.stderr)
        if rep is not None:
            rep.data.update(error={"type": type(exc).__name__, "message": str(exc)})
        code = exc.exit_code
    else:
        print(rep.text())
    if args.json and rep is not None:
        text = json.dumps(rep.to_json(), indent=2, sort_keys=True, ensure_ascii=False)
        if args.json == "-":
            print(text)
        else:
            Path(args.json).write_text(text + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
