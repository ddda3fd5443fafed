"""Energy drift of RK4 under step halving, in high precision.

Compares the linear oscillator (drift ~ h^5) with a quartic oscillator
(drift ~ h^4).  Usage: python scripts/convergence_study.py [--dps 40]
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass, field

from jetnoether.jet import JetContext
from jetnoether.noether import make_current
from jetnoether.numeric import rk4_drift
from jetnoether.variational import euler_lagrange


@dataclass
class StudyConfig:
    name: str
    lagrangian: str
    energy: str
    steps: list = field(default_factory=lambda: [0.01, 0.005, 0.0025, 0.00125])
    t_end: float = 10.0
    initial: dict = field(default_factory=lambda: {"y": 1, "y_x": 0})


STUDIES = [
    StudyConfig("linear", "(1/2)*y_x^2 - (1/2)*y^2", "(1/2)*y_x^2 + (1/2)*y^2"),
    StudyConfig("quartic", "(1/2)*y_x^2 - (1/4)*y^4", "(1/2)*y_x^2 + (1/4)*y^4"),
]


def run(cfg: StudyConfig, dps: int):
    ctx = JetContext(["x"], ["y"], 4)
    beta = euler_lagrange(ctx.parse(cfg.lagrangian))
    cur = {"E": make_current(ctx, [cfg.energy])}
    prev = None
    print(f"{cfg.name}: L = {cfg.lagrangian}")
    for h in cfg.steps:
        d = rk4_drift(beta, cur, cfg.initial, h, cfg.t_end, precision=dps)["E"]
        ratio = f"{float(prev / d):6.2f}" if prev else "     -"
        print(f"  h = {h:<8g} drift = {float(d):.4e}  ratio = {ratio}")
        prev = d


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dps", type=int, default=40)
    args = ap.parse_args()
    for cfg in STUDIES:
        run(cfg, args.dps)


if __name__ == "__main__":
    main()
