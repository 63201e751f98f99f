"""Ladder values near the circle for H analytic past the circle (default H = z - 2)."""

import argparse
from dataclasses import dataclass

from gcelab.canonical import boundary_growth_probe
from gcelab.grid import make_grid
from gcelab.holo import Polynomial
from gcelab.io import parse_complex_list


@dataclass
class Config:
    coeffs: str = "-2,1"
    n_max: int = 6
    refinement: float = 3.0
    probe_radius: float = 0.95


def main(cfg: Config):
    H = Polynomial(tuple(parse_complex_list(cfg.coeffs)))
    rep = boundary_growth_probe(
        H, tuple(range(cfg.n_max + 1)), grid=make_grid(64, 128, cfg.refinement), probe_radius=cfg.probe_radius
    )
    print(f"probe ring r = {rep.probe_radius:.4f}")
    print(f"{'n':>3} {'u_n(probe)':>11} {'edge u_n-n':>11} {'repr. gap':>10} {'max u_n-n':>10}")
    for row in zip(rep.n_values, rep.probe_values, rep.edge_margin, rep.representation_gap, rep.interior_excess):
        print("%3d %11.4f %11.4f %10.2e %10.4f" % row)
    print("strictly increasing:", rep.strictly_increasing)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--coeffs", default=Config.coeffs)
    ap.add_argument("--n-max", type=int, default=Config.n_max)
    ap.add_argument("--probe-radius", type=float, default=Config.probe_radius)
    a = ap.parse_args()
    main(Config(coeffs=a.coeffs, n_max=a.n_max, probe_radius=a.probe_radius))
