"""Grid refinement study for the closed-form problem H = 1, h = log(2R/(R^2-1))."""

import argparse
from dataclasses import asdict, dataclass

import numpy as np

from gcelab.grid import make_grid
from gcelab.holo import constant
from gcelab.solver import GceProblem, solve_gce


@dataclass
class Config:
    R: float = 2.0
    sizes: tuple = (8, 16, 32, 64, 128)
    refinement: float = 2.0


def run(cfg: Config):
    h = np.log(2 * cfg.R / (cfg.R**2 - 1))
    rows = []
    for n in cfg.sizes:
        g = make_grid(n, 2 * n, cfg.refinement)
        s = solve_gce(GceProblem(constant(1), h, g))
        err = np.max(np.abs(s.u.values - np.log(2 * cfg.R / (cfg.R**2 - np.abs(g.points) ** 2))))
        rows.append((n, err, s.iterations, s.weak_residual))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--R", type=float, default=Config.R)
    ap.add_argument("--refinement", type=float, default=Config.refinement)
    a = ap.parse_args()
    cfg = Config(R=a.R, refinement=a.refinement)
    print(asdict(cfg))
    print(f"{'n_r':>5} {'max err':>10} {'order':>6} {'newton':>6} {'weak':>10}")
    prev = None
    for n, err, it, weak in run(cfg):
        order = "" if prev is None else f"{np.log2(prev / err):6.2f}"
        print(f"{n:5d} {err:10.3e} {order:>6} {it:6d} {weak:10.3e}")
        prev = err
