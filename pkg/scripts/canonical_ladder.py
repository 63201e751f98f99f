"""Run the n-ladder for a polynomial H and report increments, tail band and the extracted map."""

import argparse
from dataclasses import dataclass

import numpy as np

from gcelab.canonical import canonical_solution, canonical_vs_maximal
from gcelab.grid import make_grid
from gcelab.holo import Polynomial
from gcelab.io import parse_complex_list


@dataclass
class Config:
    coeffs: str = "0,2"  # ascending, complex literals
    rho: float = 0.8
    n_r: int = 64
    n_theta: int = 128
    compare: bool = True


def main(cfg: Config):
    H = Polynomial(tuple(parse_complex_list(cfg.coeffs)))
    g = make_grid(cfg.n_r, cfg.n_theta, 2.0)
    R = canonical_solution(H, cfg.rho, grid=g)
    print("levels      ", R.n_values)
    print("increments  ", ["%.2e" % x for x in R.increments])
    print("monotone    ", R.monotone, " converged on compact", R.converged_on_compact)
    print("tail band   ", "%.2e" % float(np.max(R.uncertainty[R.compact])))
    if R.liouville is not None:
        L = R.liouville
        print("cr residual ", "%.2e" % L.cr_residual, " density error %.2e" % L.density_error)
        print("recognized  ", None if L.blaschke is None else L.blaschke.to_dict())
        print("mean |I| by ring (every 8th):", [round(p[2], 4) for p in L.inner_profile[::8]])
    if cfg.compare:
        cmp = canonical_vs_maximal(H, cfg.rho, g)
        print("vs maximal   gap %.2e  density gap %.2e  coincide %s" % (cmp.gap, cmp.density_gap, cmp.coincide))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--coeffs", default=Config.coeffs)
    ap.add_argument("--rho", type=float, default=Config.rho)
    a = ap.parse_args()
    main(Config(coeffs=a.coeffs, rho=a.rho))
