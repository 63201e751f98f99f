"""Random critical sets -> maximal Blaschke products, with residuals and path-independence."""

import argparse
from dataclasses import dataclass

import numpy as np

from gcelab.blaschke import critical_points
from gcelab.heins import heins_solve, match_multisets


@dataclass
class Config:
    trials: int = 10
    max_points: int = 5
    rmax: float = 0.85
    seed: int = 0


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    for _ in range(cfg.trials):
        k = int(rng.integers(1, cfg.max_points + 1))
        C = rng.uniform(0, cfg.rmax, k) * np.exp(2j * np.pi * rng.uniform(size=k))
        B = heins_solve(C)
        via = rng.uniform(0, 0.5, k) * np.exp(2j * np.pi * rng.uniform(size=k))
        B2 = heins_solve(C, via=[via])
        d_crit = match_multisets(critical_points(B), C)[0]
        d_path = match_multisets(B.zeros_, B2.zeros_)[0]
        print(f"d={B.degree}  crit err {d_crit:.1e}  path gap {d_path:.1e}  zeros "
              + " ".join(f"{z.real:+.3f}{z.imag:+.3f}i" for z in B.zeros_))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--seed", type=int, default=Config.seed)
    a = ap.parse_args()
    main(Config(trials=a.trials, seed=a.seed))
