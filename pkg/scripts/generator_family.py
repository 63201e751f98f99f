"""H_r = 2r I0' / Out(1 - |r I0|^2) as r -> 1, for a strict self-map I0 and for an inner I0."""

from dataclasses import dataclass

import numpy as np

from gcelab.blaschke import BlaschkeDerivative, BlaschkeProduct
from gcelab.canonical import generator_distance, generator_limit
from gcelab.grid import make_grid
from gcelab.holo import Polynomial


@dataclass
class Config:
    rs: tuple = (0.5, 0.7, 0.9, 0.97, 0.99)


def main(cfg: Config):
    g = make_grid(64, 128, 2.0)
    strict = Polynomial((0.1, 0.5, 0.3))
    d = generator_distance(strict, cfg.rs, generator_limit(strict, g), g)
    print("strict I0 = 0.1 + 0.5z + 0.3z^2, distance to the r = 1 member:")
    for r, x in zip(cfg.rs, d):
        print(f"  r = {r:.2f}  {x:.4e}")
    inner = BlaschkeProduct((0.0, 0.5), 0.0)
    d = generator_distance(inner, cfg.rs, BlaschkeDerivative(inner), g)
    print("inner I0 = z(z-0.5)/(1-0.5z), distance to c I0' (grows: the weight blows up at the circle):")
    for r, x in zip(cfg.rs, d):
        print(f"  r = {r:.2f}  {x:.4e}")


if __name__ == "__main__":
    main(Config())
