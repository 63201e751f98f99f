"""Property suites behind ``gcelab verify``; each check returns a pass flag and the measured value."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .blaschke import (
    BlaschkeDerivative,
    BlaschkeProduct,
    MobiusDisk,
    critical_points,
    discrete_curvature,
    mobius_apply,
    normalize,
    pullback,
)
from .canonical import (
    boundary_growth_probe,
    canonical_solution,
    compact_residual,
    maximal_solution,
)
from .grid import ScalarField, make_grid
from .heins import bruteforce_degree_two, heins_solve, match_multisets
from .holo import Polynomial, constant
from .liouville import holomorphy_residual, liouville_extract
from .potential import (
    BlaschkeMeasureSpec,
    green_potential,
    littlewood_paley,
    outer_function,
    poisson_extend,
)
from .solver import GceProblem, check_comparison, picard_iterates, solve_gce


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    value: float
    threshold: float
    seconds: float

    def row(self) -> dict:
        return dict(self.__dict__)


SUITES: dict[str, list[tuple[str, Callable]]] = {"disk": [], "blaschke": [], "gce": [], "canonical": []}


def check(suite: str, name: str):
    def deco(fn):
        SUITES[suite].append((name, fn))
        return fn

    return deco


def random_disk_points(rng, n, rmax=0.9):
    return rng.uniform(0, rmax, n) * np.exp(2j * np.pi * rng.uniform(size=n))


def random_blaschke(rng, dmax=3, rmax=0.9) -> BlaschkeProduct:
    d = int(rng.integers(1, dmax + 1))
    return BlaschkeProduct(tuple(random_disk_points(rng, d, rmax)), float(rng.uniform(0, 2 * np.pi)))


def random_poly(rng, deg, size=1.0) -> Polynomial:
    c = random_disk_points(rng, deg + 1, 1.0)
    c = c * size / max(np.sum(np.abs(c)), 1e-12)
    if np.all(c == 0):
        c[0] = size
    return Polynomial(tuple(c))


# -- disk -------------------------------------------------------------------------


@check("disk", "quadrature r^k, k <= 8")
def _(rng):
    g = make_grid(64, 128, 2.0)
    r = np.abs(g.points)
    err = max(abs(g.integrate(r**k) / (2 * np.pi / (k + 2)) - 1) for k in range(9))
    return err, 1e-4


@check("disk", "harmonic extension of cos 2t")
def _(rng):
    g = make_grid(64, 128, 2.0)
    P = poisson_extend(lambda z: np.cos(2 * np.angle(z)), g)
    return float(np.max(np.abs(P.values - (g.points**2).real))), 1e-4


@check("disk", "Green potential of area measure")
def _(rng):
    g = make_grid(64, 128, 2.0)
    G = green_potential(BlaschkeMeasureSpec(lambda z: np.ones(np.shape(z))), g)
    return float(np.max(np.abs(G.values - (1 - np.abs(g.points) ** 2) / 4))), 1e-3


@check("disk", "Green potential linearity and sign")
def _(rng):
    g = make_grid(64, 128, 2.0)
    d1 = ScalarField(g, rng.uniform(0, 2, g.shape))
    d2 = ScalarField(g, rng.uniform(0, 2, g.shape))
    a, b = rng.uniform(0, 3, 2)
    G1 = green_potential(BlaschkeMeasureSpec(d1), g)
    G2 = green_potential(BlaschkeMeasureSpec(d2), g)
    G12 = green_potential(BlaschkeMeasureSpec(d1 * a + d2 * b), g)
    lin = float(np.max(np.abs(G12.values - a * G1.values - b * G2.values)))
    ok_sign = min(G1.values.min(), G2.values.min()) >= 0
    return (lin if ok_sign else np.inf), 1e-12


@check("disk", "Littlewood-Paley, random degree <= 8")
def _(rng):
    g = make_grid(128, 256, 2.0)
    worst = 0.0
    for _ in range(50):
        f = random_poly(rng, int(rng.integers(0, 9)), rng.uniform(0.5, 5))
        lhs, rhs = littlewood_paley(f, g)
        worst = max(worst, abs(lhs - rhs) / lhs)
    return worst, 1e-3


@check("disk", "outer multiplicativity")
def _(rng):
    g = make_grid(64, 128, 2.0)
    p1, p2 = random_poly(rng, 3, 0.5), random_poly(rng, 3, 0.5)
    w1 = lambda z: np.abs(1.0 + p1(z))  # noqa: E731
    w2 = lambda z: np.abs(2.0 + p2(z))  # noqa: E731
    O1, O2 = outer_function(w1, g), outer_function(w2, g)
    O12 = outer_function(lambda z: w1(z) * w2(z), g)
    ratio = O12(g.points) / (O1(g.points) * O2(g.points))
    return float(np.max(np.abs(ratio - ratio.flat[0]))), 1e-4


# -- blaschke ------------------------------------------------------------------


@check("blaschke", "unimodularity on the circle")
def _(rng):
    g = make_grid(16, 256, 1.0)
    worst = 0.0
    for _ in range(50):
        B = random_blaschke(rng, 6, 0.95)
        worst = max(worst, float(np.max(np.abs(np.abs(B(g.boundary_points)) - 1))))
    return worst, 1e-10


@check("blaschke", "critical count = degree - 1")
def _(rng):
    bad = 0
    for _ in range(50):
        B = random_blaschke(rng, 6)
        bad += len(critical_points(B)) != B.degree - 1
    return float(bad), 0.0


@check("blaschke", "aut(D)-invariance of critical sets")
def _(rng):
    worst = 0.0
    for _ in range(100):
        B = random_blaschke(rng, 3)
        m = MobiusDisk(complex(random_disk_points(rng, 1)[0]), float(rng.uniform(0, 2 * np.pi)))
        dist, _ = match_multisets(critical_points(B), critical_points(mobius_apply(m, B)))
        worst = max(worst, dist)
    return worst, 1e-8


@check("blaschke", "curvature -1 away from critical points")
def _(rng):
    g = make_grid(128, 256, 1.0)
    worst = 0.0
    for _ in range(30):
        B = random_blaschke(rng, 3)
        K = discrete_curvature(pullback(B, g))
        cp = critical_points(B)
        d = np.min(np.abs(g.points[..., None] - cp), axis=-1) if len(cp) else np.full(g.shape, np.inf)
        mask = (d >= 0.1) & (np.abs(g.points) <= 0.9)
        worst = max(worst, float(np.max(np.abs(K[mask] + 1))))
    return worst, 0.05


@check("blaschke", "Schwarz-Pick")
def _(rng):
    g = make_grid(32, 64, 2.0)
    u_disk = np.log(2 / (1 - np.abs(g.points) ** 2))
    excess = max(float(np.max(pullback(random_blaschke(rng, 4), g).u_field.values - u_disk)) for _ in range(20))
    # automorphisms attain equality, so only round-off may show
    return max(excess, 0.0), 1e-9


# -- gce -----------------------------------------------------------------------


@check("gce", "closed form R in {1.5, 2, 3}")
def _(rng):
    g = make_grid(64, 128, 2.0)
    worst = 0.0
    for R in (1.5, 2.0, 3.0):
        s = solve_gce(GceProblem(constant(1), np.log(2 * R / (R * R - 1)), g))
        ex = np.log(2 * R / (R * R - np.abs(g.points) ** 2))
        worst = max(worst, float(np.max(np.abs(s.u.values - ex))) if s.converged else np.inf)
    return worst, 1e-3


@check("gce", "uniqueness from two initializations")
def _(rng):
    g = make_grid(32, 64, 2.0)
    worst = 0.0
    for _ in range(20):
        pb = GceProblem(random_poly(rng, int(rng.integers(0, 4))), float(rng.uniform(-2, 2)), g)
        a = solve_gce(pb)
        b = solve_gce(pb, init=pb.harmonic_majorant() - 5.0)
        worst = max(worst, a.u.max_abs_diff(b.u) if a.converged and b.converged else np.inf)
    return worst, 1e-8


@check("gce", "monotonicity in h and comparison")
def _(rng):
    g = make_grid(32, 64, 2.0)
    violations = 0
    for _ in range(20):
        H = random_poly(rng, int(rng.integers(0, 4)))
        h1 = rng.uniform(-2, 2)
        h2 = h1 + rng.uniform(0, 1)
        pb1, pb2 = GceProblem(H, h1, g), GceProblem(H, h2, g)
        u1, u2 = solve_gce(pb1).u, solve_gce(pb2).u
        violations += len(check_comparison(u1, u2, pb2, eps=1e-6).violations)
    return float(violations), 0.0


@check("gce", "majorant u <= P_h")
def _(rng):
    g = make_grid(32, 64, 2.0)
    worst = -np.inf
    for _ in range(10):
        h = lambda z, c=rng.uniform(-1, 1, 3): c[0] + c[1] * z.real + c[2] * z.imag  # noqa: E731
        pb = GceProblem(random_poly(rng, 2), h, g)
        s = solve_gce(pb)
        worst = max(worst, float(np.max(s.u.values - pb.harmonic_majorant().values)))
    return max(worst, 0.0), 1e-12


@check("gce", "Picard iterates sandwich Newton")
def _(rng):
    g = make_grid(64, 128, 2.0)
    worst = 0.0
    for _ in range(8):
        pb = GceProblem(random_poly(rng, int(rng.integers(0, 3)), 0.5), float(rng.uniform(-1, 1)), g)
        u = solve_gce(pb).u.values
        its = picard_iterates(pb, 50)
        lo = np.minimum(its[-1].values, its[-2].values)
        hi = np.maximum(its[-1].values, its[-2].values)
        worst = max(worst, float(np.max(hi - lo)), float(np.max(lo - u)), float(np.max(u - hi)))
    return worst, 1e-3


@check("gce", "scaling symmetry")
def _(rng):
    g = make_grid(32, 64, 2.0)
    H = random_poly(rng, 2)
    c = float(rng.uniform(0.5, 3))
    h = float(rng.uniform(-1, 1))
    u1 = solve_gce(GceProblem(H, h, g)).u
    u2 = solve_gce(GceProblem(Polynomial(tuple(c * x for x in H.coeffs)), h - np.log(c), g)).u
    return float(np.max(np.abs(u2.values + np.log(c) - u1.values))), 1e-8


# -- canonical ---------------------------------------------------------------------


@check("canonical", "canonical limit for H = 1 and H = 2z")
def _(rng):
    g = make_grid(64, 128, 2.0)
    worst = 0.0
    for H, ex in ((constant(1), lambda z: np.log(2 / (1 - np.abs(z) ** 2))),
                  (Polynomial((0, 2)), lambda z: np.log(2 / (1 - np.abs(z) ** 4)))):
        R = canonical_solution(H, 0.8, grid=g, extract=False)
        err = float(np.max(np.abs(R.u_infinity.values - ex(g.points))[R.compact]))
        worst = max(worst, err if R.monotone else np.inf)
    return worst, 1e-2


@check("canonical", "Heins critical sets")
def _(rng):
    sets = [[0], [0.4], [0.3j], [0.2, -0.3]] + [list(random_disk_points(rng, int(rng.integers(1, 4)), 0.8)) for _ in range(6)]
    return max(match_multisets(critical_points(heins_solve(C)), C)[0] for C in sets), 1e-6


@check("canonical", "Heins d = 2 against brute force")
def _(rng):
    worst = 0.0
    for c in [0.4, 0.3j] + list(random_disk_points(rng, 4, 0.8)):
        a = [z for z in heins_solve([c]).zeros_ if abs(z) > 1e-12][0]
        worst = max(worst, abs(a - bruteforce_degree_two(c)))
    return worst, 1e-8


@check("canonical", "Liouville round trip")
def _(rng):
    g = make_grid(64, 128, 1.0)
    worst = 0.0
    ratio = np.inf
    for _ in range(20):
        B = random_blaschke(rng, 3)
        H = BlaschkeDerivative(B)
        u = pullback(B, g, H).u_field
        L = liouville_extract(u, H, 0.7, recognize=False)
        worst = max(worst, L.sup_distance(normalize(B)[0]))
        bump = 0.05 * np.exp(-4 * np.abs(g.points - 0.3) ** 2)
        ratio = min(ratio, holomorphy_residual(ScalarField(g, u.values + bump), H, 0.7) / L.cr_residual)
    return (worst if ratio >= 100 else np.inf), 1e-3


@check("canonical", "maximal domination")
def _(rng):
    g = make_grid(64, 128, 2.0)
    worst = -np.inf
    for H in (constant(1), Polynomial((0, 1)), Polynomial((0, -0.5, 1))):
        um, _ = maximal_solution(H, g)
        u0 = solve_gce(GceProblem(H, 0.0, g)).u
        worst = max(worst, float(np.max(u0.values - um.values)))
    return max(worst, 0.0), 1e-6


@check("canonical", "maximal solution solves the equation on |z| <= 0.8")
def _(rng):
    g = make_grid(64, 128, 2.0)
    worst = 0.0
    for H in (Polynomial((0, 1)), Polynomial(tuple(np.poly(random_disk_points(rng, 2, 0.7))[::-1]))):
        um, _ = maximal_solution(H, g)
        worst = max(worst, compact_residual(um, H, 0.8))
    return worst, 1e-3


@check("canonical", "boundary growth for H = z - 2")
def _(rng):
    rep = boundary_growth_probe(Polynomial((-2, 1)))
    margin = -min(rep.edge_margin)
    return (margin if rep.strictly_increasing and min(rep.representation_gap) > -1e-6 else np.inf), 0.1


def run_suite(name: str = "all", seed: int = 0, progress: Callable[[CheckResult], None] | None = None) -> list[CheckResult]:
    names = list(SUITES) if name == "all" else [name]
    for n in names:
        if n not in SUITES:
            raise ValueError(f"unknown suite {n!r}")
    out = []
    for si, suite in enumerate(names):
        for ci, (cname, fn) in enumerate(SUITES[suite]):
            rng = np.random.default_rng([seed, si, ci])
            t = time.perf_counter()
            try:
                value, thr = fn(rng)
                passed = bool(np.isfinite(value) and value <= thr)
            except Exception as exc:  # a crashing check is a failing check
                value, thr, passed = np.inf, np.nan, False
                cname = f"{cname} ({type(exc).__name__}: {exc})"
            res = CheckResult(suite, cname, passed, float(value), float(thr), time.perf_counter() - t)
            out.append(res)
            if progress:
                progress(res)
    return out

