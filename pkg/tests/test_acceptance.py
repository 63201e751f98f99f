"""One pass/fail line per acceptance criterion, at the stated tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also printed with capture disabled.
"""

import time

import numpy as np
import pytest

from gcelab.blaschke import BlaschkeDerivative, BlaschkeProduct, critical_points, normalize, pullback
from gcelab.canonical import boundary_growth_probe, canonical_solution, maximal_solution
from gcelab.cli import main
from gcelab.grid import ScalarField, make_grid
from gcelab.heins import bruteforce_degree_two, heins_solve, match_multisets
from gcelab.holo import Polynomial, constant
from gcelab.liouville import holomorphy_residual, liouville_extract
from gcelab.potential import littlewood_paley
from gcelab.solver import GceProblem, check_comparison, picard_iterates, solve_gce
from gcelab.verify import random_blaschke, random_disk_points, random_poly

SEED = 20261018


def line(capsys, k, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {k}] {'PASS' if ok else 'FAIL'}: {detail}")


@pytest.fixture(scope="module")
def grid():
    return make_grid(64, 128, 2.0)


def test_c1_closed_form(grid, capsys):
    worst, slowest = 0.0, 0.0
    for R in (1.5, 2.0, 3.0):
        t = time.perf_counter()
        s = solve_gce(GceProblem(constant(1), np.log(2 * R / (R * R - 1)), grid))
        slowest = max(slowest, time.perf_counter() - t)
        assert s.converged
        worst = max(worst, float(np.max(np.abs(s.u.values - np.log(2 * R / (R * R - np.abs(grid.points) ** 2))))))
    ok = worst <= 1e-3 and slowest <= 10
    line(capsys, 1, ok, f"max error {worst:.2e} (<= 1e-3), slowest solve {slowest:.2f}s (<= 10s)")
    assert ok


def test_c2_uniqueness_and_monotonicity(capsys):
    rng = np.random.default_rng([SEED, 2])
    g = make_grid(32, 64, 2.0)
    spread, violations = 0.0, 0
    for _ in range(20):
        pb = GceProblem(random_poly(rng, int(rng.integers(0, 4))), float(rng.uniform(-2, 2)), g)
        a, b = solve_gce(pb), solve_gce(pb, init=pb.harmonic_majorant() - 5.0)
        spread = max(spread, a.u.max_abs_diff(b.u))
    for _ in range(20):
        H = random_poly(rng, int(rng.integers(0, 4)))
        h1 = float(rng.uniform(-2, 2))
        h2 = h1 + float(rng.uniform(0, 1))
        pb2 = GceProblem(H, h2, g)
        u1, u2 = solve_gce(GceProblem(H, h1, g)).u, solve_gce(pb2).u
        violations += len(check_comparison(u1, u2, pb2, eps=1e-6).violations)
    ok = spread <= 1e-8 and violations == 0
    line(capsys, 2, ok, f"uniqueness spread {spread:.2e} (<= 1e-8), monotonicity violations {violations}")
    assert ok


def test_c3_littlewood_paley(capsys):
    rng = np.random.default_rng([SEED, 3])
    g = make_grid(128, 256, 2.0)
    worst = 0.0
    for _ in range(50):
        f = random_poly(rng, int(rng.integers(0, 9)), float(rng.uniform(0.5, 5)))
        lhs, rhs = littlewood_paley(f, g)
        worst = max(worst, abs(lhs - rhs) / lhs)
    ok = worst <= 1e-3
    line(capsys, 3, ok, f"worst relative gap {worst:.2e} over 50 polynomials (<= 1e-3)")
    assert ok


def test_c4_canonical_limit(grid, capsys):
    errs, mono = [], True
    for H, exact in (
        (constant(1), lambda z: np.log(2 / (1 - np.abs(z) ** 2))),
        (Polynomial((0, 2)), lambda z: np.log(2 / (1 - np.abs(z) ** 4))),
    ):
        R = canonical_solution(H, 0.8, n_max=8, grid=grid, extract=False)
        mono &= R.monotone
        errs.append(float(np.max(np.abs(R.u_infinity.values - exact(grid.points))[R.compact])))
    ok = mono and max(errs) <= 1e-2
    line(capsys, 4, ok, f"ladder monotone {mono}; errors H=1 {errs[0]:.2e}, H=2z {errs[1]:.2e} (<= 1e-2)")
    assert ok


def test_c5_heins(capsys):
    crit = 0.0
    for C in ([0], [0.4], [0.3j], [0.2, -0.3]):
        crit = max(crit, match_multisets(critical_points(heins_solve(C)), C)[0])
    oracle = 0.0
    for c in (0.4, 0.3j):
        a = [z for z in heins_solve([c]).zeros_ if z != 0][0]
        oracle = max(oracle, abs(a - bruteforce_degree_two(c)))
    ok = crit <= 1e-6 and oracle <= 1e-8
    line(capsys, 5, ok, f"critical-set distance {crit:.2e} (<= 1e-6), brute-force gap {oracle:.2e} (<= 1e-8)")
    assert ok


def test_c6_liouville(capsys):
    rng = np.random.default_rng([SEED, 6])
    g = make_grid(64, 128, 1.0)
    worst, ratio = 0.0, np.inf
    for _ in range(20):
        B = random_blaschke(rng, 3)
        H = BlaschkeDerivative(B)
        u = pullback(B, g, H).u_field
        L = liouville_extract(u, H, 0.7, recognize=False)
        worst = max(worst, L.sup_distance(normalize(B)[0]))
        bump = 0.05 * np.exp(-4 * np.abs(g.points - complex(random_disk_points(rng, 1, 0.5)[0])) ** 2)
        ratio = min(ratio, holomorphy_residual(ScalarField(g, u.values + bump), H, 0.7) / L.cr_residual)
    ok = worst <= 1e-3 and ratio >= 1e2
    line(capsys, 6, ok, f"round-trip sup error {worst:.2e} (<= 1e-3), negative-control factor {ratio:.1e} (>= 1e2)")
    assert ok


def test_c7_comparison_and_domination(grid, capsys):
    rng = np.random.default_rng([SEED, 7])
    g = make_grid(32, 64, 2.0)
    violations = 0
    for _ in range(20):
        H = random_poly(rng, int(rng.integers(0, 4)))
        hs = np.sort(rng.uniform(-2, 2, 2))
        # non-constant ordered boundary data as well
        h1 = lambda z, c=hs[0]: c + 0.3 * np.cos(np.angle(z))  # noqa: E731
        h2 = lambda z, c=hs[1]: c + 0.3 * np.cos(np.angle(z)) + 0.1  # noqa: E731
        pb2 = GceProblem(H, h2, g)
        u1, u2 = solve_gce(GceProblem(H, h1, g)).u, solve_gce(pb2).u
        violations += len(check_comparison(u1, u2, pb2, eps=1e-6).violations)
    dom = -np.inf
    for H in (constant(1), Polynomial((0, 1)), Polynomial((0, -0.5, 1))):
        um, _ = maximal_solution(H, grid)
        dom = max(dom, float(np.max(solve_gce(GceProblem(H, 0.0, grid)).u.values - um.values)))
    ok = violations == 0 and dom <= 0
    line(capsys, 7, ok, f"comparison violations {violations}; max(u_0 - u_max) = {dom:.2e} (<= 0)")
    assert ok


@pytest.fixture(scope="module")
def growth():
    return boundary_growth_probe(Polynomial((-2, 1)), n_values=tuple(range(7)))


def test_c8_growth_increasing_and_representation(growth, capsys):
    ok = growth.strictly_increasing and min(growth.edge_margin) >= -0.1 and min(growth.representation_gap) >= -1e-6
    vals = ", ".join(f"{v:.3f}" for v in growth.probe_values)
    line(capsys, "8a", ok, f"u_n(0.95) = [{vals}] strictly increasing; edge liminf margin "
         f"{min(growth.edge_margin):.3f} (>= -0.1); representation bound gap {min(growth.representation_gap):.2e}")
    assert ok


@pytest.mark.xfail(strict=True, reason="u_n < n in the interior for H = z - 2, so no fixed-radius value exceeds level n")
def test_c8_each_level_exceeded(growth, capsys):
    ok = all(growth.exceeds_level)
    line(capsys, "8b", ok, f"levels exceeded at r = {growth.probe_radius:.3f}: {list(growth.exceeds_level)}; "
         f"the maximum principle gives u_n < n off the circle and the values saturate near "
         f"{growth.probe_values[-1]:.2f}, so this clause cannot hold at any fixed radius")
    assert ok


def _picard_gap(pb):
    u = solve_gce(pb).u.values
    its = picard_iterates(pb, 50)
    lo = np.minimum(its[-1].values, its[-2].values)
    hi = np.maximum(its[-1].values, its[-2].values)
    return max(float(np.max(hi - lo)), float(np.max(lo - u)), float(np.max(u - hi)))


def test_c9_picard(grid, capsys):
    rng = np.random.default_rng([SEED, 9])
    worst = 0.0
    for _ in range(10):
        pb = GceProblem(random_poly(rng, int(rng.integers(0, 3)), 0.5), float(rng.uniform(-1, 1)), grid)
        worst = max(worst, _picard_gap(pb))
    ok = worst <= 1e-3
    line(capsys, 9, ok, f"sandwich width after 50 steps {worst:.2e} (<= 1e-3), H coefficient mass <= 0.5")
    assert ok


@pytest.mark.xfail(strict=True, reason="the Picard map is not a contraction for large |H|^2 e^{2h}")
def test_c9_picard_unrestricted(grid, capsys):
    gap = _picard_gap(GceProblem(constant(1), 1.0, grid))
    ok = gap <= 1e-3
    line(capsys, "9b", ok, f"H = 1, h = 1: sandwich width after 50 steps {gap:.2e} (<= 1e-3); "
         f"T has Lipschitz constant near 2 sup|H|^2 e^(2u) / 5.78 > 1 here, so 50 steps are not enough")
    assert ok


def test_c10_verify_all(capsys):
    t = time.perf_counter()
    with capsys.disabled():
        code = main(["verify", "--suite", "all", "--seed", "7"])
    dt = time.perf_counter() - t
    ok = code == 0 and dt <= 300
    line(capsys, 10, ok, f"verify --suite all exit {code} in {dt:.1f}s (<= 300s)")
    assert ok
