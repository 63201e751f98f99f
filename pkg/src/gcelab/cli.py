"""Command-line front door: ``gcelab {solve,canonical,heins,maximal,verify,lp}``.

Exit codes: 0 success, 2 invalid input, 3 non-convergence, 4 oracle disagreement.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .blaschke import critical_points
from .canonical import canonical_solution, compact_residual, maximal_solution
from .grid import DiskGrid, make_grid
from .heins import HeinsError, bruteforce_degree_two, heins_report, heins_solve
from .holo import holofn_from_dict
from .potential import littlewood_paley
from .solver import GceProblem, SolverError, solve_gce

EXIT_OK, EXIT_INPUT, EXIT_CONVERGENCE, EXIT_ORACLE = 0, 2, 3, 4
COMMANDS = ("solve", "canonical", "heins", "maximal", "verify", "lp")

log = logging.getLogger("gcelab")


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    config: Path | None = None
    out: Path = Path(".")
    tol: float | None = None
    seed: int = 0
    grid: str | None = None
    critical: str | None = None
    suite: str = "all"
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.tol is not None and not (np.isfinite(self.tol) and self.tol > 0):
            raise InputError("--tol must be positive")
        if self.config is not None:
            try:
                self.data = io.read_json(self.config)
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read config: {exc}") from None
            if not isinstance(self.data, dict):
                raise InputError("config must be a JSON object")

    def resolve_grid(self, default: DiskGrid) -> DiskGrid:
        if self.grid:
            ref = float(self.data.get("grid", {}).get("refinement", default.refinement))
            return io.parse_grid(self.grid, ref)
        if "grid" in self.data:
            return DiskGrid.from_dict(self.data["grid"])
        return default

    def holofn(self, key: str = "H"):
        if key not in self.data:
            raise InputError(f"config needs a {key!r} entry")
        return holofn_from_dict(self.data[key])


def _envelope(cfg: RunConfig, grid: DiskGrid | None, tolerances: dict, body: dict, t0: float) -> dict:
    return {
        "command": cfg.command,
        "grid": None if grid is None else grid.to_dict(),
        "tolerances": tolerances,
        "seed": cfg.seed,
        **body,
        "wall_time": time.perf_counter() - t0,
    }


def cmd_solve(cfg: RunConfig, t0: float) -> int:
    grid = cfg.resolve_grid(make_grid(64, 128, 2.0))
    problem = GceProblem.from_dict(cfg.data, grid)
    tol = cfg.tol or float(cfg.data.get("tol", 1e-8))
    max_iter = int(cfg.data.get("max_iter", 60))
    sol = solve_gce(problem, tol=tol, max_iter=max_iter)
    # maximum principle: u <= P_h
    excess = float(np.max(sol.u.values - problem.harmonic_majorant().values))
    io.write_field(cfg.out / "u.csv", sol.u)
    rep = _envelope(cfg, grid, {"tol": tol, "max_iter": max_iter}, {**sol.report(), "majorant_excess": excess}, t0)
    io.write_json(cfg.out / "report.json", rep)
    if not sol.converged:
        return EXIT_CONVERGENCE
    return EXIT_ORACLE if excess > 1e-8 else EXIT_OK


def cmd_canonical(cfg: RunConfig, t0: float) -> int:
    grid = cfg.resolve_grid(make_grid(64, 128, 2.0))
    H = cfg.holofn()
    rho = float(cfg.data.get("rho", 0.8))
    n_max = float(cfg.data.get("n_max", 8))
    tol = cfg.tol or float(cfg.data.get("tol", 1e-2))
    res = canonical_solution(H, rho, n_max=n_max, tol=tol, grid=grid, extract=bool(cfg.data.get("extract", True)))
    io.write_field(cfg.out / "u_infinity.csv", res.u_infinity)
    for n, s in zip(res.n_values, res.solutions):
        io.write_field(cfg.out / f"u_n{n:g}.csv", s.u)
    if res.liouville is not None and res.liouville.blaschke is not None:
        io.write_json(cfg.out / "blaschke.json", res.liouville.blaschke.to_dict())
    rep = _envelope(cfg, grid, {"ladder_tol": tol, "rho": rho, "n_max": n_max}, {"H": H.to_dict(), **res.report()}, t0)
    io.write_json(cfg.out / "report.json", rep)
    if not res.converged_on_compact:
        return EXIT_CONVERGENCE
    return EXIT_OK if res.monotone else EXIT_ORACLE


def _critical_set(cfg: RunConfig) -> list[complex]:
    if cfg.critical is not None:
        return io.parse_complex_list(cfg.critical)
    if "critical" in cfg.data:
        return [complex(*p) if isinstance(p, list) else io.parse_complex(str(p)) for p in cfg.data["critical"]]
    raise InputError("heins needs --critical or a 'critical' entry in the config")


def cmd_heins(cfg: RunConfig, t0: float) -> int:
    C = _critical_set(cfg)
    tol = cfg.tol or float(cfg.data.get("tol", 1e-6))
    if not C:
        raise InputError("empty critical set")
    if any(abs(c) >= 1 for c in C):
        raise InputError("critical points must lie in the open unit disk")
    try:
        B = heins_solve(C, tol=tol)
    except HeinsError as exc:
        io.write_json(cfg.out / "report.json", _envelope(
            cfg, None, {"tol": tol}, {"error": str(exc), "last_good": exc.last_good, "residual": exc.residual}, t0))
        return EXIT_CONVERGENCE
    table = heins_report(B, C)
    body = {"blaschke": B.to_dict(), **table,
            "residuals": [{"point": [c.real, c.imag], "abs_deriv": float(abs(B.deriv(np.array([c]))[0]))}
                          for c in critical_points(B)]}
    code = EXIT_OK
    if len(C) == 1 and C[0] != 0:
        a = next(z for z in B.zeros_ if abs(z) > 1e-12)
        ref = bruteforce_degree_two(C[0])
        body["oracle_distance"] = float(abs(a - ref))
        code = EXIT_OK if abs(a - ref) <= 1e-8 else EXIT_ORACLE
    io.write_json(cfg.out / "blaschke.json", B.to_dict())
    io.write_json(cfg.out / "report.json", _envelope(cfg, None, {"tol": tol}, body, t0))
    return code


def cmd_maximal(cfg: RunConfig, t0: float) -> int:
    grid = cfg.resolve_grid(make_grid(64, 128, 2.0))
    H = cfg.holofn()
    rho = float(cfg.data.get("rho", 0.8))
    tol = cfg.tol or float(cfg.data.get("tol", 1e-3))
    try:
        u, F = maximal_solution(H, grid)
    except HeinsError as exc:
        io.write_json(cfg.out / "report.json", _envelope(cfg, grid, {"tol": tol}, {"error": str(exc)}, t0))
        return EXIT_CONVERGENCE
    res = compact_residual(u, H, rho)
    io.write_field(cfg.out / "u_max.csv", u)
    io.write_json(cfg.out / "blaschke.json", F.to_dict())
    body = {"H": H.to_dict(), "blaschke": F.to_dict(), "rho": rho, "compact_residual": res}
    io.write_json(cfg.out / "report.json", _envelope(cfg, grid, {"residual_tol": tol}, body, t0))
    return EXIT_OK if res <= tol else EXIT_ORACLE


def cmd_verify(cfg: RunConfig, t0: float) -> int:
    from .verify import SUITES, run_suite

    if cfg.suite != "all" and cfg.suite not in SUITES:
        raise InputError(f"unknown suite {cfg.suite!r}")

    def show(r):
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.suite:<10} {r.name:<45} {r.value:.3e} <= {r.threshold:.1e}"
              f"  ({r.seconds:.1f}s)", flush=True)

    results = run_suite(cfg.suite, cfg.seed, show)
    ok = all(r.passed for r in results)
    rows = [{k: v for k, v in r.row().items() if k != "seconds"} | {"wall_time": r.seconds} for r in results]
    print(f"{sum(r.passed for r in results)}/{len(results)} passed", flush=True)
    if cfg.config is not None or cfg.out != Path("."):
        io.write_json(cfg.out / "verify.json", _envelope(cfg, None, {}, {"suite": cfg.suite, "checks": rows,
                                                                         "all_passed": ok}, t0))
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_lp(cfg: RunConfig, t0: float) -> int:
    grid = cfg.resolve_grid(make_grid(128, 256, 2.0))
    f = cfg.holofn("f")
    tol = cfg.tol or float(cfg.data.get("tol", 1e-3))
    lhs, rhs = littlewood_paley(f, grid)
    rel = abs(lhs - rhs) / lhs if lhs > 0 else abs(rhs)
    body = {"f": f.to_dict(), "lhs": lhs, "rhs": rhs, "relative_gap": rel}
    io.write_json(cfg.out / "report.json", _envelope(cfg, grid, {"tol": tol}, body, t0))
    return EXIT_OK if rel <= tol else EXIT_ORACLE


HANDLERS = {
    "solve": cmd_solve, "canonical": cmd_canonical, "heins": cmd_heins,
    "maximal": cmd_maximal, "verify": cmd_verify, "lp": cmd_lp,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gcelab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid", help="NRxNT, e.g. 64x128")
    p.add_argument("--critical", help='comma-separated complex list, e.g. "0.2+0.1i,-0.3i"')
    p.add_argument("--suite", default="all", help="disk, blaschke, gce, canonical or all")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    try:
        return HANDLERS[cfg.command](cfg, t0)
    except (InputError, KeyError, TypeError, ValueError) as exc:
        print(f"gcelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (SolverError, FloatingPointError) as exc:
        print(f"gcelab: solver failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig(args.command, args.config, args.out, args.tol, args.seed, args.grid, args.critical, args.suite)
    except InputError as exc:
        print(f"gcelab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
