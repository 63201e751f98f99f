"""Canonical solutions u_{H,n} -> u_{H,inf}, maximal solutions and boundary diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .blaschke import BlaschkeDerivative, BlaschkeProduct, pullback
from .diffops import laplacian_hi, radial_interp
from .grid import DiskGrid, ScalarField, make_grid
from .heins import heins_solve
from .holo import HoloFn, Product
from .liouville import LiouvilleError, LiouvilleMap, liouville_extract
from .potential import BlaschkeMeasureSpec, green_potential, outer_function
from .solver import GceProblem, GceSolution, solve_gce

log = logging.getLogger(__name__)

DEFAULT_SCHEDULE = (0.0, 1.0, 2.0, 4.0, 6.0, 8.0)


def default_grid() -> DiskGrid:
    return make_grid(64, 128, 2.0)


@dataclass(frozen=True, eq=False)
class CanonicalResult:
    H: HoloFn
    rho: float
    n_values: tuple
    solutions: tuple
    u_infinity: ScalarField
    uncertainty: np.ndarray  # per-node tail estimate (band half-width)
    converged_on_compact: bool
    monotone: bool
    complete: bool
    liouville: LiouvilleMap | None
    deficiency_profile: tuple  # (r, value)
    increments: tuple = field(default=())

    @property
    def grid(self) -> DiskGrid:
        return self.u_infinity.grid

    @property
    def compact(self) -> np.ndarray:
        return self.grid.compact_mask(self.rho)

    def report(self) -> dict:
        return {
            "rho": self.rho,
            "n_values": list(self.n_values),
            "solves": [s.report() for s in self.solutions],
            "increments": list(self.increments),
            "converged_on_compact": self.converged_on_compact,
            "monotone": self.monotone,
            "complete": self.complete,
            "max_uncertainty": float(np.max(self.uncertainty[self.compact])),
            "liouville": None if self.liouville is None else self.liouville.report(),
            "deficiency_profile": [list(p) for p in self.deficiency_profile],
        }


def ladder(H: HoloFn, n_values, grid: DiskGrid, tol: float = 1e-8, max_iter: int = 80) -> list[GceSolution]:
    """Solve the constant-boundary problems u = n on the circle, warm-starting each from the last.

    u_prev + (n - n_prev) is a supersolution for level n, so Newton starts on the safe side.
    """
    out: list[GceSolution] = []
    prev, n_prev = None, None
    for n in n_values:
        problem = GceProblem(H, float(n), grid)
        init = None if prev is None else prev.u + (float(n) - n_prev)
        sol = solve_gce(problem, tol=tol, max_iter=max_iter, init=init)
        out.append(sol)
        if not sol.converged:
            break
        prev, n_prev = sol, float(n)
    return out


def _tail(us: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    """Geometric tail from the last three iterates; ratio clipped to [0, 0.95]."""
    if len(us) < 2:
        return us[-1], np.zeros_like(us[-1])
    d2 = us[-1] - us[-2]
    if len(us) < 3:
        return us[-1], np.abs(d2)
    d1 = us[-2] - us[-3]
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(np.abs(d1) > 1e-15, d2 / d1, 0.0)
    q = np.clip(q, 0.0, 0.95)
    tail = d2 * q / (1.0 - q)
    return us[-1] + tail, np.abs(tail)


def canonical_solution(
    H: HoloFn,
    rho: float = 0.8,
    n_max: float = 8.0,
    tol: float = 1e-2,
    grid: DiskGrid | None = None,
    schedule=DEFAULT_SCHEDULE,
    extract: bool = True,
    solver_tol: float = 1e-8,
) -> CanonicalResult:
    """Run the n-ladder until successive levels agree to ``tol`` on |z| <= rho, then extrapolate."""
    if not 0 < rho <= 0.95:
        raise ValueError("rho must lie in (0, 0.95]")
    grid = grid or default_grid()
    mask = grid.compact_mask(rho)
    levels = [float(n) for n in schedule if n <= n_max]
    sols: list[GceSolution] = []
    used: list[float] = []
    increments = []
    for n in levels:
        init = sols[-1].u + (n - used[-1]) if sols else None
        sol = solve_gce(GceProblem(H, n, grid), tol=solver_tol, max_iter=80, init=init)
        sols.append(sol)
        used.append(n)
        if not sol.converged:
            log.warning("inner solve at n = %g did not converge", n)
            break
        if len(sols) > 1:
            increments.append(float(np.max(np.abs(sol.u.values - sols[-2].u.values)[mask])))
            if increments[-1] < tol:
                break
    complete = all(s.converged for s in sols)
    vals = [s.u.values for s in sols if s.converged]
    centers = [s.u.center for s in sols if s.converged]
    monotone = all(np.all(b >= a - 1e-9) for a, b in zip(vals, vals[1:]))
    u_inf_vals, band = _tail(vals)
    c_inf, _ = _tail([np.array([c]) for c in centers])
    u_inf = ScalarField(grid, u_inf_vals, float(c_inf[0]))
    converged = complete and bool(increments) and (increments[-1] < tol or float(np.max(band[mask])) < tol)
    lmap = None
    if extract and complete:
        try:
            lmap = liouville_extract(u_inf, H, rho)
        except (LiouvilleError, ValueError) as exc:
            log.warning("Liouville extraction failed: %s", exc)
    radii = grid.radii[grid.radii <= rho + 1e-12]
    prof = tuple(zip(map(float, radii), map(float, deficiency(u_inf, radii))))
    return CanonicalResult(
        H, rho, tuple(used), tuple(sols), u_inf, band, converged, monotone, complete,
        lmap, prof, tuple(increments),
    )


# -- maximal solution ------------------------------------------------------


def maximal_product(H: HoloFn) -> BlaschkeProduct:
    """The maximal Blaschke product for the zero set of H (identity when H has no zeros)."""
    zeros = H.zeros()
    if len(zeros) == 0:
        return BlaschkeProduct((0j,), 0.0)
    return heins_solve(zeros)


def maximal_solution(H: HoloFn, grid: DiskGrid | None = None) -> tuple[ScalarField, BlaschkeProduct]:
    """u_max = log(2|F'| / (1 - |F|^2)) - log|H| with F the maximal product for Z(H)."""
    grid = grid or default_grid()
    F = maximal_product(H)
    return pullback(F, grid, H).u_field, F


def compact_residual(u: ScalarField, H: HoloFn, rho: float) -> float:
    """Max |Lap u - |H|^2 e^{2u}| on rings r <= rho (high-order stencils, no trace needed)."""
    g = u.grid
    lap = laplacian_hi(g, u.values, u.center)
    res = lap - np.abs(H(g.points)) ** 2 * np.exp(2.0 * u.values)
    return float(np.max(np.abs(res[g.compact_mask(rho)])))


@dataclass(frozen=True, eq=False)
class ComparisonResult:
    coincide: bool
    gap: float
    gap_field: np.ndarray
    density_gap: float
    canonical: CanonicalResult
    F: BlaschkeProduct

    def report(self) -> dict:
        return {"coincide": self.coincide, "gap": self.gap, "density_gap": self.density_gap, "F": self.F.to_dict()}


def canonical_vs_maximal(
    H: HoloFn, rho: float = 0.8, grid: DiskGrid | None = None, tol: float = 1e-2
) -> ComparisonResult:
    grid = grid or default_grid()
    can = canonical_solution(H, rho, grid=grid)
    u_max, F = maximal_solution(H, grid)
    mask = grid.compact_mask(rho)
    gap_field = np.where(mask, u_max.values - can.u_infinity.values, 0.0)
    gap = float(np.max(np.abs(gap_field[mask])))
    density_gap = np.nan
    if can.liouville is not None:
        k = can.liouville.n_rings
        z = grid.points[:k]
        lam_F = np.abs(F.deriv(z)) / (1.0 - np.abs(F(z)) ** 2)
        lam_I = can.liouville.hyperbolic_density()
        density_gap = float(np.max(np.abs(lam_I / lam_F - 1.0)))
    return ComparisonResult(gap <= tol, gap, gap_field, density_gap, can, F)


# -- diagnostics --------------------------------------------------------------


def deficiency(u: ScalarField, r_values) -> np.ndarray:
    """int_0^{2pi} (log(2/(1-r^2)) - u(r e^{it})) dt for each r."""
    r_values = np.atleast_1d(np.asarray(r_values, dtype=float))
    g = u.grid
    on_ring = [np.isclose(g.radii, r, rtol=0, atol=1e-12) for r in r_values]
    out = np.empty(len(r_values))
    for k, (r, hit) in enumerate(zip(r_values, on_ring)):
        if np.any(hit):
            ring = u.values[np.argmax(hit)]
        else:
            c = u.center if u.center is not None else u.center_from_rings()
            ring = radial_interp(g, u.values, c, [r])[0]
        out[k] = np.sum(np.log(2.0 / (1.0 - r**2)) - ring) * g.dtheta
    return out


@dataclass(frozen=True)
class GrowthReport:
    n_values: tuple
    probe_radius: float
    probe_values: tuple  # min over the arc of u_n at the probe ring
    strictly_increasing: bool
    exceeds_level: tuple  # probe value >= n, per level
    edge_margin: tuple  # min over the arc of u_n - n on the outermost ring
    representation_gap: tuple  # min of u_n - (n - e^{2n} G_{|H|^2}) on the arc rows
    interior_excess: tuple  # max of u_n - n over interior nodes (negative expected)

    def report(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def boundary_growth_probe(
    H: HoloFn,
    n_values=(0, 1, 2, 3, 4, 5, 6),
    arc=(0.0, 2 * np.pi),
    grid: DiskGrid | None = None,
    probe_radius: float = 0.95,
) -> GrowthReport:
    """Track u_n near an arc J: probe-ring values, edge margin u_n - n, and the lower bound n - e^{2n} G."""
    grid = grid or make_grid(64, 128, 3.0)
    a, b = arc
    th = np.mod(grid.angles - a, 2 * np.pi)
    on_arc = th <= (b - a) + 1e-12
    sols = ladder(H, n_values, grid)
    if len(sols) != len(n_values) or not sols[-1].converged:
        raise RuntimeError("ladder solve did not converge")
    Gh = green_potential(BlaschkeMeasureSpec(H), grid).values
    i_probe = grid.ring_index(probe_radius)
    probe, edge, rep, interior = [], [], [], []
    for n, s in zip(n_values, sols):
        u = s.u.values
        probe.append(float(np.min(u[i_probe, on_arc])))
        edge.append(float(np.min(u[-1, on_arc] - n)))
        rep.append(float(np.min((u - (n - np.exp(2 * n) * Gh))[:, on_arc])))
        interior.append(float(np.max(u - n)))
    inc = all(y > x for x, y in zip(probe, probe[1:]))
    exceeds = tuple(p >= n for p, n in zip(probe, n_values))
    return GrowthReport(
        tuple(float(n) for n in n_values), float(grid.radii[i_probe]), tuple(probe), inc, exceeds,
        tuple(edge), tuple(rep), tuple(interior),
    )


def generator_family(I0: HoloFn, r: float, grid: DiskGrid | None = None) -> Product:
    """H_r = (2r / phi_r) I0' with phi_r the outer function of modulus 1 - |r I0|^2."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    grid = grid or default_grid()
    Ib = I0(grid.boundary_points)
    phi = outer_function(1.0 - np.abs(r * Ib) ** 2, grid)
    dI = BlaschkeDerivative(I0) if isinstance(I0, BlaschkeProduct) else _Derivative(I0)
    return Product((dI, phi.reciprocal()), 2.0 * r)


def generator_limit(I0: HoloFn, grid: DiskGrid | None = None) -> Product:
    """H = 2 I0' / Out_{1 - |I0|^2}, the r -> 1 member for a strict self-map I0."""
    grid = grid or default_grid()
    Ib = I0(grid.boundary_points)
    w = 1.0 - np.abs(Ib) ** 2
    if np.any(w <= 0):
        raise ValueError("I0 must be a strict self-map up to the circle")
    phi = outer_function(w, grid)
    dI = BlaschkeDerivative(I0) if isinstance(I0, BlaschkeProduct) else _Derivative(I0)
    return Product((dI, phi.reciprocal()), 2.0)


def generator_trace(I0: HoloFn, r: float, grid: DiskGrid | None = None) -> float:
    """Max over the circle of |u_r|, u_r = log(2|r I0'| / (1 - |r I0|^2)) - log|H_r|."""
    grid = grid or default_grid()
    Hr = generator_family(I0, r, grid)
    zb = grid.boundary_points
    dI = Hr.factors[0]
    u = np.log(2 * r * np.abs(dI(zb)) / (1 - np.abs(r * I0(zb)) ** 2)) - np.log(np.abs(Hr(zb)))
    return float(np.max(np.abs(u)))


def generator_distance(I0: HoloFn, rs, target: HoloFn, grid: DiskGrid | None = None) -> np.ndarray:
    """min over unimodular c of ||H_r - c target||_{A^2_1}, for each r."""
    grid = grid or default_grid()
    wt = grid.quad_weights * (1.0 - grid.radii[:, None])
    T = target(grid.points)
    nT = np.sum(wt * np.abs(T) ** 2)
    out = []
    for r in rs:
        Hv = generator_family(I0, r, grid)(grid.points)
        inner = np.sum(wt * Hv * np.conj(T))
        d2 = np.sum(wt * np.abs(Hv) ** 2) + nT - 2 * abs(inner)
        out.append(np.sqrt(max(d2, 0.0)))
    return np.array(out)


@dataclass(frozen=True)
class _Derivative(HoloFn):
    """f' of a HoloFn, for generator families built on non-Blaschke maps."""

    f: HoloFn
    kind = "derivative"

    def __call__(self, z):
        return self.f.deriv(z)

    def deriv(self, z):
        return self.f.deriv2(z)

    def zeros(self):
        raise NotImplementedError("zeros of a generic derivative are not tracked")

    def to_dict(self):
        return {"kind": self.kind, "f": self.f.to_dict()}
