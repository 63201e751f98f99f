"""Boundary value problem Lap u = |H|^2 e^{2u} in the disk, u = h on the circle."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .grid import DiskGrid, ScalarField
from .holo import HoloFn, holofn_from_dict
from .potential import BlaschkeMeasureSpec, boundary_samples, green_potential, poisson_extend

log = logging.getLogger(__name__)

U_CLAMP = 40.0


class SolverError(RuntimeError):
    """Non-finite state inside a solve."""


@dataclass(frozen=True, eq=False)
class GceProblem:
    H: HoloFn
    h: np.ndarray
    grid: DiskGrid

    def __post_init__(self):
        object.__setattr__(self, "h", boundary_samples(self.h, self.grid))
        self.h.setflags(write=False)
        hv = self.H(self.grid.points)
        if not np.all(np.isfinite(hv)):
            raise ValueError("H is not finite on the grid")
        if np.max(np.abs(hv)) == 0.0:
            raise ValueError("H must not vanish identically")
        a21 = self.grid.integrate(np.abs(hv) ** 2 * (1.0 - self.grid.radii[:, None]))
        if not np.isfinite(a21):
            raise ValueError("H has infinite weighted Bergman norm")

    @property
    def weight_flat(self) -> np.ndarray:
        """|H|^2 at the center and interior nodes, in solver ordering."""
        h0 = np.abs(np.asarray(self.H(np.array([0j])))[0]) ** 2
        return np.concatenate([[h0], np.abs(self.H(self.grid.points)).ravel() ** 2])

    def harmonic_majorant(self) -> ScalarField:
        return poisson_extend(self.h, self.grid)

    def with_h(self, h) -> "GceProblem":
        return GceProblem(self.H, h, self.grid)

    def to_dict(self) -> dict:
        if np.all(self.h == self.h[0]):
            h = {"kind": "constant", "value": float(self.h[0])}
        else:
            h = {"kind": "samples", "values": [float(x) for x in self.h]}
        return {"H": self.H.to_dict(), "h": h, "grid": self.grid.to_dict()}

    @classmethod
    def from_dict(cls, d: dict, grid: DiskGrid | None = None) -> "GceProblem":
        from .grid import DiskGrid as _G

        grid = grid or _G.from_dict(d["grid"])
        hs = d["h"]
        if hs["kind"] == "constant":
            h = float(hs["value"])
        elif hs["kind"] == "samples":
            h = np.array(hs["values"], dtype=float)
        else:
            raise ValueError(f"unknown boundary data kind {hs['kind']!r}")
        return cls(holofn_from_dict(d["H"]), h, grid)


@dataclass(frozen=True, eq=False)
class GceSolution:
    u: ScalarField
    pde_residual: float
    weak_residual: float
    iterations: int
    converged: bool
    method: str = "newton"
    clamp_events: int = 0
    history: tuple = field(default=())
    noise_floor: float = 0.0

    def report(self) -> dict:
        return {
            "converged": bool(self.converged),
            "iterations": int(self.iterations),
            "pde_residual": float(self.pde_residual),
            "weak_residual": float(self.weak_residual),
            "clamp_events": int(self.clamp_events),
            "noise_floor": float(self.noise_floor),
            "method": self.method,
        }


# -- residuals ----------------------------------------------------------------


def _complete(u: ScalarField, problem: GceProblem) -> ScalarField:
    c = u.center if u.center is not None else u.center_from_rings()
    bt = u.boundary_trace if u.boundary_trace is not None else problem.h
    return ScalarField(u.grid, u.values, c, bt)


def pointwise_residual(u: ScalarField, problem: GceProblem) -> np.ndarray:
    """Discrete Lap u - |H|^2 e^{2u} at the center and interior nodes (flat)."""
    u = _complete(u, problem)
    lap = u.grid.laplacian(u).flat()
    return lap - problem.weight_flat * np.exp(2.0 * np.minimum(u.flat(), U_CLAMP))


# test functions: (ring centre, half width, angular order, 0 = cos / 1 = sin)
BUMPS = (
    (0.50, 0.45, 0, 0), (0.50, 0.45, 1, 0), (0.50, 0.45, 1, 1), (0.50, 0.45, 2, 0),
    (0.50, 0.45, 3, 1), (0.30, 0.25, 0, 0), (0.30, 0.25, 1, 1), (0.30, 0.25, 2, 0),
    (0.50, 0.25, 0, 0), (0.50, 0.25, 2, 1), (0.50, 0.25, 4, 0), (0.70, 0.25, 0, 0),
    (0.70, 0.25, 1, 0), (0.70, 0.25, 3, 1), (0.25, 0.20, 0, 0), (0.45, 0.15, 1, 0),
    (0.60, 0.15, 2, 1), (0.80, 0.15, 0, 0), (0.82, 0.15, 5, 0), (0.84, 0.15, 1, 1),
)
BUMP_POWER = 8


def _bump_profile(r, c, w, m=BUMP_POWER):
    """Radial bump (1 - t^2)^m, t = (r - c)/w, with its first two r-derivatives."""
    t = (r - c) / w
    q = np.where(np.abs(t) < 1, 1.0 - t**2, 0.0)
    g = q**m
    g1 = -2.0 * m * t * q ** (m - 1) / w
    g2 = (-2.0 * m * q ** (m - 1) + 4.0 * m * (m - 1) * t**2 * q ** (m - 2)) / w**2
    return g, g1, g2


def bump_family(grid: DiskGrid):
    """Yield (phi, Lap phi) on grid nodes for the fixed family of 20 test functions."""
    r = grid.radii[:, None]
    th = grid.angles[None, :]
    for c, w, k, parity in BUMPS:
        g, g1, g2 = _bump_profile(grid.radii, c, w)
        ang = np.cos(k * th) if parity == 0 else np.sin(k * th)
        phi = g[:, None] * ang
        lap = (g2[:, None] + g1[:, None] / r - k**2 * g[:, None] / r**2) * ang
        yield phi, lap


def noise_floor(u: ScalarField, problem: GceProblem) -> float:
    """Round-off level of the pointwise residual: 64 eps times the size of its largest term."""
    u = _complete(u, problem)
    g = problem.grid
    flat = u.flat()
    terms = abs(g.stiffness) @ np.abs(flat) + np.abs(g.boundary_flux(u.boundary_trace))
    terms = terms / g.cell_areas + problem.weight_flat * np.exp(2.0 * np.minimum(flat, U_CLAMP))
    return float(64 * np.finfo(float).eps * np.max(terms))


def residual(u: ScalarField, problem: GceProblem, mode: str = "stencil") -> float:
    if mode == "stencil":
        return float(np.max(np.abs(pointwise_residual(u, problem))))
    if mode == "weak":
        g = problem.grid
        src = np.abs(problem.H(g.points)) ** 2 * np.exp(2.0 * np.minimum(u.values, U_CLAMP))
        return max(abs(g.integrate(u.values * lap) - g.integrate(src * phi)) for phi, lap in bump_family(g))
    raise ValueError(f"unknown residual mode {mode!r}")


# -- Newton ---------------------------------------------------------------------


def solve_gce(
    problem: GceProblem,
    tol: float = 1e-8,
    max_iter: int = 60,
    init: ScalarField | None = None,
) -> GceSolution:
    """Damped Newton with Armijo backtracking on the L2 norm of the pointwise residual.

    Convergence means the recomputed stencil residual is below ``tol`` or, on
    strongly refined grids with large data, below its own round-off floor.
    """
    g = problem.grid
    K = g.stiffness
    area = g.cell_areas
    wt = area * problem.weight_flat
    b = g.boundary_flux(problem.h)
    start = init if init is not None else problem.harmonic_majorant()
    u = start.with_center(start.center).flat()
    clamps = 0

    def evaluate(v):
        nonlocal clamps
        over = v > U_CLAMP
        clamps += int(np.count_nonzero(over))
        e = np.exp(2.0 * np.minimum(v, U_CLAMP))
        F = K @ v + b - wt * e
        if not np.all(np.isfinite(F)):
            raise SolverError("non-finite residual during Newton iteration")
        return F, e, int(np.count_nonzero(over))

    def merit(F):
        return float(np.linalg.norm(F / np.sqrt(area)))

    F, e, _ = evaluate(u)
    history = [float(np.max(np.abs(F / area)))]
    it = 0
    while history[-1] > tol and it < max_iter:
        it += 1
        J = K - sp.diags(2.0 * wt * e)
        d = spla.spsolve(J.tocsc(), -F)
        m0 = merit(F)
        t = 1.0
        while True:
            cand = u + t * d
            Fc, ec, _ = evaluate(cand)
            if merit(Fc) <= (1.0 - 1e-4 * t) * m0 or t < 1e-10:
                break
            t *= 0.5
        if t < 1e-10 and merit(Fc) >= m0:
            # round-off floor reached; the final residual decides convergence
            log.debug("line search stalled at iteration %d", it)
            break
        u, F, e = cand, Fc, ec
        history.append(float(np.max(np.abs(F / area))))
    field_u = ScalarField(g, u[1:].reshape(g.shape), float(u[0]), problem.h)
    final_clamps = int(np.count_nonzero(u > U_CLAMP))
    stencil = residual(field_u, problem, "stencil")
    weak = residual(field_u, problem, "weak")
    floor = noise_floor(field_u, problem)
    converged = stencil <= max(tol, floor) and final_clamps == 0
    return GceSolution(field_u, stencil, weak, it, converged, "newton", clamps, tuple(history), floor)


# -- Picard (Schauder operator) ---------------------------------------------


def picard_step(v: ScalarField, problem: GceProblem) -> ScalarField:
    """T v = P_h - G[e^{2v}|H|^2 dA]."""
    g = problem.grid
    dens = ScalarField(g, np.exp(2.0 * np.minimum(v.values, U_CLAMP)))
    mu = BlaschkeMeasureSpec(problem.H, weight=dens)
    G = green_potential(mu, g)
    return problem.harmonic_majorant() - G


def picard_iterates(problem: GceProblem, steps: int, v0: ScalarField | None = None) -> list[ScalarField]:
    v = v0 if v0 is not None else problem.harmonic_majorant()
    out = [v]
    for _ in range(steps):
        v = picard_step(v, problem)
        out.append(v)
    return out


# -- comparison principle -----------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    violations: tuple
    max_excess: float
    min_gap: float
    eps: float

    @property
    def ok(self) -> bool:
        return not self.violations


def check_comparison(
    u: ScalarField,
    v: ScalarField,
    problem: GceProblem,
    eps: float = 1e-6,
    stencil_tol: float = 2e-3,
) -> ComparisonReport:
    """List interior nodes where the subsolution u exceeds the supersolution v by more than eps."""
    g = problem.grid
    if u.grid != g or v.grid != g:
        raise ValueError("fields must live on the problem grid")
    ru = pointwise_residual(u, problem)
    rv = pointwise_residual(v, problem)
    scale_u = stencil_tol * (1.0 + problem.weight_flat * np.exp(2.0 * np.minimum(_complete(u, problem).flat(), U_CLAMP)))
    scale_v = stencil_tol * (1.0 + problem.weight_flat * np.exp(2.0 * np.minimum(_complete(v, problem).flat(), U_CLAMP)))
    if np.any(ru < -scale_u):
        raise ValueError("u is not a discrete subsolution")
    if np.any(rv > scale_v):
        raise ValueError("v is not a discrete supersolution")
    bu = u.boundary_trace if u.boundary_trace is not None else problem.h
    bv = v.boundary_trace if v.boundary_trace is not None else problem.h
    if np.any(bu > bv + eps):
        raise ValueError("boundary data are not ordered")
    diff = u.values - v.values
    bad = np.argwhere(diff > eps)
    viol = tuple((int(i), int(j), float(diff[i, j])) for i, j in bad)
    return ComparisonReport(viol, float(np.max(diff)), float(np.min(-diff)), eps)
