"""Recover the holomorphic map behind a solution of the weighted curvature equation.

If u solves Lap u = |H|^2 e^{2u}, then e^u = 2|g| / (1 - |I|^2) with I' = H g
for holomorphic I, g.  Differentiating log of that identity gives the
first-order system, integrated along grid rays from the origin:

    I' = H g,    g' = 2 g (u_z - conj(I) H g / (1 - |I|^2)),
    I(0) = 0,    g(0) = e^{u(0)} / 2 > 0.

This avoids the second-order equation y'' + Q y = 0, whose coefficient
Q = w_zz - w_z^2 has poles at the zeros of H.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blaschke import BlaschkeProduct, normalize
from .diffops import d_dz, gradient_at_center, radial_interp
from .grid import DiskGrid, ScalarField
from .holo import HoloFn


class LiouvilleError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class LiouvilleMap:
    grid: DiskGrid
    rho: float
    I: np.ndarray  # normalized map on rings r <= rho, shape (k, n_theta)
    I_deriv: np.ndarray
    Q: np.ndarray
    cr_residual: float
    density_error: float
    ray_consistency: float
    inner_profile: tuple  # (r, min |I|, mean |I|) per ring
    blaschke: BlaschkeProduct | None = None

    @property
    def n_rings(self) -> int:
        return self.I.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self.grid.points[: self.n_rings]

    def hyperbolic_density(self) -> np.ndarray:
        """|I'| / (1 - |I|^2) on the compact."""
        return np.abs(self.I_deriv) / (1.0 - np.abs(self.I) ** 2)

    def sup_distance(self, F: HoloFn, rho: float | None = None) -> float:
        mask = self.grid.radii[: self.n_rings] <= (rho if rho is not None else self.rho) + 1e-12
        return float(np.max(np.abs(self.I[mask] - F(self.points[mask]))))

    def report(self) -> dict:
        return {
            "rho": self.rho,
            "cr_residual": self.cr_residual,
            "density_error": self.density_error,
            "ray_consistency": self.ray_consistency,
            "recognized": None if self.blaschke is None else self.blaschke.to_dict(),
            "inner_profile": [list(map(float, row)) for row in self.inner_profile],
        }


def _negative_modes(values: np.ndarray) -> np.ndarray:
    """Per ring, l2 size of the e^{-ik theta} modes (zero for traces of holomorphic functions)."""
    m = values.shape[1]
    c = np.fft.fft(values, axis=1) / m
    return np.sqrt(np.sum(np.abs(c[:, m // 2 + 1 :]) ** 2, axis=1))


def wirtinger_jets(u: ScalarField):
    """(u_z at nodes, u_z at 0, u_zz at nodes) from high-order polar stencils."""
    g = u.grid
    c = u.center if u.center is not None else u.center_from_rings()
    uz = d_dz(g, u.values, c, u.boundary_trace)
    uz0 = gradient_at_center(g, u.values - c)
    uzz = d_dz(g, uz, uz0)
    return uz, uz0, uzz


def holomorphy_residual(u: ScalarField, H: HoloFn, rho: float) -> float:
    """Largest anti-holomorphic content of P = H (u_zz - u_z^2) - H' u_z on rings r <= rho.

    For a genuine solution P = H Q + (smooth holomorphic terms), so it is holomorphic.
    """
    g = u.grid
    uz, _, uzz = wirtinger_jets(u)
    z = g.points
    Pf = H(z) * (uzz - uz**2) - H.deriv(z) * uz
    k = int(np.sum(g.radii <= rho + 1e-12))
    return float(np.max(_negative_modes(Pf[:k])))


def _integrate_rays(u: ScalarField, H: HoloFn, n_rings: int, uz, uz0):
    g = u.grid
    e = np.exp(1j * g.angles)
    radii = np.concatenate([[0.0], g.radii[:n_rings]])
    mids = 0.5 * (radii[:-1] + radii[1:])
    uz_mid = radial_interp(g, uz, uz0, mids)
    c = u.center if u.center is not None else u.center_from_rings()

    def rhs(rr, I, G, uzr):
        z = rr * e
        Hz = H(z)
        dI = e * Hz * G
        dG = e * 2.0 * G * (uzr - np.conj(I) * Hz * G / (1.0 - np.abs(I) ** 2))
        return dI, dG

    I = np.zeros(g.n_theta, dtype=complex)
    G = np.full(g.n_theta, 0.5 * np.exp(c), dtype=complex)
    uz_prev = np.full(g.n_theta, uz0)
    outI = np.empty((n_rings, g.n_theta), dtype=complex)
    outG = np.empty_like(outI)
    for i in range(n_rings):
        r0, r1, h = radii[i], radii[i + 1], radii[i + 1] - radii[i]
        um, u1 = uz_mid[i], uz[i]
        k1 = rhs(r0, I, G, uz_prev)
        k2 = rhs(r0 + h / 2, I + h / 2 * k1[0], G + h / 2 * k1[1], um)
        k3 = rhs(r0 + h / 2, I + h / 2 * k2[0], G + h / 2 * k2[1], um)
        k4 = rhs(r1, I + h * k3[0], G + h * k3[1], u1)
        I = I + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        G = G + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        if np.any(np.abs(I) >= 1.0):
            raise LiouvilleError(f"|I| >= 1 at r = {r1:.4f}; extraction inconsistent")
        outI[i], outG[i] = I, G
        uz_prev = u1
    return outI, outG


def _leading_phase(H: HoloFn) -> float:
    c = H.taylor(12)
    scale = np.max(np.abs(c))
    k = int(np.argmax(np.abs(c) > 1e-9 * scale))
    return float(np.angle(c[k]))


def liouville_extract(
    u: ScalarField,
    H: HoloFn,
    rho: float = 0.7,
    cr_tol: float | None = None,
    recognize: bool = True,
) -> LiouvilleMap:
    """Integrate the Liouville system on rings r <= rho and normalize the result."""
    g = u.grid
    if np.any(np.abs(H(g.points)) == 0):
        raise ValueError("H vanishes at a grid node")
    n_rings = int(np.sum(g.radii <= rho + 1e-12))
    uz, uz0, uzz = wirtinger_jets(u)
    cr = holomorphy_residual(u, H, rho)
    if cr_tol is not None and cr > cr_tol:
        raise LiouvilleError(f"holomorphy residual {cr:.3g} exceeds {cr_tol:.3g}; u is not a solution")
    I, G = _integrate_rays(u, H, n_rings, uz, uz0)
    rot = np.exp(-1j * _leading_phase(H))
    I = rot * I
    z = g.points[:n_rings]
    Hz = H(z)
    Id = rot * Hz * G
    # density check: e^u = 2|g| / (1 - |I|^2)
    dens = 2.0 * np.abs(G) / (1.0 - np.abs(I) ** 2)
    density_error = float(np.max(np.abs(dens / np.exp(u.values[:n_rings]) - 1.0)))
    # Q = w_zz - w_z^2 with w = u + log|H|
    Hd = H.deriv(z)
    Hdd = H.deriv2(z)
    Q = uzz[:n_rings] - uz[:n_rings] ** 2 - uz[:n_rings] * Hd / Hz + Hdd / (2 * Hz) - 0.75 * (Hd / Hz) ** 2
    ray = float(np.max(_negative_modes(I) / np.maximum(np.sqrt(np.mean(np.abs(I) ** 2, axis=1)), 1e-300)))
    absI = np.abs(I)
    profile = tuple((float(g.radii[i]), float(absI[i].min()), float(absI[i].mean())) for i in range(n_rings))
    found = _recognize(I, z, H) if recognize else None
    return LiouvilleMap(g, rho, I, Id, Q, cr, density_error, ray, profile, found)


def _recognize(I: np.ndarray, z: np.ndarray, H: HoloFn, tol: float = 1e-3) -> BlaschkeProduct | None:
    """Match I against the normalized maximal product for the zeros of H, if H has few zeros."""
    from .heins import HeinsError, heins_solve

    try:
        zeros = H.zeros()
    except (NotImplementedError, ValueError):
        return None
    if len(zeros) > 7:
        return None
    try:
        F = heins_solve(zeros) if len(zeros) else BlaschkeProduct((0j,), 0.0)
        Fn, _ = normalize(F)
    except (HeinsError, ValueError):
        return None
    if float(np.max(np.abs(I - Fn(z)))) <= tol:
        return Fn if isinstance(Fn, BlaschkeProduct) else None
    return None
