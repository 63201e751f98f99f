"""Potential theory on the disk: harmonic extension, Green potentials, outer functions, norms."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .grid import DiskGrid, ScalarField
from .holo import LOG_CLIP, HoloFn, Outer

log = logging.getLogger(__name__)

LP_CONSTANT = 2.0 / np.pi


def boundary_samples(h, grid: DiskGrid) -> np.ndarray:
    """Sample boundary data given as a scalar, an array, or a callable of z on the circle."""
    if callable(h):
        vals = np.asarray(h(grid.boundary_points), dtype=float)
    elif np.ndim(h) == 0:
        vals = np.full(grid.n_theta, float(h))
    else:
        vals = np.asarray(h, dtype=float)
    if vals.shape != (grid.n_theta,):
        raise ValueError(f"boundary data needs {grid.n_theta} samples, got shape {vals.shape}")
    if not np.all(np.isfinite(vals)):
        raise ValueError("boundary samples must be finite")
    return vals


# -- harmonic extension -------------------------------------------------------


def poisson_extend(h, grid: DiskGrid) -> ScalarField:
    """Harmonic extension of boundary data, sum_k h_k r^|k| e^{ik theta} (spectral Poisson quadrature)."""
    hb = boundary_samples(h, grid)
    m = grid.n_theta
    hk = np.fft.rfft(hb)
    k = np.arange(len(hk))
    vals = np.fft.irfft(hk[None, :] * grid.radii[:, None] ** k[None, :], n=m, axis=1)
    return ScalarField(grid, vals, float(hk[0].real / m), hb)


# -- Green potentials ---------------------------------------------------------


def green_kernel(z, zeta):
    """G(z, zeta) = log|(1 - z conj(zeta)) / (z - zeta)| >= 0."""
    z = np.asarray(z, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    return np.log(np.abs(1.0 - z * np.conj(zeta))) - np.log(np.abs(z - zeta))


@dataclass(frozen=True, eq=False)
class BlaschkeMeasureSpec:
    """mu = density dA + sum of point masses.

    ``density`` is either a HoloFn (density |H|^2), a ScalarField, or a
    callable of z; ``weight`` optionally multiplies it pointwise.
    """

    density: HoloFn | ScalarField | Callable | None = None
    weight: ScalarField | None = None
    point_masses: tuple = field(default=())

    def __post_init__(self):
        pm = tuple((complex(a), float(m)) for a, m in self.point_masses)
        for a, m in pm:
            if not abs(a) < 1.0:
                raise ValueError(f"point mass at {a} lies outside the open disk")
            if not m > 0:
                raise ValueError("point masses must be positive")
        object.__setattr__(self, "point_masses", pm)

    def density_values(self, grid: DiskGrid) -> np.ndarray:
        if self.density is None:
            rho = np.zeros(grid.shape)
        elif isinstance(self.density, ScalarField):
            if self.density.grid != grid:
                raise ValueError("density field lives on a different grid")
            rho = np.array(self.density.values)
        elif isinstance(self.density, HoloFn):
            rho = np.abs(self.density(grid.points)) ** 2
        else:
            rho = np.asarray(self.density(grid.points), dtype=float) * np.ones(grid.shape)
        if self.weight is not None:
            rho = rho * self.weight.values
        return rho


def blaschke_mass(mu: BlaschkeMeasureSpec, grid: DiskGrid) -> float:
    """Quadrature of (1 - |z|^2) d mu."""
    rho = mu.density_values(grid)
    total = grid.integrate((1.0 - np.abs(grid.points) ** 2) * rho)
    return total + sum(m * (1.0 - abs(a) ** 2) for a, m in mu.point_masses)


def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


def _cell_average(grid: DiskGrid, z0: complex, l: int, phi0: float, singular: bool, n: int = 10) -> float:
    """Average of G(z0, .) over the (s, theta) cell of ring l centred at angle phi0."""
    s0, ds, dth = grid.s_nodes[l], grid.ds, grid.dtheta
    if not singular:
        x, w = _gauss(n)
        s = s0 + ds * (x - 0.5)
        t = phi0 + dth * (x - 0.5)
        S, T = np.meshgrid(s, t, indexing="ij")
        W = np.outer(w, w) * grid.rmap(S) * grid.rmap_deriv(S)
        vals = green_kernel(z0, grid.rmap(S) * np.exp(1j * T))
        return float(np.sum(W * vals) / np.sum(W))
    # self cell: 4 quadrants at the node, each split into 2 Duffy triangles
    u, wu = _gauss(2 * n)
    v, wv = _gauss(n)
    U, V = np.meshgrid(u, v, indexing="ij")
    WUV = np.outer(wu, wv)
    num = den = 0.0
    for a in (-0.5, 0.5):
        for b in (-0.5, 0.5):
            corners = ((a * ds, 0.0), (a * ds, b * dth), (0.0, b * dth))
            for p, q in ((corners[0], corners[1]), (corners[1], corners[2])):
                S = s0 + U * (p[0] + V * (q[0] - p[0]))
                T = phi0 + U * (p[1] + V * (q[1] - p[1]))
                jac = abs(p[0] * q[1] - p[1] * q[0]) * U
                W = WUV * jac * grid.rmap(S) * grid.rmap_deriv(S)
                num += np.sum(W * green_kernel(z0, grid.rmap(S) * np.exp(1j * T)))
                den += np.sum(W)
    return float(num / den)


@lru_cache(maxsize=8)
def _green_table(grid: DiskGrid) -> np.ndarray:
    """rfft over the angular offset of K[i, l, d] = G(r_i, r_l e^{i d dtheta}), near field cell-averaged."""
    r, m, dth = grid.radii, grid.n_theta, grid.dtheta
    d = np.arange(m)
    src = r[None, :, None] * np.exp(1j * d * dth)[None, None, :]
    with np.errstate(divide="ignore"):
        K = green_kernel(r[:, None, None], src)
    dr = np.gradient(r)
    for i in range(grid.n_r):
        for l in range(max(0, i - 2), min(grid.n_r, i + 3)):
            reach = 3.0 * max(dr[i], dr[l]) / (min(r[i], r[l]) * dth)
            span = int(min(m // 2, max(2, np.ceil(reach))))
            for off in range(-span, span + 1):
                K[i, l, off % m] = _cell_average(grid, r[i], l, off * dth, singular=(l == i and off == 0))
    return np.fft.rfft(K, axis=2)


def green_potential(mu: BlaschkeMeasureSpec, grid: DiskGrid) -> ScalarField:
    """G_mu(z) = (1/2pi) int G(z, zeta) d mu(zeta); zero boundary trace."""
    rho = mu.density_values(grid)
    if np.any(rho < 0) or not np.all(np.isfinite(rho)):
        raise ValueError("density must be finite and nonnegative")
    if not np.isfinite(blaschke_mass(mu, grid)):
        raise ValueError("Blaschke integral of mu diverges")
    table = _green_table(grid)
    src = np.fft.rfft(rho * grid.radial_weights[:, None], axis=1)
    vals = np.fft.irfft(np.einsum("ild,ld->id", table, src), n=grid.n_theta, axis=1) * grid.dtheta
    with np.errstate(divide="ignore"):
        center = float(np.sum(grid.quad_weights * rho * -np.log(grid.radii)[:, None]))
    for a, mass in mu.point_masses:
        vals = vals + mass * green_kernel(grid.points, a)
        center = center + mass * (-np.log(abs(a)) if a != 0 else np.inf)
    vals = vals / (2.0 * np.pi)
    center = center / (2.0 * np.pi)
    return ScalarField(grid, vals, center if np.isfinite(center) else None, np.zeros(grid.n_theta))


# -- outer functions and norms ----------------------------------------------


def outer_function(w, grid: DiskGrid) -> Outer:
    """Out_w: zero-free with |Out_w| = w on the circle, from the Herglotz integral of log w."""
    wb = boundary_samples(w, grid)
    if np.any(wb <= 0):
        raise ValueError("outer function needs strictly positive boundary modulus")
    lw = np.log(wb)
    if np.any(np.abs(lw) > LOG_CLIP):
        log.warning("log w clipped to +-%g at %d samples", LOG_CLIP, int(np.sum(np.abs(lw) > LOG_CLIP)))
        lw = np.clip(lw, -LOG_CLIP, LOG_CLIP)
    return Outer(lw, float(grid.boundary_angles[0]))


def bergman_norm(f: HoloFn, p: float, alpha: float, grid: DiskGrid) -> float:
    """(int |f|^p (1 - |z|)^alpha dA)^(1/p)."""
    if not p > 0:
        raise ValueError("p must be positive")
    if not alpha > -1:
        raise ValueError("alpha must exceed -1")
    vals = np.abs(f(grid.points)) ** p * (1.0 - grid.radii[:, None]) ** alpha
    return grid.integrate(vals) ** (1.0 / p)


def littlewood_paley(f: HoloFn, grid: DiskGrid) -> tuple[float, float]:
    """(||f||_{H^2}^2, |f(0)|^2 + c int |f'|^2 log(1/|z|) dA) with c = 2/pi."""
    fb = np.asarray(f(grid.boundary_points))
    f0 = complex(np.asarray(f(np.array([0j])))[0])
    if not (np.all(np.isfinite(fb)) and np.isfinite(f0)):
        raise ValueError("f is not evaluable on the closed disk")
    lhs = float(np.mean(np.abs(fb) ** 2))
    dens = np.abs(f.deriv(grid.points)) ** 2 * -np.log(grid.radii)[:, None]
    rhs = abs(f0) ** 2 + LP_CONSTANT * grid.integrate(dens)
    return lhs, float(rhs)
