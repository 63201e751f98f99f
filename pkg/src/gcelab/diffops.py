"""High-order polar derivatives for diagnostics on a DiskGrid.

Both directions use local Fornberg stencils.  Radial stencils run along the
full diameter through each node: the
ray at angle theta continues through the origin as the ray at theta + pi,
which is again a grid ray because n_theta is even.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grid import DiskGrid


def fornberg_weights(x0: float, xs, m: int) -> np.ndarray:
    """Weights for derivatives 0..m at x0 from samples at xs (Fornberg 1988)."""
    xs = np.asarray(xs, dtype=float)
    n = len(xs)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = xs[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def _diameter(grid: DiskGrid, with_center: bool, with_boundary: bool):
    """Signed positions along a diameter and their sample references.

    Reference k > 0 is ring k - 1, k = 0 the center, k = n_r + 1 the boundary,
    and k < 0 ring |k| - 1 on the opposite ray.
    """
    r = grid.radii
    pos = [-r[::-1]]
    ref = [-(np.arange(grid.n_r)[::-1] + 1)]
    if with_center:
        pos.append(np.array([0.0]))
        ref.append(np.array([0]))
    pos.append(r)
    ref.append(np.arange(grid.n_r) + 1)
    if with_boundary:
        pos.append(np.array([1.0]))
        ref.append(np.array([grid.n_r + 1]))
    return np.concatenate(pos), np.concatenate(ref)


def _stencils(pos, ref, targets, width, order):
    idx = np.zeros((len(targets), width), dtype=int)
    w = np.zeros((order + 1, len(targets), width))
    for i, x in enumerate(targets):
        k = int(np.searchsorted(pos, x))
        lo = min(max(k - width // 2, 0), len(pos) - width)
        sel = np.arange(lo, lo + width)
        c = fornberg_weights(x, pos[sel], order)
        idx[i] = ref[sel]
        w[:, i] = c.T
    return idx, w


@lru_cache(maxsize=32)
def _radial_stencils(grid: DiskGrid, width: int, with_center: bool, with_boundary: bool):
    pos, ref = _diameter(grid, with_center, with_boundary)
    # centring on the node itself: nudge the search so the node sits mid-stencil
    idx, w = _stencils(pos, ref, grid.radii - 1e-15, width, 2)
    return idx, w[1], w[2]


def radial_interp(grid: DiskGrid, values, center, targets, width: int = 8):
    """Values at radii ``targets`` on every grid ray, by local Lagrange interpolation."""
    values = np.asarray(values)
    pos, ref = _diameter(grid, center is not None, False)
    idx, w = _stencils(pos, ref, np.asarray(targets, dtype=float), width, 0)
    samples = _gather(values, center, None, idx, grid.n_theta)
    return np.einsum("iw,iwj->ij", w[0], samples)


def _gather(values, center, boundary, idx, n_theta):
    """Sample values at stencil references; shape (n_r, width, n_theta)."""
    shift = n_theta // 2
    n_r = values.shape[0]
    out = np.empty(idx.shape + (n_theta,), dtype=values.dtype)
    for i in range(idx.shape[0]):
        for s, k in enumerate(idx[i]):
            if k > n_r:
                out[i, s] = boundary
            elif k > 0:
                out[i, s] = values[k - 1]
            elif k == 0:
                out[i, s] = center
            else:
                out[i, s] = np.roll(values[-k - 1], -shift)
    return out


def polar_derivatives(grid: DiskGrid, values, center=None, boundary=None, width: int = 9):
    """Return (f_r, f_rr, f_t, f_tt) at interior nodes."""
    values = np.asarray(values)
    idx, w1, w2 = _radial_stencils(grid, width, center is not None, boundary is not None)
    samples = _gather(values, center, boundary, idx, grid.n_theta)
    f_r = np.einsum("iw,iwj->ij", w1, samples)
    f_rr = np.einsum("iw,iwj->ij", w2, samples)
    # local periodic stencils in theta keep singularities elsewhere on the ring from polluting
    h = width // 2
    c = fornberg_weights(0.0, grid.dtheta * np.arange(-h, h + 1), 2)
    f_t = np.zeros_like(values)
    f_tt = np.zeros_like(values)
    for s, off in enumerate(range(-h, h + 1)):
        shifted = np.roll(values, -off, axis=1)
        f_t = f_t + c[s, 1] * shifted
        f_tt = f_tt + c[s, 2] * shifted
    return f_r, f_rr, f_t, f_tt


def laplacian_hi(grid: DiskGrid, values, center=None, boundary=None, width: int = 9):
    f_r, f_rr, _, f_tt = polar_derivatives(grid, values, center, boundary, width)
    r = grid.radii[:, None]
    return f_rr + f_r / r + f_tt / r**2


def d_dz(grid: DiskGrid, values, center=None, boundary=None, width: int = 9):
    """Wirtinger derivative (d/dx - i d/dy) / 2 at interior nodes."""
    f_r, _, f_t, _ = polar_derivatives(grid, values, center, boundary, width)
    r = grid.radii[:, None]
    e = np.exp(-1j * grid.angles)[None, :]
    return 0.5 * e * (f_r - 1j * f_t / r)


def gradient_at_center(grid: DiskGrid, values) -> complex:
    """d/dz at the origin from the first angular mode on the two innermost rings."""
    r1, r2 = grid.radii[:2]
    fh = np.fft.fft(values[:2], axis=1) / grid.n_theta
    # f(r e^{it}) = f(0) + r f_z(0) e^{it} + r f_zbar(0) e^{-it} + O(r^2); the r^3 e^{it} term is removed
    g1 = fh[0, 1] * np.exp(-1j * grid.angles[0]) / r1
    g2 = fh[1, 1] * np.exp(-1j * grid.angles[0]) / r2
    return complex((r2**2 * g1 - r1**2 * g2) / (r2**2 - r1**2))
