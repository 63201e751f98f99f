"""Polar discretization of the unit disk.

Radial nodes live on a uniform grid in a computational coordinate ``s`` and
are mapped to the physical radius by ``r = 1 - (1 - s)**p``, which packs
nodes toward the circle for ``p > 1``.  Angles are uniform and shifted by
half a cell so that points on the real axis (typical zeros of test
functions) never land on a node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class DiskGrid:
    n_r: int
    n_theta: int
    refinement: float = 2.0

    def __post_init__(self):
        if self.n_r < 8:
            raise ValueError(f"n_r must be >= 8, got {self.n_r}")
        if self.n_theta < 16 or self.n_theta % 2:
            raise ValueError(f"n_theta must be even and >= 16, got {self.n_theta}")
        if not self.refinement >= 1.0:
            raise ValueError(f"refinement must be >= 1, got {self.refinement}")

    # grids are compared by their defining parameters
    @property
    def key(self) -> tuple[int, int, float]:
        return (self.n_r, self.n_theta, float(self.refinement))

    def __eq__(self, other):
        return isinstance(other, DiskGrid) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"DiskGrid(n_r={self.n_r}, n_theta={self.n_theta}, refinement={self.refinement})"

    # -- radial map -------------------------------------------------------
    @property
    def ds(self) -> float:
        return 1.0 / (self.n_r + 1)

    def rmap(self, s):
        return 1.0 - (1.0 - np.asarray(s, dtype=float)) ** self.refinement

    def rmap_deriv(self, s):
        p = self.refinement
        return p * (1.0 - np.asarray(s, dtype=float)) ** (p - 1.0)

    @cached_property
    def s_nodes(self) -> np.ndarray:
        return self.ds * np.arange(1, self.n_r + 1)

    @cached_property
    def radii(self) -> np.ndarray:
        return self.rmap(self.s_nodes)

    @property
    def dtheta(self) -> float:
        return 2.0 * np.pi / self.n_theta

    @cached_property
    def angles(self) -> np.ndarray:
        return (np.arange(self.n_theta) + 0.5) * self.dtheta

    @property
    def boundary_angles(self) -> np.ndarray:
        return self.angles

    @cached_property
    def points(self) -> np.ndarray:
        """Complex node coordinates, shape (n_r, n_theta)."""
        return self.radii[:, None] * np.exp(1j * self.angles)[None, :]

    @cached_property
    def boundary_points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_r, self.n_theta)

    # -- quadrature -------------------------------------------------------
    @cached_property
    def radial_weights(self) -> np.ndarray:
        """Weights w_i with sum_i w_i f(r_i) ~ int_0^1 f(r) r dr.

        Fourth-order Gregory rule in ``s``; the integrand vanishes at s = 0
        (factor r) and at s = 1 when p > 1 (factor dr/ds).
        """
        n = self.n_r
        g = np.ones(n)
        g[0] = g[-1] = 7.0 / 6.0
        g[1] = g[-2] = 23.0 / 24.0
        if self.refinement == 1.0:
            # endpoint value at s = 1 is not zero; extrapolate linearly
            g[-1] += 2.0 * 3.0 / 8.0
            g[-2] -= 3.0 / 8.0
        return self.ds * g * self.radii * self.rmap_deriv(self.s_nodes)

    @cached_property
    def quad_weights(self) -> np.ndarray:
        """Area weights per node, shape (n_r, n_theta); they sum to ~pi."""
        return np.repeat(self.radial_weights[:, None] * self.dtheta, self.n_theta, axis=1)

    def integrate(self, values) -> float:
        return float(np.sum(self.quad_weights * values))

    # -- finite-volume Laplacian -----------------------------------------
    @cached_property
    def _fv(self):
        # cells bounded by radial midpoints; the center cell is the disk of radius r_1/2
        dth = self.dtheta
        r = np.concatenate([[0.0], self.radii, [1.0]])
        r_face = 0.5 * (r[:-1] + r[1:])
        c_rad = r_face * dth / np.diff(r)  # per angular wedge, faces i+1/2 for i = 0..n
        d_ang = np.diff(r_face) / (self.radii * dth)
        area = 0.5 * (r_face[1:] ** 2 - r_face[:-1] ** 2) * dth
        area_center = np.pi * r_face[0] ** 2
        return c_rad, d_ang, area, area_center

    @property
    def n_unknowns(self) -> int:
        return 1 + self.n_r * self.n_theta

    @cached_property
    def cell_areas(self) -> np.ndarray:
        """Finite-volume cell areas as a flat vector (center first)."""
        _, _, area, area_center = self._fv
        return np.concatenate([[area_center], np.repeat(area, self.n_theta)])

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Symmetric flux matrix K; (K u + boundary_flux(h)) / area is the discrete Laplacian."""
        n, m = self.n_r, self.n_theta
        c_rad, d_ang, _, _ = self._fv
        idx = 1 + np.arange(n * m).reshape(n, m)
        rows, cols, vals = [], [], []
        # center <-> first ring
        a = np.zeros(m, dtype=int)
        b = idx[0]
        c = np.full(m, c_rad[0])
        rows += [a, b, a, b]
        cols += [b, a, a, b]
        vals += [c, c, -c, -c]
        # radial couplings ring i <-> i+1
        a = idx[:-1].ravel()
        b = idx[1:].ravel()
        c = np.repeat(c_rad[1:n], m)
        rows += [a, b, a, b]
        cols += [b, a, a, b]
        vals += [c, c, -c, -c]
        # angular couplings (periodic)
        a = idx.ravel()
        b = np.roll(idx, -1, axis=1).ravel()
        c = np.repeat(d_ang, m)
        rows += [a, b, a, b]
        cols += [b, a, a, b]
        vals += [c, c, -c, -c]
        # outer ring <-> boundary (diagonal part only)
        a = idx[-1]
        rows.append(a)
        cols.append(a)
        vals.append(np.full(m, -c_rad[n]))
        K = sp.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_unknowns, self.n_unknowns),
        )
        return K.tocsr()

    def boundary_flux(self, h) -> np.ndarray:
        """Contribution of Dirichlet data h to K u (flat vector)."""
        c_rad = self._fv[0]
        out = np.zeros(self.n_unknowns)
        if h is not None:
            out[-self.n_theta:] = c_rad[-1] * np.asarray(h, dtype=float)
        return out

    def laplacian(self, f: "ScalarField") -> "ScalarField":
        """Discrete Laplacian at center and interior nodes (needs center and boundary trace)."""
        if f.center is None or f.boundary_trace is None:
            raise ValueError("laplacian needs a field with center value and boundary trace")
        flat = f.flat()
        lap = (self.stiffness @ flat + self.boundary_flux(f.boundary_trace)) / self.cell_areas
        return ScalarField.from_flat(self, lap)

    def laplacian_open(self, center: float, values) -> np.ndarray:
        """Discrete Laplacian of nodal values without a boundary trace; the outer ring is NaN."""
        flat = np.concatenate([[center], np.asarray(values, dtype=float).ravel()])
        lap = (self.stiffness @ flat) / self.cell_areas
        out = lap[1:].reshape(self.shape)
        out[-1] = np.nan
        return out

    # -- helpers ----------------------------------------------------------
    def ring_index(self, r: float) -> int:
        """Index of the radial ring closest to radius r."""
        return int(np.argmin(np.abs(self.radii - r)))

    def compact_mask(self, rho: float) -> np.ndarray:
        return np.broadcast_to((self.radii <= rho + 1e-12)[:, None], self.shape)

    def to_dict(self) -> dict:
        return {"n_r": self.n_r, "n_theta": self.n_theta, "refinement": float(self.refinement)}

    @classmethod
    def from_dict(cls, d: dict) -> "DiskGrid":
        return make_grid(int(d["n_r"]), int(d["n_theta"]), float(d.get("refinement", 2.0)))


def make_grid(n_r: int, n_theta: int, refinement: float = 2.0) -> DiskGrid:
    return DiskGrid(int(n_r), int(n_theta), float(refinement))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real grid function: interior node values plus optional center and boundary trace."""

    grid: DiskGrid
    values: np.ndarray
    center: float | None = None
    boundary_trace: np.ndarray | None = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} != grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("ScalarField values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.center is not None:
            c = float(self.center)
            if not np.isfinite(c):
                raise ValueError("center value must be finite")
            object.__setattr__(self, "center", c)
        if self.boundary_trace is not None:
            bt = np.asarray(self.boundary_trace, dtype=float)
            if bt.shape != (self.grid.n_theta,) or not np.all(np.isfinite(bt)):
                raise ValueError("boundary trace must be finite with n_theta samples")
            bt.setflags(write=False)
            object.__setattr__(self, "boundary_trace", bt)

    def flat(self) -> np.ndarray:
        c = 0.0 if self.center is None else self.center
        return np.concatenate([[c], self.values.ravel()])

    @classmethod
    def from_flat(cls, grid: DiskGrid, flat, boundary_trace=None) -> "ScalarField":
        flat = np.asarray(flat, dtype=float)
        return cls(grid, flat[1:].reshape(grid.shape), flat[0], boundary_trace)

    @classmethod
    def from_function(cls, grid: DiskGrid, fn, boundary: bool = True) -> "ScalarField":
        """Sample fn(z) (vectorized over complex z) at center, nodes and boundary."""
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(fn(grid.points), dtype=float)
            center = float(np.asarray(fn(np.array([0j])), dtype=float)[0])
            bt = np.asarray(fn(grid.boundary_points), dtype=float) if boundary else None
        if not np.isfinite(center):
            center = None
        if bt is not None and not np.all(np.isfinite(bt)):
            bt = None
        return cls(grid, vals, center, bt)

    def _combine(self, other, op):
        if isinstance(other, ScalarField):
            if other.grid != self.grid:
                raise ValueError("fields live on different grids")
            c = None if self.center is None or other.center is None else op(self.center, other.center)
            bt = (
                None
                if self.boundary_trace is None or other.boundary_trace is None
                else op(self.boundary_trace, other.boundary_trace)
            )
            return ScalarField(self.grid, op(self.values, other.values), c, bt)
        other = float(other)
        c = None if self.center is None else op(self.center, other)
        bt = None if self.boundary_trace is None else op(self.boundary_trace, other)
        return ScalarField(self.grid, op(self.values, other), c, bt)

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def max_abs_diff(self, other: "ScalarField", mask=None) -> float:
        d = np.abs(self.values - other.values)
        if mask is not None:
            d = d[mask]
        out = float(np.max(d)) if d.size else 0.0
        if mask is None and self.center is not None and other.center is not None:
            out = max(out, abs(self.center - other.center))
        return out

    def ring_mean(self, i: int) -> float:
        return float(np.mean(self.values[i]))

    def center_from_rings(self, k: int = 4) -> float:
        """Extrapolate the value at 0 from the k innermost ring means, as a polynomial in r^2."""
        x = self.grid.radii[:k] ** 2
        m = self.values[:k].mean(axis=1)
        w = np.array([np.prod([xj / (xj - xi) for j, xj in enumerate(x) if j != i]) for i, xi in enumerate(x)])
        return float(w @ m)

    def with_center(self, center: float | None = None) -> "ScalarField":
        c = self.center_from_rings() if center is None else center
        return ScalarField(self.grid, self.values, c, self.boundary_trace)
