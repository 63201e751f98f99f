"""Finite Blaschke products, disk automorphisms and the hyperbolic pullback."""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np
from numpy.polynomial import polynomial as P

from .diffops import laplacian_hi
from .grid import DiskGrid, ScalarField
from .holo import HoloFn, cpair, from_cpair, poly_roots, sort_points


class RootFindingError(RuntimeError):
    def __init__(self, msg, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


def _product_jets(f, f1, f2):
    """Value, first and second derivative of prod_i f_i from per-factor jets (axis 0)."""
    p = np.ones_like(f[0])
    p1 = np.zeros_like(f[0])
    p2 = np.zeros_like(f[0])
    for a, b, c in zip(f, f1, f2):
        p, p1, p2 = p * a, p1 * a + p * b, p2 * a + 2 * p1 * b + p * c
    return p, p1, p2


@dataclass(frozen=True)
class BlaschkeProduct(HoloFn):
    """F(z) = exp(i rotation) prod (z - a_i) / (1 - conj(a_i) z)."""

    zeros_: tuple
    rotation: float = 0.0
    kind: ClassVar[str] = "blaschke"

    def __post_init__(self):
        zs = tuple(complex(a) for a in self.zeros_)
        if not zs:
            raise ValueError("a Blaschke product needs at least one zero")
        if any(abs(a) >= 1.0 for a in zs):
            raise ValueError("Blaschke zeros must lie in the open unit disk")
        object.__setattr__(self, "zeros_", zs)
        object.__setattr__(self, "rotation", float(self.rotation) % (2 * np.pi))

    @property
    def degree(self) -> int:
        return len(self.zeros_)

    def _jets(self, z):
        z = np.asarray(z, dtype=complex)
        a = np.array(self.zeros_).reshape((-1,) + (1,) * z.ndim)
        ac = np.conj(a)
        den = 1.0 - ac * z
        f = (z - a) / den
        f1 = (1.0 - np.abs(a) ** 2) / den**2
        f2 = 2.0 * ac * (1.0 - np.abs(a) ** 2) / den**3
        rot = np.exp(1j * self.rotation)
        p, p1, p2 = _product_jets(f, f1, f2)
        return rot * p, rot * p1, rot * p2

    def __call__(self, z):
        return self._jets(z)[0]

    def deriv(self, z):
        return self._jets(z)[1]

    def deriv2(self, z, **_):
        return self._jets(z)[2]

    def zeros(self):
        return sort_points(np.array(self.zeros_))

    def numerator(self) -> np.ndarray:
        """Ascending coefficients of prod (z - a_i)."""
        return P.polyfromroots(self.zeros_)

    def denominator(self) -> np.ndarray:
        """Ascending coefficients of prod (1 - conj(a_i) z)."""
        q = np.array([1.0 + 0j])
        for a in self.zeros_:
            q = P.polymul(q, [1.0, -np.conj(a)])
        # polymul trims vanishing top coefficients (zeros at the origin)
        return np.pad(q, (0, self.degree + 1 - len(q)))

    def critical_polynomial(self) -> np.ndarray:
        """Ascending coefficients of p'q - pq', whose roots in the disk are the critical points."""
        p, q = self.numerator(), self.denominator()
        return P.polysub(P.polymul(P.polyder(p), q), P.polymul(p, P.polyder(q)))

    def to_dict(self):
        return {"kind": self.kind, "zeros": [cpair(a) for a in self.zeros_], "rotation": self.rotation}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(from_cpair(a) for a in d["zeros"]), float(d.get("rotation", 0.0)))

    def rotated(self, angle: float) -> "BlaschkeProduct":
        return BlaschkeProduct(self.zeros_, self.rotation + angle)


@dataclass(frozen=True)
class BlaschkeDerivative(HoloFn):
    """scale * B'(z) for a finite Blaschke product B."""

    base: BlaschkeProduct
    scale: complex = 1.0
    kind: ClassVar[str] = "blaschke_derivative"

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))

    def __call__(self, z):
        return self.scale * self.base.deriv(z)

    def deriv(self, z):
        return self.scale * self.base.deriv2(z)

    def zeros(self):
        return critical_points(self.base)

    def to_dict(self):
        d = self.base.to_dict()
        d["kind"] = self.kind
        d["scale"] = cpair(self.scale)
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(BlaschkeProduct.from_dict(d), from_cpair(d.get("scale", 1.0)))


def blaschke_eval(B: BlaschkeProduct, z):
    return B(z)


def blaschke_derivative(B: BlaschkeProduct, z):
    return B.deriv(z)


def critical_points(B: BlaschkeProduct, with_residuals: bool = False):
    """The d - 1 critical points of B in the disk, sorted by (real, imag)."""
    d = B.degree
    if d == 1:
        pts = np.zeros(0, dtype=complex)
        return (pts, np.zeros(0)) if with_residuals else pts
    roots = poly_roots(B.critical_polynomial())
    inside = roots[np.abs(roots) < 1.0 - 1e-10]
    if len(inside) != d - 1:
        # fall back on the reflection symmetry: keep the d - 1 innermost roots
        inside = roots[np.argsort(np.abs(roots))][: d - 1]
    pts = sort_points(inside)
    res = np.abs(B.deriv(pts))
    scale = max(1.0, float(np.max(np.abs(B.deriv(np.exp(2j * np.pi * np.arange(16) / 16))))))
    if len(pts) != d - 1 or np.any(np.abs(pts) >= 1.0) or np.any(res > 1e-6 * scale):
        raise RootFindingError("critical point computation did not converge", res)
    return (pts, res) if with_residuals else pts


def critical_report(B: BlaschkeProduct) -> list[dict]:
    pts, res = critical_points(B, with_residuals=True)
    return [{"point": cpair(c), "residual": float(r)} for c, r in zip(pts, res)]


@dataclass(frozen=True)
class MobiusDisk:
    """m(z) = exp(i phi) (z - a) / (1 - conj(a) z)."""

    a: complex = 0j
    phi: float = 0.0

    def __post_init__(self):
        a = complex(self.a)
        if abs(a) >= 1.0:
            raise ValueError(f"Mobius center must lie in the open disk, got {a}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "phi", float(self.phi) % (2 * np.pi))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.phi) * (z - self.a) / (1.0 - np.conj(self.a) * z)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.phi) * (1.0 - abs(self.a) ** 2) / (1.0 - np.conj(self.a) * z) ** 2

    def inverse(self) -> "MobiusDisk":
        return MobiusDisk(-self.a * np.exp(1j * self.phi), -self.phi)

    def compose(self, other: "MobiusDisk") -> "MobiusDisk":
        """self o other."""
        a = other.inverse()(self.a)
        phi = np.angle(self.deriv(other(a)) * other.deriv(a))
        return MobiusDisk(complex(a), float(phi))

    def to_dict(self):
        return {"a": cpair(self.a), "phi": self.phi}

    @classmethod
    def from_dict(cls, d):
        return cls(from_cpair(d["a"]), float(d["phi"]))


@dataclass(frozen=True)
class MobiusComposed(HoloFn):
    """m o F for a general holomorphic self-map F."""

    mobius: MobiusDisk
    inner: HoloFn
    kind: ClassVar[str] = "mobius_composed"

    def __call__(self, z):
        return self.mobius(self.inner(z))

    def deriv(self, z):
        return self.mobius.deriv(self.inner(z)) * self.inner.deriv(z)

    def zeros(self):
        raise NotImplementedError("zeros of a composed map are not tracked")

    def to_dict(self):
        return {"kind": self.kind, "mobius": self.mobius.to_dict(), "inner": self.inner.to_dict()}

    @classmethod
    def from_dict(cls, d):
        from .holo import holofn_from_dict

        return cls(MobiusDisk.from_dict(d["mobius"]), holofn_from_dict(d["inner"]))


def mobius_between(w1: complex, w2: complex) -> MobiusDisk:
    """The automorphism (phi_{w2})^{-1} o phi_{w1}, which sends w1 to w2."""
    if abs(w1) >= 1 or abs(w2) >= 1:
        raise ValueError("points must lie in the open unit disk")
    return MobiusDisk(w2, 0.0).inverse().compose(MobiusDisk(w1, 0.0))


def mobius_apply(m: MobiusDisk, F):
    """Post-compose F with m; Blaschke products stay Blaschke products."""
    if isinstance(F, MobiusDisk):
        return m.compose(F)
    if isinstance(F, BlaschkeProduct):
        # zeros of m o F solve exp(i rot) p(z) - a q(z) = 0
        poly = np.exp(1j * F.rotation) * F.numerator() - m.a * F.denominator()
        zs = poly_roots(poly)
        if len(zs) != F.degree or np.any(np.abs(zs) >= 1.0):
            raise RootFindingError("could not locate zeros of the composed product")
        base = BlaschkeProduct(tuple(zs), 0.0)
        probe = np.exp(0.3j)
        rot = np.angle(m(F(probe)) / base(probe))
        return BlaschkeProduct(tuple(zs), rot)
    if isinstance(F, MobiusComposed):
        return MobiusComposed(m.compose(F.mobius), F.inner)
    return MobiusComposed(m, F)


def normalize(F):
    """Return (F_norm, m) with F_norm = m o F, F_norm(0) = 0 and its leading Taylor coefficient > 0."""
    f0 = complex(np.asarray(F(np.array([0j])))[0])
    if not abs(f0) < 1:
        raise ValueError("F must map 0 into the open disk")
    recentre = MobiusDisk(f0, 0.0)
    G = mobius_apply(recentre, F)
    coeffs = G.taylor(12)
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    nz = np.flatnonzero(np.abs(coeffs[1:]) > 1e-9 * scale)
    if len(nz) == 0:
        raise ValueError("F is constant (derivative vanishes identically)")
    lead = coeffs[1 + nz[0]]
    m = MobiusDisk(f0, -np.angle(lead))
    return mobius_apply(m, F), m


@dataclass(frozen=True)
class PullbackMetric:
    base: HoloFn
    u_field: ScalarField
    weight: HoloFn | None = None

    def log_density(self) -> ScalarField:
        """log lambda_F = u + log|H|."""
        if self.weight is None:
            return self.u_field
        g = self.u_field.grid
        w = ScalarField.from_function(g, lambda z: np.log(np.abs(self.weight(z))), boundary=False)
        c = None if self.u_field.center is None or w.center is None else self.u_field.center + w.center
        return ScalarField(g, self.u_field.values + w.values, c)


def _log_pullback_density(F, z):
    return np.log(2.0 * np.abs(F.deriv(z))) - np.log1p(-np.abs(F(z)) ** 2)


def pullback(F: HoloFn, grid: DiskGrid, H: HoloFn | None = None) -> PullbackMetric:
    """u = log(2|F'| / (1 - |F|^2)) - log|H| sampled at the grid nodes."""
    Fz = F(grid.points)
    if np.any(np.abs(Fz) >= 1.0) or abs(complex(np.asarray(F(np.array([0j])))[0])) >= 1.0:
        raise ValueError("F is not a strict self-map of the disk on the grid")
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = _log_pullback_density(F, grid.points)
        center = _log_pullback_density(F, np.array([0j]))[0]
        if H is not None:
            vals = vals - np.log(np.abs(H(grid.points)))
            center = center - np.log(np.abs(H(np.array([0j]))[0]))
    if not np.all(np.isfinite(vals)):
        raise ValueError("pullback density is not finite at every node (zero of F' or H on the grid)")
    field = ScalarField(grid, vals)
    field = field.with_center(float(center) if np.isfinite(center) else None)
    return PullbackMetric(F, field, H)


def discrete_curvature(metric: PullbackMetric) -> np.ndarray:
    """-Lap(log lambda) / lambda^2 at interior nodes, high-order polar stencils."""
    w = metric.log_density()
    lap = laplacian_hi(w.grid, w.values, w.center)
    return -lap / np.exp(2.0 * w.values)
