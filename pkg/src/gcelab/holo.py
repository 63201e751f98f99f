"""Exactly evaluable holomorphic functions on the closed unit disk.

Every representation evaluates pointwise (vectorized over complex arrays),
differentiates exactly, reports its zeros inside the open disk with
multiplicity, and round-trips through a JSON-friendly dict.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

log = logging.getLogger(__name__)

CLUSTER_RADIUS = 1e-7
LOG_CLIP = 40.0


def cpair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def from_cpair(p) -> complex:
    if isinstance(p, (int, float)):
        return complex(p)
    return complex(float(p[0]), float(p[1]))


def cluster_roots(roots: np.ndarray, radius: float = CLUSTER_RADIUS) -> np.ndarray:
    """Replace each cluster of nearly coincident roots by copies of its mean."""
    roots = np.asarray(roots, dtype=complex)
    out = roots.copy()
    used = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        if used[i]:
            continue
        members = np.flatnonzero((~used) & (np.abs(roots - roots[i]) < radius))
        used[members] = True
        out[members] = roots[members].mean()
    return out


def poly_roots(coeffs_asc) -> np.ndarray:
    """All roots of sum c_k z^k: companion eigenvalues, one Newton polish, clustering."""
    c = np.trim_zeros(np.asarray(coeffs_asc, dtype=complex), "b")
    if len(c) <= 1:
        return np.zeros(0, dtype=complex)
    scale = np.max(np.abs(c))
    while len(c) > 1 and abs(c[-1]) < 1e-13 * scale:
        c = c[:-1]
    desc = c[::-1]
    roots = np.roots(desc).astype(complex)
    if len(roots) == 0:
        return roots.astype(complex)
    d1 = np.polyder(desc)
    pv, dv = np.polyval(desc, roots), np.polyval(d1, roots)
    ok = np.abs(dv) > 1e-8 * scale
    step = np.zeros_like(roots)
    step[ok] = pv[ok] / dv[ok]
    # polish only where it helps
    cand = roots - step
    better = np.abs(np.polyval(desc, cand)) <= np.abs(pv)
    roots = np.where(better, cand, roots)
    return cluster_roots(roots)


def sort_points(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    order = np.lexsort((np.round(z.imag, 12), np.round(z.real, 12)))
    return z[order]


class HoloFn:
    """Base class; subclasses implement ``__call__``, ``deriv``, ``zeros`` and ``to_dict``."""

    kind: ClassVar[str] = ""

    def __call__(self, z):
        raise NotImplementedError

    def deriv(self, z):
        raise NotImplementedError

    def deriv2(self, z, radius: float = 1e-2, n: int = 32):
        """Second derivative by the Cauchy integral on a small circle."""
        z = np.asarray(z, dtype=complex)
        w = np.exp(2j * np.pi * np.arange(n) / n)
        vals = self.deriv(z[..., None] + radius * w)
        return np.mean(vals * np.conj(w), axis=-1) / radius

    def zeros(self) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def taylor(self, n: int, radius: float = 0.5, samples: int = 64) -> np.ndarray:
        """First n Taylor coefficients at 0 from samples on |z| = radius."""
        w = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
        c = np.fft.fft(self(w)) / samples
        return c[:n] / radius ** np.arange(n)


@dataclass(frozen=True)
class Polynomial(HoloFn):
    """sum_k coeffs[k] z^k (ascending order)."""

    coeffs: tuple
    kind: ClassVar[str] = "poly"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("polynomial needs at least one coefficient")

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], np.asarray(z, dtype=complex))

    def deriv(self, z):
        d = np.polyder(np.array(self.coeffs[::-1])) if len(self.coeffs) > 1 else np.zeros(1)
        return np.polyval(d, np.asarray(z, dtype=complex))

    def deriv2(self, z, **_):
        c = np.array(self.coeffs[::-1])
        d = np.polyder(c, 2) if len(c) > 2 else np.zeros(1)
        return np.polyval(d, np.asarray(z, dtype=complex))

    def zeros(self):
        r = poly_roots(self.coeffs)
        return sort_points(r[np.abs(r) < 1.0])

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_dict(self):
        return {"kind": self.kind, "coeffs": [cpair(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(from_cpair(c) for c in d["coeffs"]))


@dataclass(frozen=True)
class Rational(HoloFn):
    """num(z) / den(z), denominator zero-free on the closed disk."""

    num: tuple
    den: tuple
    kind: ClassVar[str] = "rational"

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(complex(c) for c in self.num))
        object.__setattr__(self, "den", tuple(complex(c) for c in self.den))
        poles = poly_roots(self.den)
        if not any(self.den) or np.any(np.abs(poles) <= 1.0 + 1e-12):
            raise ValueError("denominator must not vanish on the closed unit disk")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(self.num[::-1], z) / np.polyval(self.den[::-1], z)

    def deriv(self, z):
        z = np.asarray(z, dtype=complex)
        n, d = np.array(self.num[::-1]), np.array(self.den[::-1])
        nv, dv = np.polyval(n, z), np.polyval(d, z)
        return (np.polyval(np.polyder(n), z) * dv - nv * np.polyval(np.polyder(d), z)) / dv**2

    def zeros(self):
        r = poly_roots(self.num)
        return sort_points(r[np.abs(r) < 1.0])

    def to_dict(self):
        return {"kind": self.kind, "num": [cpair(c) for c in self.num], "den": [cpair(c) for c in self.den]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(from_cpair(c) for c in d["num"]), tuple(from_cpair(c) for c in d["den"]))


@dataclass(frozen=True, eq=False)
class Outer(HoloFn):
    """Zero-free function with prescribed boundary modulus exp(log_modulus).

    ``log_modulus`` is sampled at the angles ``offset + 2 pi j / n``.  The
    Herglotz integral of the band-limited interpolant gives
    ``log Out(z) = a_0 + 2 sum_k a_k z^k``.
    """

    log_modulus: np.ndarray
    offset: float = 0.0
    kind: ClassVar[str] = "outer"

    def __post_init__(self):
        lm = np.asarray(self.log_modulus, dtype=float)
        if lm.ndim != 1 or len(lm) < 2 or not np.all(np.isfinite(lm)):
            raise ValueError("log modulus samples must be a finite 1-d array")
        lm.setflags(write=False)
        object.__setattr__(self, "log_modulus", lm)
        n = len(lm)
        k = np.arange(n // 2 + 1)
        a = np.fft.rfft(lm) / n * np.exp(-1j * k * self.offset)
        herg = 2.0 * a
        herg[0] = a[0].real
        if n % 2 == 0:
            herg[-1] = a[-1]  # Nyquist mode split evenly
        object.__setattr__(self, "_herglotz", herg)

    def _log(self, z):
        return np.polyval(self._herglotz[::-1], np.asarray(z, dtype=complex))

    def __call__(self, z):
        return np.exp(self._log(z))

    def deriv(self, z):
        d = np.polyder(self._herglotz[::-1])
        return np.polyval(d, np.asarray(z, dtype=complex)) * self(z)

    def zeros(self):
        return np.zeros(0, dtype=complex)

    def __eq__(self, other):
        return (
            isinstance(other, Outer)
            and self.offset == other.offset
            and np.array_equal(self.log_modulus, other.log_modulus)
        )

    __hash__ = None

    def reciprocal(self) -> "Outer":
        return Outer(-self.log_modulus, self.offset)

    def to_dict(self):
        return {"kind": self.kind, "log_modulus": [float(x) for x in self.log_modulus], "offset": self.offset}

    @classmethod
    def from_dict(cls, d):
        return cls(np.array(d["log_modulus"], dtype=float), float(d.get("offset", 0.0)))


@dataclass(frozen=True)
class Product(HoloFn):
    """scale * prod(factors)."""

    factors: tuple
    scale: complex = 1.0
    kind: ClassVar[str] = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        object.__setattr__(self, "scale", complex(self.scale))

    def __call__(self, z):
        out = self.scale * np.ones_like(np.asarray(z, dtype=complex))
        for f in self.factors:
            out = out * f(z)
        return out

    def deriv(self, z):
        vals = [f(z) for f in self.factors]
        ders = [f.deriv(z) for f in self.factors]
        total = np.zeros_like(np.asarray(z, dtype=complex))
        for i in range(len(self.factors)):
            term = ders[i]
            for j, v in enumerate(vals):
                if j != i:
                    term = term * v
            total = total + term
        return self.scale * total

    def zeros(self):
        if self.scale == 0:
            raise ValueError("zero function has no finite zero set")
        parts = [f.zeros() for f in self.factors]
        return sort_points(np.concatenate(parts)) if parts else np.zeros(0, dtype=complex)

    def to_dict(self):
        return {"kind": self.kind, "scale": cpair(self.scale), "factors": [f.to_dict() for f in self.factors]}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(holofn_from_dict(f) for f in d["factors"]), from_cpair(d.get("scale", 1.0)))


def constant(c: complex) -> Polynomial:
    return Polynomial((complex(c),))


def holofn_from_dict(d: dict) -> HoloFn:
    from . import blaschke  # registers blaschke kinds

    registry = {
        Polynomial.kind: Polynomial,
        Rational.kind: Rational,
        Outer.kind: Outer,
        Product.kind: Product,
        blaschke.BlaschkeProduct.kind: blaschke.BlaschkeProduct,
        blaschke.BlaschkeDerivative.kind: blaschke.BlaschkeDerivative,
        blaschke.MobiusComposed.kind: blaschke.MobiusComposed,
    }
    try:
        cls = registry[d["kind"]]
    except KeyError:
        raise ValueError(f"unknown HoloFn kind {d.get('kind')!r}") from None
    return cls.from_dict(d)
