"""Inverse critical-point problem: the Blaschke product with prescribed critical set."""

from __future__ import annotations

import logging

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from .blaschke import BlaschkeProduct, critical_points
from .holo import poly_roots, sort_points

log = logging.getLogger(__name__)

STEP_FLOOR = 1e-4


class HeinsError(RuntimeError):
    def __init__(self, msg: str, last_good: float | None = None, residual: float | None = None):
        super().__init__(msg)
        self.last_good = last_good
        self.residual = residual


def _as_points(C) -> np.ndarray:
    C = np.atleast_1d(np.asarray(C, dtype=complex))
    if np.any(np.abs(C) >= 1.0):
        raise ValueError("critical points must lie in the open unit disk")
    return C


def match_multisets(A, B) -> tuple[float, np.ndarray]:
    """Optimal assignment distance (max over matched pairs) and the matching permutation."""
    A, B = np.asarray(A, dtype=complex), np.asarray(B, dtype=complex)
    if len(A) != len(B):
        return np.inf, np.zeros(0, dtype=int)
    if len(A) == 0:
        return 0.0, np.zeros(0, dtype=int)
    cost = np.abs(A[:, None] - B[None, :])
    row, col = linear_sum_assignment(cost)
    return float(np.max(cost[row, col])), col


def _den(a):
    # prod(1 - conj(a_k) z), ascending, safe when some a_k = 0
    out = np.ones(1, dtype=complex)
    for ak in a:
        out = P.polymul(out, [1.0, -np.conj(ak)])
    return out


def _remainder(x: np.ndarray, crit: np.ndarray) -> np.ndarray:
    a = np.concatenate([[0j], x[0::2] + 1j * x[1::2]])
    num = P.polyfromroots(a)
    den = _den(a)
    N = P.polysub(P.polymul(P.polyder(num), den), P.polymul(num, P.polyder(den)))
    T = P.polyfromroots(crit)
    _, rem = P.polydiv(N, T)
    rem = np.resize(np.pad(rem, (0, max(0, len(crit) - len(rem)))), len(crit))
    return np.concatenate([rem.real, rem.imag])


def _newton(x0: np.ndarray, crit: np.ndarray, tol: float = 1e-14, max_iter: int = 40):
    x = x0.copy()
    r = _remainder(x, crit)
    for _ in range(max_iter):
        nr = np.linalg.norm(r)
        if nr <= tol:
            return x, nr
        h = 1e-7
        J = np.empty((len(r), len(x)))
        for k in range(len(x)):
            e = np.zeros_like(x)
            e[k] = h
            J[:, k] = (_remainder(x + e, crit) - _remainder(x - e, crit)) / (2 * h)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-6:
            cand = x + t * step
            a = cand[0::2] + 1j * cand[1::2]
            if np.all(np.abs(a) < 1.0):
                rc = _remainder(cand, crit)
                if np.linalg.norm(rc) < nr:
                    break
            t *= 0.5
        else:
            return x, nr
        x, r = cand, rc
    return x, float(np.linalg.norm(r))


def _initial_zeros(crit: np.ndarray) -> np.ndarray:
    """Nonzero roots of the polynomial p with p(0) = 0 and p' = d * prod(z - c)."""
    dp = P.polyfromroots(crit) * (len(crit) + 1)
    p = P.polyint(dp)
    roots = poly_roots(p)
    k = np.argmin(np.abs(roots))
    return np.delete(roots, k)


def _pack(a):
    x = np.empty(2 * len(a))
    x[0::2], x[1::2] = a.real, a.imag
    return x


def heins_solve(C, tol: float = 1e-6, via=None, t0: float | None = None) -> BlaschkeProduct:
    """Degree-(len(C)+1) Blaschke product with critical set C, zero at 0 and rotation 0.

    Continuation along straight segments in critical-point space starting
    near the origin (where the answer is close to a polynomial); ``via``
    lists optional intermediate critical sets.
    """
    C = _as_points(C)
    d = len(C) + 1
    if d > 9:
        raise ValueError("degree above desk scale (d <= 8 expected)")
    if np.all(C == 0):
        return BlaschkeProduct((0j,) * d, 0.0)
    stops = [_as_points(w) for w in (via or [])] + [C]
    for w in stops:
        if len(w) != len(C):
            raise ValueError("waypoints must have the same size as C")
    first = stops[0]
    scale = max(np.max(np.abs(first)), 1e-12)
    s0 = t0 if t0 is not None else min(1.0, 0.05 / scale)
    start = s0 * first
    x = _pack(_initial_zeros(start))
    x, res = _newton(x, start)
    if res > 1e-10:
        raise HeinsError("Newton failed at the homotopy start", 0.0, res)
    segments = [(start, first)] + list(zip(stops[:-1], stops[1:]))
    for A, B in segments:
        t, dt = 0.0, 0.1
        while t < 1.0:
            step = min(dt, 1.0 - t)
            target = (1 - (t + step)) * A + (t + step) * B
            cand, res = _newton(x, target)
            if res <= 1e-12:
                x, t = cand, t + step
                dt = min(2 * dt, 0.25)
            else:
                dt = step / 2
                if dt < STEP_FLOOR:
                    raise HeinsError(f"homotopy step below floor at t = {t:.6g}", t, res)
    a = np.concatenate([[0j], x[0::2] + 1j * x[1::2]])
    B = BlaschkeProduct(tuple(a), 0.0)
    dist, _ = match_multisets(critical_points(B), C)
    if dist > tol:
        raise HeinsError(f"critical points off by {dist:.3g}", 1.0, dist)
    return B


def heins_report(B: BlaschkeProduct, C) -> dict:
    """Assignment residual table for a computed product."""
    C = sort_points(_as_points(C))
    cp = critical_points(B)
    dist, perm = match_multisets(C, cp)
    rows = [
        {"target": [c.real, c.imag], "found": [cp[j].real, cp[j].imag], "distance": float(abs(c - cp[j]))}
        for c, j in zip(C, perm)
    ]
    return {"max_distance": dist, "assignment": rows}


def degree_two_zero(c: complex) -> complex:
    """Closed form: z (z - a) / (1 - conj(a) z) has critical point c iff a = 2c / (1 + |c|^2)."""
    c = complex(c)
    return 2 * c / (1 + abs(c) ** 2)


def bruteforce_degree_two(c: complex, n: int = 201) -> complex:
    """Grid search plus complex Newton over the free zero a, independent of the homotopy."""
    c = complex(c)

    def crit(a):
        # numerator of B' for B = z (z - a)/(1 - conj(a) z): -conj(a) z^2 + 2 z - a
        if a == 0:
            return 0j
        r = np.roots([-np.conj(a), 2.0, -a])
        return r[np.argmin(np.abs(r))]

    xs = np.linspace(-0.99, 0.99, n)
    best, best_err = 0j, np.inf
    for x in xs:
        for y in xs:
            a = complex(x, y)
            if abs(a) >= 0.99:
                continue
            err = abs(crit(a) - c)
            if err < best_err:
                best, best_err = a, err
    a = best
    for _ in range(50):
        f = crit(a) - c
        if abs(f) < 1e-15:
            break
        h = 1e-7
        fx = (crit(a + h) - crit(a - h)) / (2 * h)
        fy = (crit(a + 1j * h) - crit(a - 1j * h)) / (2 * h)
        J = np.array([[fx.real, fy.real], [fx.imag, fy.imag]])
        dx, dy = np.linalg.solve(J, [-f.real, -f.imag])
        a = a + complex(dx, dy)
    return a
