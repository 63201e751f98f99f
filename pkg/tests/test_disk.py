import numpy as np
import pytest
from conftest import small_polys
from hypothesis import given
from hypothesis import strategies as st

from gcelab.grid import DiskGrid, ScalarField, make_grid
from gcelab.holo import Outer, Polynomial, constant
from gcelab.potential import (
    BlaschkeMeasureSpec,
    bergman_norm,
    blaschke_mass,
    green_potential,
    littlewood_paley,
    outer_function,
    poisson_extend,
)


def test_grid_shape_invariants(g64):
    assert np.all((g64.radii > 0) & (g64.radii < 1))
    assert np.all(np.diff(g64.radii) > 0)
    assert np.all(np.diff(g64.angles) > 0)
    assert g64.angles[-1] - g64.angles[0] < 2 * np.pi
    assert np.all(g64.quad_weights > 0)


@pytest.mark.parametrize("n_r,n_t,p,tol", [(8, 16, 1.0, 1e-2), (64, 128, 2.0, 1e-6)])
def test_total_area(n_r, n_t, p, tol):
    g = make_grid(n_r, n_t, p)
    assert abs(g.quad_weights.sum() - np.pi) <= tol


def test_weighted_area(g64):
    assert abs(g64.integrate(1 - np.abs(g64.points)) - np.pi / 3) <= 1e-4


@pytest.mark.parametrize("k", range(9))
def test_radial_moments(g64, k):
    exact = 2 * np.pi / (k + 2)
    assert abs(g64.integrate(np.abs(g64.points) ** k) / exact - 1) <= 1e-4


def test_bad_grids():
    with pytest.raises(ValueError):
        make_grid(0, 16)
    with pytest.raises(ValueError):
        make_grid(8, 16, 0.5)


def test_grid_dict_round_trip(g64):
    assert DiskGrid.from_dict(g64.to_dict()) == g64


def test_poisson_constant(g64):
    P = poisson_extend(3.0, g64)
    assert np.max(np.abs(P.values - 3)) < 1e-13
    assert abs(P.center - 3) < 1e-13


@pytest.mark.parametrize("k", [1, 2])
def test_poisson_monomials(g64, k):
    P = poisson_extend(lambda z: np.cos(k * np.angle(z)), g64)
    assert np.max(np.abs(P.values - (g64.points**k).real)) <= 1e-4


def test_poisson_discrete_harmonicity():
    # second order away from the first ring, first order on it (the center cell averages angles)
    for n in (32, 64):
        g = make_grid(n, 2 * n, 2.0)
        P = poisson_extend(lambda z: np.cos(3 * np.angle(z)) + 0.5 * np.sin(np.angle(z)), g)
        lap = np.abs(g.laplacian(P).values)
        h = max(np.max(np.diff(np.r_[0, g.radii, 1])), g.dtheta)
        assert lap[1:].max() <= 8 * h**2
        assert lap[0].max() <= h
        assert abs(g.laplacian(P).center) < 1e-10


def test_green_area_measure(g64):
    G = green_potential(BlaschkeMeasureSpec(lambda z: np.ones(np.shape(z))), g64)
    assert np.max(np.abs(G.values - (1 - np.abs(g64.points) ** 2) / 4)) <= 1e-3
    assert np.all(G.boundary_trace == 0)


def test_green_point_mass_at_origin(g64):
    G = green_potential(BlaschkeMeasureSpec(point_masses=((0, 1.0),)), g64)
    exact = np.log(1 / np.abs(g64.points)) / (2 * np.pi)
    np.testing.assert_allclose(G.values, exact, rtol=1e-13, atol=1e-15)
    assert G.center is None


def test_green_z_density_center(g64):
    G = green_potential(BlaschkeMeasureSpec(Polynomial((0, 1))), g64)
    assert abs(G.center - 1 / 16) <= 1e-3


@given(a=st.floats(0, 3), b=st.floats(0, 3), seed=st.integers(0, 2**31))
def test_green_linear_and_nonnegative(g32, a, b, seed):
    rng = np.random.default_rng(seed)
    d1 = ScalarField(g32, rng.uniform(0, 2, g32.shape))
    d2 = ScalarField(g32, rng.uniform(0, 2, g32.shape))
    G1 = green_potential(BlaschkeMeasureSpec(d1), g32)
    G2 = green_potential(BlaschkeMeasureSpec(d2), g32)
    G = green_potential(BlaschkeMeasureSpec(d1 * a + d2 * b), g32)
    scale = 1 + a + b
    assert np.max(np.abs(G.values - a * G1.values - b * G2.values)) <= 1e-13 * scale
    assert G1.values.min() >= 0 and G.values.min() >= 0


def test_point_mass_validation():
    with pytest.raises(ValueError):
        BlaschkeMeasureSpec(point_masses=((1.2, 1.0),))
    with pytest.raises(ValueError):
        BlaschkeMeasureSpec(point_masses=((0.2, -1.0),))


def test_blaschke_mass_point(g32):
    mu = BlaschkeMeasureSpec(point_masses=((0.5, 2.0),))
    assert blaschke_mass(mu, g32) == pytest.approx(1.5)


def test_outer_constant(g64):
    O = outer_function(2.5, g64)
    assert np.max(np.abs(O(g64.points) - 2.5)) < 1e-12


def test_outer_zero_free_polynomial(g64):
    O = outer_function(lambda z: np.abs(2 - z), g64)
    z = g64.points
    ratio = O(z) / (2 - z)
    assert np.max(np.abs(ratio - ratio.flat[0])) <= 1e-4
    assert abs(abs(ratio.flat[0]) - 1) <= 1e-4


def test_outer_for_scaled_identity(g64):
    O = outer_function(lambda z: 1 - np.abs(0.5 * z) ** 2, g64)
    assert np.max(np.abs(O(g64.points) - 0.75)) < 1e-12


def test_outer_clips_log(g64, caplog):
    O = outer_function(lambda z: np.full(np.shape(z), np.exp(60.0)), g64)
    assert "clipped" in caplog.text
    assert abs(O(np.array([0j]))[0] - np.exp(40.0)) < 1e-6 * np.exp(40.0)


@given(p1=small_polys(3, 0.5), p2=small_polys(3, 0.5))
def test_outer_multiplicative(g32, p1, p2):
    w1 = lambda z: np.abs(1 + p1(z))  # noqa: E731
    w2 = lambda z: np.abs(2 + p2(z))  # noqa: E731
    O = outer_function(lambda z: w1(z) * w2(z), g32)
    ratio = O(g32.points) / (outer_function(w1, g32)(g32.points) * outer_function(w2, g32)(g32.points))
    assert np.max(np.abs(ratio - ratio.flat[0])) <= 1e-4


def test_outer_reciprocal_and_dict(g32):
    O = outer_function(lambda z: np.abs(3 + z), g32)
    z = g32.points[:5]
    np.testing.assert_allclose(O(z) * O.reciprocal()(z), 1, atol=1e-13)
    assert Outer.from_dict(O.to_dict()) == O


@pytest.mark.parametrize(
    "f,exact",
    [(constant(1), np.sqrt(np.pi / 3)), (Polynomial((0, 1)), np.sqrt(np.pi / 10)), (constant(0), 0.0)],
)
def test_bergman(g64, f, exact):
    assert abs(bergman_norm(f, 2, 1, g64) - exact) <= 1e-4


def test_littlewood_paley_examples(g128):
    lhs, rhs = littlewood_paley(Polynomial((0, 1)), g128)
    assert lhs == pytest.approx(1) and abs(rhs - 1) <= 1e-3
    lhs, rhs = littlewood_paley(constant(5), g128)
    assert lhs == pytest.approx(25) and rhs == pytest.approx(25, rel=1e-12)
    lhs, rhs = littlewood_paley(Polynomial((3, 0, 1)), g128)
    assert lhs == pytest.approx(10) and abs(rhs - 10) <= 1e-3


@given(f=small_polys(8, 3.0))
def test_littlewood_paley_random(g128, f):
    lhs, rhs = littlewood_paley(f, g128)
    assert abs(lhs - rhs) / lhs <= 1e-3
