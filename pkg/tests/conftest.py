import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gcelab.blaschke import BlaschkeProduct
from gcelab.grid import make_grid

settings.register_profile(
    "gcelab", deadline=None, max_examples=25, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("gcelab")


@st.composite
def disk_points(draw, rmax=0.9):
    r = draw(st.floats(0.0, rmax))
    t = draw(st.floats(0.0, 2 * np.pi))
    return complex(r * np.cos(t), r * np.sin(t))


@st.composite
def blaschke_products(draw, max_degree=3, rmax=0.9):
    d = draw(st.integers(1, max_degree))
    zeros = tuple(draw(disk_points(rmax)) for _ in range(d))
    return BlaschkeProduct(zeros, draw(st.floats(0.0, 2 * np.pi)))


@st.composite
def small_polys(draw, max_degree=3, size=1.0):
    from gcelab.holo import Polynomial

    d = draw(st.integers(0, max_degree))
    c = np.array([draw(disk_points(1.0)) for _ in range(d + 1)])
    s = np.sum(np.abs(c))
    if s < 1e-3:
        c[0] += 1.0
        s = np.sum(np.abs(c))
    return Polynomial(tuple(c * size / s))


@pytest.fixture(scope="session")
def g64():
    return make_grid(64, 128, 2.0)


@pytest.fixture(scope="session")
def g32():
    return make_grid(32, 64, 2.0)


@pytest.fixture(scope="session")
def g128():
    return make_grid(128, 256, 2.0)


@pytest.fixture(scope="session")
def g128_flat():
    return make_grid(128, 256, 1.0)
