import numpy as np
import pytest

from moebius_lab import frames, lifts, surfaces
from moebius_lab._prng import SplitMix64


@pytest.fixture(scope="session")
def clifford():
    return surfaces.catalog_get("clifford")


@pytest.fixture(scope="session")
def product_torus():
    return surfaces.catalog_get("product-torus:a=0.8")


@pytest.fixture(scope="session")
def great_sphere():
    return surfaces.catalog_get("great-sphere:n=3")


@pytest.fixture(scope="session")
def catalog(clifford, product_torus, great_sphere):
    return [clifford, product_torus, great_sphere]


def seeded_points(count, seed, box=((0.1, 5.9), (0.1, 5.9))):
    """Deterministic pseudo-random evaluation points."""
    rng = SplitMix64(seed)
    (u0, u1), (v0, v1) = box
    return [(rng.uniform(u0, u1), rng.uniform(v0, v1)) for _ in range(count)]


# session-cached heavy grid passes, shared between module and acceptance tests


@pytest.fixture(scope="session")
def field_clifford_zero_64(clifford):
    return frames.frame_field(clifford, lifts.MuSpec.parse("zero"), 64, 64)


@pytest.fixture(scope="session")
def field_clifford_mero_64(clifford):
    return frames.frame_field(clifford, lifts.MuSpec.parse("meromorphic:-3-3i"), 64, 64)


@pytest.fixture(scope="session")
def field_product_64(product_torus):
    return frames.frame_field(product_torus, lifts.MuSpec.parse("constant"), 64, 64)


@pytest.fixture(scope="session")
def mc_convergence_errors(clifford):
    """max |alpha_numeric - alpha_closed| for grids 32, 64, 128."""
    mu = lifts.MuSpec.parse("zero")
    errors = {}
    for size in (32, 64, 128):
        field = frames.frame_field(clifford, mu, size, size)
        au_n, av_n = frames.maurer_cartan_numeric(field)
        au_c, av_c = frames.closed_alpha_uv(field)
        errors[size] = max(
            float(np.max(np.abs(au_n - au_c))), float(np.max(np.abs(av_n - av_c)))
        )
    return errors
