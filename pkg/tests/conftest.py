import numpy as np
import pytest

from bezsimplex import DegenerateSimplexError, Simplex, standard_simplex


def random_simplex(rng, dimension, scale=1.0):
    """Random non-degenerate simplex with vertices in [-scale, scale]^D."""
    while True:
        vertices = rng.uniform(-scale, scale, size=(dimension + 1, dimension))
        try:
            return Simplex(vertices)
        except DegenerateSimplexError:
            continue


def interior_weights(rng, dimension, count):
    """Strictly interior barycentric weights, rows summing to one."""
    return rng.dirichlet(np.ones(dimension + 1), size=count)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def unit_interval():
    return Simplex([[0.0], [1.0]])


@pytest.fixture
def triangle():
    return standard_simplex(2)
