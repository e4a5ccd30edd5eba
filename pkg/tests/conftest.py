import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dirichlet_table(rng, dims, alpha=1.0):
    n = int(np.prod(dims))
    return rng.dirichlet(np.full(n, alpha)).reshape(dims)
