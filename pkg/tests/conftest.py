import numpy as np
import pytest

from stableopinf.dynamics import QuadraticModel
from stableopinf.quadform import num_quadratic


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_model(rng, n, p=1, scale=1.0, stable=True, constant=False):
    """Random quadratic model; ``A`` is shifted to be Hurwitz when ``stable``."""
    A = rng.standard_normal((n, n))
    if stable:
        A -= (np.abs(np.linalg.eigvals(A)).max() + 1.0) * np.eye(n)
    B = rng.standard_normal((n, p))
    F = scale * rng.standard_normal((n, num_quadratic(n)))
    c = rng.standard_normal(n) if constant else None
    return QuadraticModel(A, B, F, c)
