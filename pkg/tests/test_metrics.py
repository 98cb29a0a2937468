import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stableopinf.dynamics import Trajectory
from stableopinf.metrics import (DIVERGED, ErrorRow, relative_error, summed_error,
                                 test_error as compute_test_error, train_error)


def orthonormal(rng, N, n):
    return np.linalg.qr(rng.standard_normal((N, n)))[0]


def test_truth_against_itself_is_zero(rng):
    X = rng.standard_normal((5, 8))
    assert relative_error(np.eye(5), X, X) == 0.0


def test_projection_floor_and_zero_prediction(rng):
    V = orthonormal(rng, 6, 2)
    Xs = [rng.standard_normal((6, 10)) for _ in range(3)]
    floor = sum(np.linalg.norm(V @ V.T @ X - X) / np.linalg.norm(X) for X in Xs)
    assert train_error(V, [V.T @ X for X in Xs], Xs) == pytest.approx(floor, rel=1e-14)
    assert train_error(V, [np.zeros((2, 10))] * 3, Xs) == pytest.approx(3.0, rel=1e-15)


def test_divergence_is_sentinel(rng):
    V = orthonormal(rng, 4, 2)
    X = rng.standard_normal((4, 5))
    bad = np.full((2, 5), np.nan)
    assert relative_error(V, bad, X) == DIVERGED
    t = Trajectory(np.zeros((2, 5)), np.zeros((1, 4)), 0.1, diverged=True)
    assert summed_error(V, [V.T @ X, t], [X, X]) == DIVERGED
    assert DIVERGED > 1e300


def test_test_error_variants(rng):
    V = np.eye(3)
    X = rng.standard_normal((3, 4))
    zero = np.zeros_like(X)
    nested_p = [[zero] * 5 for _ in range(7)]
    nested_t = [[X] * 5 for _ in range(7)]
    assert compute_test_error(V, nested_p, nested_t, "double") == pytest.approx(35.0)
    assert compute_test_error(V, [zero] * 7, [X] * 7, "single") == pytest.approx(7.0)
    nested_p[3][2] = np.full_like(X, np.inf)
    assert compute_test_error(V, nested_p, nested_t, "double") == DIVERGED
    with pytest.raises(ValueError):
        compute_test_error(V, [], [], "triple")


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_orthogonal_change_of_basis_invariance(seed):
    rng = np.random.default_rng(seed)
    V = orthonormal(rng, 8, 3)
    Q = orthonormal(rng, 3, 3)
    X = rng.standard_normal((8, 6))
    Xhat = rng.standard_normal((3, 6))
    a = relative_error(V, Xhat, X)
    b = relative_error(V @ Q, Q.T @ Xhat, X)
    assert b == pytest.approx(a, rel=1e-12)


def test_error_row_dict():
    row = ErrorRow("pir", 4, 0.1, 0.2, 0.3, False, 1e-3)
    assert row.as_dict() == {"method": "pir", "n": 4, "e_train": 0.1, "e_test": 0.2,
                             "rho": 0.3, "diverged": False, "lambda": 1e-3}
