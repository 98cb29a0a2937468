import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stableopinf.dynamics import QuadraticModel, Trajectory
from stableopinf.fom import build_burgers
from stableopinf.pod import (RankError, assemble_snapshots, galerkin_reduce, pod_basis,
                             project_trajectory, reduce_quadratic)
from stableopinf.quadform import compress_square, expand_quadratic

from conftest import random_model


def test_assemble_snapshots(rng):
    X = rng.standard_normal((4, 5))
    np.testing.assert_array_equal(assemble_snapshots([X]), X)
    Y, Z = rng.standard_normal((4, 3)), rng.standard_normal((4, 4))
    S = assemble_snapshots([Trajectory(Y, None, 0.1), Z])
    assert S.shape == (4, 7)
    np.testing.assert_array_equal(S[:, :3], Y)
    with pytest.raises(ValueError):
        assemble_snapshots([])
    with pytest.raises(ValueError):
        assemble_snapshots([Y, rng.standard_normal((3, 2))])


def test_pod_examples(rng):
    b = pod_basis(np.eye(3), 2)
    np.testing.assert_allclose(b.V.T @ b.V, np.eye(2), atol=1e-15)
    assert np.count_nonzero(np.abs(b.V) > 0.5) == 2
    v = rng.standard_normal(6)
    b = pod_basis(np.outer(v, rng.standard_normal(9)), 1)
    np.testing.assert_allclose(np.abs(b.V[:, 0]), np.abs(v) / np.linalg.norm(v), rtol=1e-12)
    with pytest.raises(RankError):
        pod_basis(np.outer(v, rng.standard_normal(9)), 2)
    with pytest.raises(RankError):
        pod_basis(np.zeros((3, 3)), 1)


def test_pod_eckart_young(rng):
    X = rng.standard_normal((20, 50))
    b = pod_basis(X, 5)
    err = np.linalg.norm(X - b.V @ b.V.T @ X) ** 2
    assert err == pytest.approx(np.sum(b.singular_values[5:] ** 2), rel=1e-12)
    assert np.all(np.diff(b.singular_values) <= 0)
    assert b.singular_values.size == 20
    assert np.linalg.norm(b.V.T @ b.V - np.eye(5)) <= 1e-10


def test_pod_sign_convention(rng):
    b = pod_basis(rng.standard_normal((10, 30)), 4)
    for col in b.V.T:
        assert col[np.abs(col).argmax()] > 0
    flipped = pod_basis(-rng.standard_normal((10, 30)), 3)
    for col in flipped.V.T:
        assert col[np.abs(col).argmax()] > 0


def test_truncate(rng):
    b = pod_basis(rng.standard_normal((8, 12)), 5)
    np.testing.assert_array_equal(b.truncate(2).V, b.V[:, :2])
    with pytest.raises(RankError):
        b.truncate(6)


def test_project_trajectory(rng):
    V = np.linalg.qr(rng.standard_normal((7, 3)))[0]
    Y = rng.standard_normal((3, 5))
    np.testing.assert_allclose(project_trajectory(V @ Y, V), Y, atol=1e-14)
    assert np.all(project_trajectory(np.zeros((7, 4)), V) == 0)
    X = rng.standard_normal((7, 5))
    np.testing.assert_allclose(project_trajectory(V @ V.T @ X, V), V.T @ X, atol=1e-13)
    with pytest.raises(ValueError):
        project_trajectory(np.zeros((6, 2)), V)


def test_galerkin_identity_projection(rng):
    m = random_model(rng, 4, p=2, constant=True)
    r = galerkin_reduce(m, np.eye(4))
    for name in ("A", "B", "F", "c"):
        np.testing.assert_allclose(getattr(r, name), getattr(m, name), rtol=1e-14, atol=1e-15)


def test_galerkin_zero_quadratic(rng):
    m = random_model(rng, 5, scale=0.0)
    V = np.linalg.qr(rng.standard_normal((5, 2)))[0]
    assert np.all(galerkin_reduce(m, V).F == 0)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_galerkin_quadratic_identity(seed):
    rng = np.random.default_rng(seed)
    m = random_model(rng, 4)
    V = np.linalg.qr(rng.standard_normal((4, 2)))[0]
    Fh = galerkin_reduce(m, V).F
    H = expand_quadratic(m.F)
    x = rng.standard_normal(2)
    y = V @ x
    np.testing.assert_allclose(Fh @ compress_square(x), V.T @ H @ np.kron(y, y), atol=1e-12)


def test_sparse_and_dense_reduction_agree(rng):
    m = build_burgers(12, 30.0)
    V = np.linalg.qr(rng.standard_normal((12, 3)))[0]
    np.testing.assert_allclose(reduce_quadratic(m.F, V), reduce_quadratic(m.F.toarray(), V),
                               rtol=1e-13, atol=1e-13)


def test_galerkin_preserves_symmetric_definiteness(rng):
    G = rng.standard_normal((6, 6))
    A = -(G @ G.T + np.eye(6))
    m = QuadraticModel(A, np.ones((6, 1)), np.zeros((6, 21)))
    V = np.linalg.qr(rng.standard_normal((6, 3)))[0]
    Ar = galerkin_reduce(m, V).A
    assert np.abs(Ar - Ar.T).max() <= 1e-13
    assert np.linalg.eigvalsh((Ar + Ar.T) / 2).max() < 0
