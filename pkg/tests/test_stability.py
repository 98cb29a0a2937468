import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st

from stableopinf.dynamics import QuadraticModel
from stableopinf.stability import (DiagonalizabilityError, StabilityError, is_hurwitz,
                                   reflect_eigenvalues, solve_lyapunov, stability_radius)

from conftest import random_model


def test_lyapunov_examples():
    np.testing.assert_allclose(solve_lyapunov(-np.eye(2), np.eye(2)), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(solve_lyapunov(np.diag([-1.0, -2.0]), np.eye(2)),
                               np.diag([0.5, 0.25]), atol=1e-15)


def test_lyapunov_matches_scipy(rng):
    for n in range(1, 11):
        A = random_model(rng, n).A
        Q = rng.standard_normal((n, n))
        Q = Q @ Q.T
        P = solve_lyapunov(A, Q)
        assert np.linalg.norm(A.T @ P + P @ A + Q) <= 1e-10 * np.linalg.norm(Q)
        np.testing.assert_allclose(P, sla.solve_continuous_lyapunov(A.T, -Q), rtol=1e-8,
                                   atol=1e-12)
        np.testing.assert_array_equal(P, P.T)


def test_lyapunov_residual_property(rng):
    for _ in range(100):
        n = int(rng.integers(1, 11))
        A = random_model(rng, n).A
        P = solve_lyapunov(A, np.eye(n))
        assert np.linalg.norm(A.T @ P + P @ A + np.eye(n)) <= 1e-10 * np.sqrt(n)
        assert np.linalg.eigvalsh(P).min() > 0


def test_lyapunov_rejects_unstable():
    with pytest.raises(StabilityError):
        solve_lyapunov(np.eye(2), np.eye(2))


def test_is_hurwitz_examples():
    assert is_hurwitz(-np.eye(3))
    assert not is_hurwitz([[0.0, 1.0], [-1.0, 0.0]])
    assert is_hurwitz([[-1.0, 100.0], [0.0, -1.0]])
    assert not is_hurwitz([[1.0]])


def test_radius_worked_example():
    F = np.zeros((2, 3))
    F[0, 0] = 1.0  # ||H||_F = ||F||_F = 1 for a diagonal pair
    r = stability_radius(QuadraticModel(-np.eye(2), np.zeros((2, 1)), F))
    assert r.hurwitz and r.sigma_min_L == 1.0
    assert r.rho == pytest.approx(1 / (2 * (np.sqrt(2) / 2) ** 0.5), rel=1e-14)
    assert r.rho == pytest.approx(0.594604, abs=1e-6)


def test_radius_sentinels():
    r = stability_radius(QuadraticModel(-np.eye(2), np.zeros((2, 1)), np.zeros((2, 3))))
    assert r.rho == np.inf and r.hurwitz
    r = stability_radius(QuadraticModel(np.eye(2), np.zeros((2, 1)), np.ones((2, 3))))
    assert not r.hurwitz and np.isnan(r.rho)


def test_radius_scaling_and_monotonicity(rng):
    m = random_model(rng, 4)
    r1 = stability_radius(m).rho
    r2 = stability_radius(QuadraticModel(m.A, m.B, 2 * m.F)).rho
    assert r2 == pytest.approx(r1 / 2, rel=1e-14)
    radii = [stability_radius(QuadraticModel(m.A, m.B, s * m.F)).rho for s in (0.5, 1, 1.5, 3)]
    assert all(b < a for a, b in zip(radii, radii[1:]))


def test_radius_zero_filled_kronecker_norm():
    # an off-diagonal coefficient lands in a single column of H, so ||H|| = ||F||
    F = np.zeros((2, 3))
    F[0, 1] = 2.0
    m = QuadraticModel(-np.eye(2), np.zeros((2, 1)), F)
    assert stability_radius(m).rho == pytest.approx(1 / (2 * 2 ** -0.25 * 2), rel=1e-14)


def test_reflect_examples():
    np.testing.assert_allclose(reflect_eigenvalues(np.diag([2.0, -3.0]), 1e-10),
                               np.diag([-1e-10, -3.0]), atol=1e-15)
    A = random_model(np.random.default_rng(0), 4).A
    np.testing.assert_array_equal(reflect_eigenvalues(A), A)
    R = reflect_eigenvalues(np.array([[1.0, 2.0], [-2.0, 1.0]]), 1e-10)
    assert np.isrealobj(R)
    w = np.sort_complex(np.linalg.eigvals(R))
    np.testing.assert_allclose(w.real, [-1e-10, -1e-10], atol=1e-12)
    np.testing.assert_allclose(w.imag, [-2.0, 2.0], atol=1e-10)


def test_reflect_rejects_defective():
    with pytest.raises(DiagonalizabilityError):
        reflect_eigenvalues(np.array([[1.0, 1.0], [0.0, 1.0]]))


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8))
def test_reflect_properties(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((n, n))
    try:
        R = reflect_eigenvalues(A, 1e-3)
    except DiagonalizabilityError:
        return
    assert np.isrealobj(R) and is_hurwitz(R)
    stable = np.sort_complex(np.linalg.eigvals(A)[np.linalg.eigvals(A).real < 0])
    kept = np.linalg.eigvals(R)
    for lam in stable:
        assert np.min(np.abs(kept - lam)) <= 1e-8 * max(1.0, abs(lam))
    np.testing.assert_allclose(reflect_eigenvalues(R, 1e-3), R, atol=1e-10)
