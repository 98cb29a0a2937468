"""Lyapunov-based stability radius of quadratic models and Hurwitz repair."""

from dataclasses import dataclass

import numpy as np

from .quadform import expand_quadratic

EIGVEC_COND_MAX = 1e12


class StabilityError(ValueError):
    """Linear operator is not Hurwitz where a Hurwitz operator is required."""


class DiagonalizabilityError(np.linalg.LinAlgError):
    """Eigenvector matrix too ill-conditioned for eigenvalue reflection."""


@dataclass
class StabilityReport:
    rho: float
    P: np.ndarray
    hurwitz: bool
    sigma_min_L: float = 1.0


def is_hurwitz(A):
    """True if every eigenvalue of ``A`` has strictly negative real part."""
    return bool(np.all(np.linalg.eigvals(np.atleast_2d(A)).real < 0))


def solve_lyapunov(A, Q):
    """Solve ``A^T P + P A = -Q`` by Kronecker vectorization.

    Intended for small ``n``; the linear system has size ``n^2``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    if not is_hurwitz(A):
        raise StabilityError("Lyapunov solve requires a Hurwitz matrix")
    n = A.shape[0]
    I = np.eye(n)
    # column-major vec: vec(A^T P) = (I kron A^T) vec(P), vec(P A) = (A^T kron I) vec(P)
    K = np.kron(I, A.T) + np.kron(A.T, I)
    try:
        p = np.linalg.solve(K, -Q.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"singular Lyapunov system: {exc}") from exc
    P = p.reshape(n, n, order="F")
    return (P + P.T) / 2


def stability_radius(model):
    """Radius ``1 / (2 sqrt(||P||_F) ||H||_F)`` with ``L = I`` (so ``Q = I``).

    Returns a report with ``hurwitz=False`` and ``rho=nan`` if ``A`` is not
    Hurwitz, and ``rho=inf`` when the quadratic operator vanishes.
    """
    A = model.A
    n = A.shape[0]
    if not is_hurwitz(A):
        return StabilityReport(np.nan, np.full((n, n), np.nan), False)
    P = solve_lyapunov(A, np.eye(n))
    hnorm = np.linalg.norm(expand_quadratic(model.F))
    if hnorm == 0:
        return StabilityReport(np.inf, P, True)
    return StabilityReport(1.0 / (2.0 * np.sqrt(np.linalg.norm(P)) * hnorm), P, True)


def reflect_eigenvalues(A, eps=1e-10):
    """Replace eigenvalues with nonnegative real part by ``-eps + i Im``.

    The matrix is returned unchanged (as a copy) when already Hurwitz.

    Raises
    ------
    DiagonalizabilityError
        If the eigenvector matrix has condition number above ``1e12``.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    w, Q = np.linalg.eig(A)
    unstable = w.real >= 0
    if not unstable.any():
        return A.copy()
    if np.linalg.cond(Q) > EIGVEC_COND_MAX:
        raise DiagonalizabilityError("matrix is numerically not diagonalizable")
    w = np.where(unstable, -eps + 1j * w.imag, w)
    Ar = Q @ np.diag(w) @ np.linalg.inv(Q)
    return Ar.real.copy()
