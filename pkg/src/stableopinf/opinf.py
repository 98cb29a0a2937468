"""Operator inference: least-squares fits of reduced quadratic operators.

The stacked operator is ``O = [A | B | F | c]`` (n rows). Each sample row of
the data matrix is ``[x_{k-1}^T, u_k^T, (x_{k-1}^2)^T, 1]`` and the matching
target row is the forward difference ``(x_k - x_{k-1})^T / dt``, so data
generated with explicit Euler is fit exactly.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.linalg as la

from .dynamics import QuadraticModel
from .quadform import compress_square, num_quadratic

RCOND = 1e-12
METHODS = ("plain", "tikhonov", "pir", "spir")


@dataclass
class RegressionData:
    D: np.ndarray
    R: np.ndarray
    n: int
    p: int
    constant: bool = False

    @property
    def blocks(self):
        """Column slices of the A, B, F and c blocks in ``D``."""
        n, p, s = self.n, self.p, num_quadratic(self.n)
        return {"A": slice(0, n), "B": slice(n, n + p), "F": slice(n + p, n + p + s),
                "c": slice(n + p + s, n + p + s + int(self.constant))}

    @property
    def num_columns(self):
        return self.D.shape[1]

    @cached_property
    def compressed(self):
        """``(Rd, Q^T R)`` from a thin QR of ``D``; same minimizers, fewer rows."""
        if self.D.shape[0] <= self.D.shape[1]:
            return self.D, self.R
        Q, Rd = la.qr(self.D, mode="economic")
        return Rd, Q.T @ self.R


@dataclass
class FitReport:
    model: QuadraticModel
    residual: float
    objective: float
    iterations: int = 0
    converged: bool = True


def forward_diff(Xbar, dt):
    """First-order forward differences ``(x_k - x_{k-1}) / dt``, k = 1..K."""
    if dt <= 0:
        raise ValueError("time step must be positive")
    Xbar = np.asarray(Xbar, dtype=float)
    if Xbar.shape[1] < 2:
        raise ValueError("need at least two states to difference")
    return np.diff(Xbar, axis=1) / dt


def assemble(trajectories, inputs, dt, constant_enabled=False):
    """Stack regression data from reduced trajectories.

    Parameters
    ----------
    trajectories : list of (n, K+1) ndarray
        Reduced state trajectories.
    inputs : list of (p, K) ndarray
        Inputs ``u_1..u_K`` of each trajectory.
    dt : float
    constant_enabled : bool
        Append an all-ones column for a constant term.
    """
    if not trajectories:
        raise ValueError("no trajectories to assemble")
    Ds, Rs = [], []
    for X, U in zip(trajectories, inputs, strict=True):
        X = np.asarray(X, dtype=float)
        U = np.asarray(U, dtype=float).reshape(-1, X.shape[1] - 1)
        Xk = X[:, :-1]
        cols = [Xk, U, compress_square(Xk)]
        if constant_enabled:
            cols.append(np.ones((1, Xk.shape[1])))
        Ds.append(np.vstack(cols).T)
        Rs.append(forward_diff(X, dt).T)
    n = Rs[0].shape[1]
    p = Ds[0].shape[1] - n - num_quadratic(n) - int(constant_enabled)
    return RegressionData(np.vstack(Ds), np.vstack(Rs), n, p, constant_enabled)


def operators_to_model(O, data):
    b = data.blocks
    c = O[:, b["c"]].ravel() if data.constant else None
    return QuadraticModel(O[:, b["A"]], O[:, b["B"]], O[:, b["F"]], c)


def model_to_operators(model, data):
    parts = [model.A, model.B, model.F]
    if data.constant:
        parts.append(model.c[:, None])
    return np.hstack(parts)


def data_misfit(O, data):
    return float(np.sum((data.D @ O.T - data.R) ** 2))


def penalty_weights(data, lam, method):
    """Per-column ridge weights of ``method`` at regularization ``lam``."""
    w = np.zeros(data.num_columns)
    if method == "tikhonov":
        w[:] = lam
    elif method in ("pir", "spir"):
        w[data.blocks["F"]] = lam
    elif method != "plain":
        raise ValueError(f"unknown method {method!r}")
    return w


def objective(O, data, weights):
    return data_misfit(O, data) + float(np.sum(weights * O**2))


def _ridge(D, R, weights):
    """Minimum-norm solution of ``min ||D W - R||^2 + sum_j w_j ||W_j||^2``."""
    if np.any(weights < 0):
        raise ValueError("regularization must be nonnegative")
    if np.any(weights > 0):
        D = np.vstack([D, np.diag(np.sqrt(weights))])
        R = np.vstack([R, np.zeros((D.shape[1], R.shape[1]))])
    W, *_ = la.lstsq(D, R, cond=RCOND, lapack_driver="gelsy")
    return W


def _report(O, data, weights, **kw):
    return FitReport(operators_to_model(O, data), data_misfit(O, data),
                     objective(O, data, weights), **kw)


def fit_plain(data):
    """Unregularized least squares (minimum norm if rank deficient)."""
    w = np.zeros(data.num_columns)
    return _report(_ridge(*data.compressed, w).T, data, w)


def fit_tikhonov(data, lam):
    """Uniform ridge penalty ``lam ||O||_F^2`` on all operator blocks."""
    w = penalty_weights(data, lam, "tikhonov")
    return _report(_ridge(*data.compressed, w).T, data, w)


def fit_pir(data, lam):
    """Physics-informed regularization: penalty ``lam ||F||_F^2`` on the quadratic block only."""
    w = penalty_weights(data, lam, "pir")
    return _report(_ridge(*data.compressed, w).T, data, w)


def project_snd(A, eps):
    """Frobenius projection onto symmetric matrices with eigenvalues ``<= -eps``."""
    S = (A + A.T) / 2
    w, Q = np.linalg.eigh(S)
    if w[-1] <= -eps:
        return S
    return (Q * np.minimum(w, -eps)) @ Q.T


def _symmetric_lstsq(D, R):
    """Minimum-norm ``argmin ||D A - R||_F`` over symmetric ``A``."""
    n = D.shape[1]
    rows, cols = np.tril_indices(n)
    # duplication matrix: vec(A) (column-major) from the lower-triangle entries
    P = np.zeros((n * n, rows.size))
    P[rows + n * cols, np.arange(rows.size)] = 1.0
    P[cols + n * rows, np.arange(rows.size)] = 1.0
    K = np.kron(np.eye(n), D) @ P
    s, *_ = la.lstsq(K, R.ravel(order="F"), cond=RCOND, lapack_driver="gelsy")
    A = np.zeros((n, n))
    A[rows, cols] = s
    A[cols, rows] = s
    return A


def fit_spir(data, lam, eps=1e-10, tol=1e-10, max_iters=200_000):
    """PIR objective subject to ``A`` symmetric with all eigenvalues ``<= -eps``.

    B, F and c enter the objective quadratically and without constraints, so
    they are eliminated exactly; accelerated projected gradient (with
    adaptive restart and step ``1/L``) then runs on ``A`` alone. The
    remaining blocks are recovered by a ridge solve for the final ``A``.
    ``converged`` is False if the step norm never fell below
    ``tol * max(1, ||A||_F)`` within ``max_iters``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    n = data.n
    w = penalty_weights(data, lam, "spir")
    D, R = data.compressed
    a = np.arange(n)
    rest = np.arange(n, data.num_columns)
    Dr = np.vstack([D[:, rest], np.diag(np.sqrt(w[rest]))])
    Da = np.vstack([D[:, a], np.zeros((rest.size, n))])
    R_aug = np.vstack([R, np.zeros((rest.size, n))])

    # orthogonal complement of range(Dr) carries the A-dependent part of the objective
    U, s, _ = la.svd(Dr, full_matrices=False)
    U = U[:, s > RCOND * s[0]] if s.size and s[0] > 0 else U[:, :0]
    Da_t = Da - U @ (U.T @ Da)
    R_t = R_aug - U @ (U.T @ R_aug)
    S = Da_t.T @ Da_t
    T = Da_t.T @ R_t
    L = 2 * np.linalg.eigvalsh(S)[-1]

    # minimizer over symmetric A; if it already satisfies the eigenvalue
    # bound it is the constrained optimum, otherwise it is a warm start
    A0 = _symmetric_lstsq(Da_t, R_t)
    A = project_snd(A0, eps)
    iters, converged = 0, True
    if L > 0 and not np.array_equal(A, A0):
        converged = False
        reduced = lambda Wa: np.sum(Wa * (S @ Wa)) - 2 * np.sum(Wa * T)
        Y, t, f_prev = A.copy(), 1.0, reduced(A)
        for iters in range(1, max_iters + 1):
            # gradient wrt W_a = A^T; A symmetric on the feasible set
            A_new = project_snd(Y - (2 / L) * (S @ Y - T), eps)
            step = np.linalg.norm(A_new - A)
            f_new = reduced(A_new)
            if f_new > f_prev:
                Y, t = A.copy(), 1.0
                continue
            t_new = (1 + np.sqrt(1 + 4 * t * t)) / 2
            Y = A_new + ((t - 1) / t_new) * (A_new - A)
            A, t, f_prev = A_new, t_new, f_new
            if step < tol * max(1.0, np.linalg.norm(A)):
                converged = True
                break
    Wr = _ridge(D[:, rest], R - D[:, a] @ A, w[rest])
    O = np.hstack([A, Wr.T])
    return _report(O, data, w, iterations=iters, converged=converged)


def fit(data, method, lam=0.0, eps=1e-10, **kw):
    """Dispatch to the solver named ``method``."""
    if method == "plain":
        return fit_plain(data)
    if method == "tikhonov":
        return fit_tikhonov(data, lam)
    if method == "pir":
        return fit_pir(data, lam)
    if method == "spir":
        return fit_spir(data, lam, eps, **kw)
    raise ValueError(f"unknown method {method!r}")
