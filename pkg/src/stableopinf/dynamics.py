"""Quadratic models ``dx/dt = A x + B u + F x^2 + c`` and explicit Euler integration."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .quadform import compress_square, num_quadratic, square_indices

BLOWUP = 1e8


@dataclass
class QuadraticModel:
    """Operators of one quadratic model at one parameter.

    ``F`` may be a dense array or a scipy sparse matrix (full-order models).
    ``c`` defaults to zero.
    """

    A: np.ndarray
    B: np.ndarray
    F: object
    c: np.ndarray = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        n = self.A.shape[0]
        B = np.asarray(self.B, dtype=float)
        self.B = B.reshape(n, -1) if B.size else np.zeros((n, 0))
        if not sp.issparse(self.F):
            self.F = np.asarray(self.F, dtype=float).reshape(n, num_quadratic(n))
        self.c = np.zeros(n) if self.c is None else np.asarray(self.c, dtype=float).reshape(n)
        if self.A.shape != (n, n):
            raise ValueError(f"A must be square, got {self.A.shape}")
        if self.F.shape != (n, num_quadratic(n)):
            raise ValueError(f"F must be {n}x{num_quadratic(n)}, got {self.F.shape}")

    @property
    def dim(self):
        return self.A.shape[0]

    @property
    def input_dim(self):
        return self.B.shape[1]

    def rhs(self, x, u=None):
        """Right-hand side at state(s) ``x`` and input(s) ``u``."""
        out = self.A @ x + self.F @ compress_square(x)
        out = out + (self.c if np.ndim(x) == 1 else self.c[:, None])
        if u is not None and self.input_dim:
            out = out + self.B @ np.asarray(u, dtype=float).reshape(self.input_dim, *np.shape(x)[1:])
        return out

    def copy(self):
        F = self.F.copy()
        return QuadraticModel(self.A.copy(), self.B.copy(), F, self.c.copy())


@dataclass
class Trajectory:
    """States ``x_0..x_K`` as columns and inputs ``u_1..u_K`` as columns."""

    states: np.ndarray
    inputs: np.ndarray
    dt: float
    diverged: bool = False

    @property
    def num_steps(self):
        return self.states.shape[1] - 1

    @property
    def times(self):
        return self.dt * np.arange(self.states.shape[1])


def euler_step(model, x, u, dt):
    """One explicit Euler step; the input ``u`` is the one applied over the step."""
    return x + dt * model.rhs(x, u)


def _as_inputs(inputs, p, K):
    U = np.asarray(inputs, dtype=float)
    if U.size == 0 and p == 0:
        return np.zeros((0, K))
    U = U.reshape(p, -1) if U.ndim == 1 else U
    if U.shape != (p, K):
        raise ValueError(f"inputs must be {p}x{K}, got {U.shape}")
    return U


def simulate(model, x0, inputs, dt, K=None):
    """Integrate ``model`` from ``x0`` with explicit Euler.

    ``inputs`` holds ``u_1..u_K`` as columns; step ``k`` maps ``x_{k-1}`` to
    ``x_k`` using ``u_k``. On the first non-finite state or entry above
    ``BLOWUP`` in magnitude, the remaining columns are NaN and the trajectory
    is flagged as diverged.
    """
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape[0] != model.dim:
        raise ValueError(f"x0 has length {x0.shape[0]}, model dimension is {model.dim}")
    U = np.asarray(inputs, dtype=float)
    if K is None:
        K = U.shape[-1] if U.size else 0
    U = _as_inputs(U, model.input_dim, K)
    return simulate_many(model, x0[:, None], U[None], dt)[0]


def simulate_many(model, x0s, inputs, dt):
    """Integrate several initial conditions / input sequences in one sweep.

    Parameters
    ----------
    model : QuadraticModel
    x0s : (n, b) ndarray
        Initial conditions as columns.
    inputs : (b, p, K) ndarray
        Input sequence of each run.
    dt : float

    Returns
    -------
    list of Trajectory
    """
    x0s = np.asarray(x0s, dtype=float)
    n, b = x0s.shape
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 3 or inputs.shape[0] != b or inputs.shape[1] != model.input_dim:
        raise ValueError(
            f"inputs must have shape ({b}, {model.input_dim}, K), got {inputs.shape}")
    if n != model.dim:
        raise ValueError(f"x0 has length {n}, model dimension is {model.dim}")
    K = inputs.shape[2]
    # forcing[k] = B u_{k+1} + c for all runs, precomputed once
    forcing = np.einsum("ip,bpk->kib", model.B, inputs) + model.c[None, :, None]
    states = np.full((K + 1, n, b), np.nan)
    states[0] = x0s
    death = np.full(b, K + 1)
    step = _sparse_rhs(model) if sp.issparse(model.F) else _dense_rhs(model, b)
    x = x0s.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(K):
            dx = step(x)
            dx += forcing[k]
            dx *= dt
            x += dx
            if not np.abs(x).max() <= BLOWUP:
                bad = ~(np.abs(x).max(axis=0) <= BLOWUP) & (death > K)
                death[bad] = k + 1
                if np.all(death <= K):
                    break
                x[:, death <= K] = 0.0
            states[k + 1] = x
    for i in np.flatnonzero(death <= K):
        states[death[i]:, :, i] = np.nan
    return [Trajectory(states[:, :, i].T.copy(), inputs[i].copy(), dt, bool(death[i] <= K))
            for i in range(b)]


def _dense_rhs(model, b):
    n = model.dim
    rows, cols = square_indices(n)
    AF = np.hstack([model.A, model.F])
    z = np.empty((AF.shape[1], b))
    xr, xc = np.empty((rows.size, b)), np.empty((rows.size, b))
    out = np.empty((n, b))

    def rhs(x):
        z[:n] = x
        np.take(x, rows, axis=0, out=xr)
        np.take(x, cols, axis=0, out=xc)
        np.multiply(xr, xc, out=z[n:])
        return np.matmul(AF, z, out=out)

    return rhs


def _sparse_rhs(model):
    # only the monomials with a nonzero column in F are formed
    F = sp.csc_matrix(model.F)
    used = np.flatnonzero(np.diff(F.indptr))
    rows, cols = square_indices(model.dim)
    rows, cols, Fu = rows[used], cols[used], F[:, used].tocsr()
    A = sp.csr_matrix(model.A) if np.count_nonzero(model.A) < model.A.size / 4 else model.A
    return lambda x: A @ x + Fu @ (x[rows] * x[cols])
