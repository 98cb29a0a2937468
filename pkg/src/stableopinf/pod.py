"""Snapshot assembly, POD bases and intrusive Galerkin reduction."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dynamics import QuadraticModel
from .quadform import compress_quadratic, square_indices

RANK_TOL = 1e-13


class RankError(ValueError):
    """Requested basis dimension exceeds the numerical rank of the snapshots."""


@dataclass
class PodBasis:
    V: np.ndarray
    singular_values: np.ndarray

    @property
    def dim(self):
        return self.V.shape[1]

    def truncate(self, n):
        if n > self.dim:
            raise RankError(f"basis has {self.dim} vectors, asked for {n}")
        return PodBasis(self.V[:, :n], self.singular_values)


def assemble_snapshots(trajectories):
    """Concatenate trajectory state matrices column-wise, in the given order.

    Accepts :class:`~stableopinf.dynamics.Trajectory` objects or plain arrays.
    """
    mats = [getattr(t, "states", t) for t in trajectories]
    if not mats:
        raise ValueError("no trajectories to assemble")
    N = mats[0].shape[0]
    if any(m.shape[0] != N for m in mats):
        raise ValueError("trajectories have different state dimensions")
    return np.hstack(mats)


def pod_basis(snapshots, n):
    """First ``n`` left singular vectors of the snapshot matrix.

    Each column is signed so that its largest-magnitude entry is positive.
    """
    X = np.asarray(snapshots, dtype=float)
    U, s, _ = np.linalg.svd(X, full_matrices=False)
    if n < 1 or n > s.size or s[0] == 0 or s[n - 1] / s[0] < RANK_TOL:
        raise RankError(f"snapshot matrix has numerical rank below {n}")
    V = U[:, :n]
    signs = np.sign(V[np.abs(V).argmax(axis=0), np.arange(n)])
    return PodBasis(V * signs, s)


def project_trajectory(X, V):
    X = np.asarray(X, dtype=float)
    if X.shape[0] != V.shape[0]:
        raise ValueError(f"state dimension {X.shape[0]} does not match basis {V.shape[0]}")
    return V.T @ X


def reduce_quadratic(F, V):
    """Compressed reduced quadratic operator ``F_hat`` with
    ``F_hat x^2 = V^T H (V x kron V x)`` for the zero-filled expansion ``H`` of ``F``.

    Works column by column on ``F`` so that sparse full-order operators are never
    expanded to ``N x N^2``.
    """
    N, n = V.shape
    rows, cols = square_indices(N)
    Fc = sp.csc_matrix(F) if sp.issparse(F) else None
    VtF = V.T @ F if Fc is None else (Fc.T @ V).T
    # H[:, i*N + j] = F[:, pair(i, j)] for i >= j; contract against V_i (x) V_j
    # to get the n x n^2 reduced Kronecker operator.
    Hhat = np.einsum("ak,kb,kc->abc", VtF, V[rows], V[cols],
                     optimize=True).reshape(n, n * n)
    return compress_quadratic(Hhat)


def galerkin_reduce(model, V):
    """Intrusive reduced model ``(V^T A V, V^T B, reduced F, V^T c)``."""
    V = np.asarray(V, dtype=float)
    return QuadraticModel(V.T @ (model.A @ V), V.T @ model.B, reduce_quadratic(model.F, V),
                          V.T @ model.c)
