"""Compressed quadratic state products and the compressed/Kronecker operator maps.

The compressed square of ``x`` (length n) is the concatenation of the blocks
``x[i] * x[:i+1]`` for ``i = 0, ..., n-1``, i.e. every product ``x_i x_j`` with
``j <= i`` exactly once. Block ``i`` starts at offset ``i(i+1)/2``.

The full quadratic operator ``H`` acts on ``kron(x, x)`` whose entry
``i*n + j`` is ``x_i x_j``.
"""

from functools import lru_cache

import numpy as np


def num_quadratic(n):
    """Number of distinct quadratic monomials of an ``n``-dimensional state."""
    return n * (n + 1) // 2


@lru_cache(maxsize=64)
def square_indices(n):
    """Row/column index pairs ``(i, j)``, ``j <= i``, in compressed order."""
    rows, cols = np.tril_indices(n)
    rows.flags.writeable = False
    cols.flags.writeable = False
    return rows, cols


def compress_square(x):
    """Return the compressed square of a state vector or of state columns.

    Parameters
    ----------
    x : (n,) or (n, k) ndarray
        State vector, or k states stored as columns.

    Returns
    -------
    (n(n+1)/2,) or (n(n+1)/2, k) ndarray
    """
    x = np.asarray(x, dtype=float)
    rows, cols = square_indices(x.shape[0])
    return x[rows] * x[cols]


def kron_square(x):
    """Return ``kron(x, x)``; entry ``i*n + j`` is ``x_i x_j``."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return np.kron(x, x)
    n, k = x.shape
    return (x[:, None, :] * x[None, :, :]).reshape(n * n, k)


def _dim_from_compressed(ncols):
    n = int((np.sqrt(8 * ncols + 1) - 1) // 2)
    if num_quadratic(n) != ncols:
        raise ValueError(f"{ncols} columns is not n(n+1)/2 for any integer n")
    return n


def expand_quadratic(F):
    """Zero-filled Kronecker form ``H`` of a compressed quadratic operator.

    Each coefficient of the pair ``(i, j)``, ``i >= j``, is copied to column
    ``i*n + j`` of ``H``; the mirrored column stays zero, so ``||H||_F``
    equals ``||F||_F``.
    """
    F = np.asarray(F, dtype=float)
    n = _dim_from_compressed(F.shape[1])
    rows, cols = square_indices(n)
    H = np.zeros((F.shape[0], n * n))
    H[:, rows * n + cols] = F
    return H


def compress_quadratic(H):
    """Compressed operator ``F`` with ``F @ compress_square(x) == H @ kron_square(x)``.

    Off-diagonal pairs receive the sum of the two mirrored Kronecker columns.
    """
    H = np.asarray(H, dtype=float)
    n = int(round(np.sqrt(H.shape[1])))
    if n * n != H.shape[1]:
        raise ValueError(f"H must have n^2 columns, got {H.shape[1]}")
    rows, cols = square_indices(n)
    F = H[:, rows * n + cols].copy()
    off = rows != cols
    F[:, off] += H[:, cols[off] * n + rows[off]]
    return F
