"""Interpolating learned model families at new parameters."""

from dataclasses import dataclass, field

import numpy as np

from .dynamics import QuadraticModel
from .stability import reflect_eigenvalues

PLAIN = "plain"
SND_LINEAR = "snd-linear"


class ExtrapolationError(ValueError):
    pass


class StructureError(ValueError):
    """A linear operator of an ``snd-linear`` family is not negative definite."""


@dataclass
class ModelFamily:
    """Models at strictly increasing training parameters."""

    params: np.ndarray
    models: list
    structure: str = PLAIN
    eps: float = 1e-10

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=float)
        if len(self.models) != self.params.size:
            raise ValueError("one model per parameter required")
        if self.params.size and np.any(np.diff(self.params) <= 0):
            raise ValueError("parameters must be strictly increasing")
        if self.structure not in (PLAIN, SND_LINEAR):
            raise ValueError(f"unknown structure tag {self.structure!r}")

    def __len__(self):
        return len(self.models)

    def without(self, j):
        """Family with the ``j``-th parameter left out."""
        keep = [i for i in range(len(self)) if i != j]
        return ModelFamily(self.params[keep], [self.models[i] for i in keep],
                           self.structure, self.eps)

    def interpolate(self, mu):
        """Interpolate with the path matching the structure tag."""
        if self.structure == SND_LINEAR:
            return interp_log_cholesky(self, mu)
        return interp_entrywise(self, mu)


def _bracket(params, mu):
    """Index ``i`` and weight ``t`` with ``mu = (1 - t) params[i] + t params[i+1]``."""
    if not params[0] <= mu <= params[-1]:
        raise ExtrapolationError(f"mu={mu} outside [{params[0]}, {params[-1]}]")
    if params.size == 1:
        return 0, 0.0
    i = min(int(np.searchsorted(params, mu, side="right")) - 1, params.size - 2)
    t = (mu - params[i]) / (params[i + 1] - params[i])
    return i, t


def _lerp(a, b, t):
    if t == 0.0:
        return a.copy()
    if t == 1.0:
        return b.copy()
    return (1 - t) * a + t * b


def _lerp_models(m0, m1, t, A):
    return QuadraticModel(A, _lerp(m0.B, m1.B, t), _lerp(m0.F, m1.F, t), _lerp(m0.c, m1.c, t))


def interp_entrywise(family, mu):
    """Piecewise-linear entrywise interpolation followed by eigenvalue reflection of ``A``."""
    i, t = _bracket(family.params, mu)
    m0 = family.models[i]
    m1 = family.models[min(i + 1, len(family) - 1)]
    A = reflect_eigenvalues(_lerp(m0.A, m1.A, t), family.eps)
    return _lerp_models(m0, m1, t, A)


def neg_cholesky(A):
    """Lower factor ``L`` with ``A = -L L^T``."""
    try:
        return np.linalg.cholesky(-np.asarray(A, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise StructureError("linear operator is not symmetric negative definite") from exc


def interp_log_cholesky(family, mu):
    """Log-Cholesky interpolation of ``A``; B, F and c are interpolated entrywise.

    Strictly lower parts of the factors are interpolated linearly and the
    diagonals linearly in log space, so the result is ``-L L^T`` with ``L``
    having a positive diagonal.
    """
    if family.structure != SND_LINEAR:
        raise StructureError("Log-Cholesky interpolation needs an snd-linear family")
    i, t = _bracket(family.params, mu)
    m0 = family.models[i]
    m1 = family.models[min(i + 1, len(family) - 1)]
    L0, L1 = neg_cholesky(m0.A), neg_cholesky(m1.A)
    if t == 0.0:
        return _lerp_models(m0, m1, t, m0.A.copy())
    if t == 1.0:
        return _lerp_models(m0, m1, t, m1.A.copy())
    L = _lerp(np.tril(L0, -1), np.tril(L1, -1), t)
    L += np.diag(np.exp(_lerp(np.log(np.diag(L0)), np.log(np.diag(L1)), t)))
    return _lerp_models(m0, m1, t, -L @ L.T)
