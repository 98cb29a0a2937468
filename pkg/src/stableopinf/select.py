"""Regularization selection by leave-one-out interpolation validation.

For every ``lambda`` on a log-uniform grid, a model is fitted at each training
parameter. Each interior parameter is then left out, the remaining models are
interpolated at it, and the interpolant is simulated with that parameter's
training inputs. ``lambda*`` minimizes the mean validation error over the
interior parameters.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import simulate_many
from .interp import PLAIN, SND_LINEAR, ModelFamily
from .metrics import DIVERGED
from .opinf import assemble, fit

log = logging.getLogger(__name__)


class SelectionError(RuntimeError):
    """Every grid point diverged at every validation parameter."""


@dataclass
class LambdaGrid:
    lo: float
    hi: float
    m: int

    def __post_init__(self):
        if not 0 < self.lo <= self.hi or self.m < 2:
            raise ValueError(f"invalid grid lo={self.lo} hi={self.hi} m={self.m}")

    @property
    def values(self):
        k = np.arange(self.m) / (self.m - 1)
        vals = self.lo * (self.hi / self.lo) ** k
        vals[0], vals[-1] = self.lo, self.hi
        return vals


def build_grid(lo, hi, m):
    """``m`` log-uniformly spaced values from ``lo`` to ``hi`` inclusive."""
    return LambdaGrid(lo, hi, m)


@dataclass
class TrainingSet:
    """Reduced training data at one parameter plus what is needed to score it.

    ``ref_sq`` and ``perp_sq`` are ``||X||_F^2`` and ``||X - V V^T X||_F^2``
    of each full-order trajectory, so that
    ``||V Xhat - X||_F^2 = ||Xhat - V^T X||_F^2 + perp_sq`` can be evaluated
    without the full states.
    """

    mu: float
    reduced: list
    inputs: list
    dt: float
    ref_sq: np.ndarray
    perp_sq: np.ndarray

    @classmethod
    def from_trajectories(cls, mu, trajectories, V):
        reduced, ref_sq, perp_sq = [], [], []
        for t in trajectories:
            Xbar = V.T @ t.states
            reduced.append(Xbar)
            ref_sq.append(np.sum(t.states**2))
            perp_sq.append(np.sum((t.states - V @ Xbar) ** 2))
        return cls(float(mu), reduced, [t.inputs for t in trajectories], trajectories[0].dt,
                   np.array(ref_sq), np.array(perp_sq))

    def regression_data(self, constant=False):
        return assemble(self.reduced, self.inputs, self.dt, constant)

    def score(self, predictions):
        """Summed relative error of reduced predictions, or ``DIVERGED``."""
        total = 0.0
        for t, Xbar, ref, perp in zip(predictions, self.reduced, self.ref_sq, self.perp_sq):
            if t.diverged:
                return DIVERGED
            err2 = np.sum((t.states - Xbar) ** 2) + perp
            total += np.sqrt(err2 / ref)
        return float(total)

    def simulate(self, model):
        x0 = np.column_stack([X[:, 0] for X in self.reduced])
        return simulate_many(model, x0, np.stack(self.inputs), self.dt)


def validation_error(model, held_out):
    """Simulate ``model`` with the held-out inputs and score it."""
    return held_out.score(held_out.simulate(model))


@dataclass
class Selection:
    lam: float
    index: int
    grid: np.ndarray
    table: np.ndarray  # (m, M-2) validation errors
    means: np.ndarray
    family: ModelFamily
    params: np.ndarray


def structure_for(method):
    return SND_LINEAR if method == "spir" else PLAIN


def fit_family(bundle, method, lam, eps=1e-10, constant=False, datas=None):
    """Fit one model per training parameter with a common ``lam``."""
    datas = datas or [ts.regression_data(constant) for ts in bundle]
    models = [fit(d, method, lam, eps).model for d in datas]
    return ModelFamily([ts.mu for ts in bundle], models, structure_for(method), eps)


def leave_one_out_error(family, bundle, j):
    """Validation error at interior parameter ``j`` using all other models."""
    try:
        model = family.without(j).interpolate(bundle[j].mu)
    except (np.linalg.LinAlgError, ValueError) as exc:
        log.debug("interpolation failed at mu=%s: %s", bundle[j].mu, exc)
        return DIVERGED
    return validation_error(model, bundle[j])


def _pool_size():
    try:
        return max(1, int(os.environ.get("OPINF_THREADS", "1")))
    except ValueError:
        return 1


def select_lambda(bundle, grid, method, eps=1e-10, constant=False):
    """Pick the regularization parameter by leave-one-out interpolation validation.

    Ties in the mean validation error go to the larger ``lambda``.

    Returns
    -------
    Selection
    """
    M = len(bundle)
    if M < 3:
        raise ValueError("selection needs at least three training parameters")
    lams = grid.values if isinstance(grid, LambdaGrid) else np.asarray(grid, dtype=float)
    datas = [ts.regression_data(constant) for ts in bundle]

    def row(lam):
        fam = fit_family(bundle, method, lam, eps, constant, datas)
        return fam, [leave_one_out_error(fam, bundle, j) for j in range(1, M - 1)]

    workers = _pool_size()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(row, lams))
    else:
        rows = [row(lam) for lam in lams]
    table = np.array([r[1] for r in rows], dtype=float)
    means = np.where(np.isinf(table).any(axis=1), DIVERGED, table.mean(axis=1))
    if np.all(np.isinf(means)):
        raise SelectionError(f"{method}: every regularization parameter diverged")
    best = np.flatnonzero(means == means.min())[-1]
    return Selection(float(lams[best]), int(best), lams, table, means, rows[best][0],
                     np.array([ts.mu for ts in bundle]))
