"""Relative state errors of reduced predictions against full-order trajectories.

A diverged prediction makes the whole sum equal to ``DIVERGED`` (``inf``),
which orders above every finite error.
"""

from dataclasses import dataclass

import numpy as np

DIVERGED = np.inf


def _states(t):
    return getattr(t, "states", t)


def _diverged(t):
    return bool(getattr(t, "diverged", False)) or not np.all(np.isfinite(_states(t)))


def relative_error(V, Xhat, X):
    """``||V Xhat - X||_F / ||X||_F``, or ``DIVERGED``."""
    if _diverged(Xhat):
        return DIVERGED
    X = _states(X)
    return float(np.linalg.norm(V @ _states(Xhat) - X) / np.linalg.norm(X))


def summed_error(V, predictions, truths):
    """Sum of relative errors over paired predictions and reference trajectories."""
    total = 0.0
    for Xhat, X in zip(predictions, truths, strict=True):
        e = relative_error(V, Xhat, X)
        if e == DIVERGED:
            return DIVERGED
        total += e
    return total


def train_error(V, predictions, truths):
    """Sum over the training trajectories of the relative state error."""
    return summed_error(V, predictions, truths)


def test_error(V, predictions, truths, variant="single"):
    """Test error with the summation structure selected by ``variant``.

    ``"single"``: one trajectory per test parameter; ``predictions`` and
    ``truths`` are flat lists. ``"double"``: several input trajectories per
    test parameter; both are lists (over parameters) of lists (over inputs).
    """
    if variant == "single":
        return summed_error(V, predictions, truths)
    if variant == "double":
        total = 0.0
        for preds, refs in zip(predictions, truths, strict=True):
            e = summed_error(V, preds, refs)
            if e == DIVERGED:
                return DIVERGED
            total += e
        return total
    raise ValueError(f"unknown test-error variant {variant!r}")


@dataclass
class ErrorRow:
    method: str
    n: int
    e_train: float
    e_test: float
    rho: float
    diverged: bool
    lam: float = np.nan

    def as_dict(self):
        return {"method": self.method, "n": self.n, "e_train": self.e_train,
                "e_test": self.e_test, "rho": self.rho, "diverged": self.diverged,
                "lambda": self.lam}


# not a pytest test despite the name
test_error.__test__ = False
