"""Parameterized full-order quadratic models and seeded random signals.

Three families are provided: the synthetic random model, viscous Burgers'
with a Dirichlet boundary input, and a 2-D reaction-diffusion problem with a
second-order polynomial reaction term.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .dynamics import QuadraticModel
from .quadform import num_quadratic

# reaction constants of the reaction-diffusion source term
RD_A, RD_B, RD_C = 0.1, 2.7, 1.8


@dataclass
class FomFamily:
    """Map from parameter ``mu`` to a full-order :class:`QuadraticModel`."""

    name: str
    N: int
    p: int
    domain: tuple
    build: Callable[[float], QuadraticModel]
    seed: int = None

    def __call__(self, mu):
        return self.build(float(mu))


@dataclass
class SignalSpec:
    """I.i.d. uniform entries in ``[lo, hi]``; one value per entry of ``shape``."""

    lo: float
    hi: float
    shape: tuple
    seed: object = 0

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty signal range [{self.lo}, {self.hi}]")


def sample_signal(spec):
    """Draw a piecewise-constant random signal (or initial condition)."""
    rng = np.random.default_rng(spec.seed)
    return rng.uniform(spec.lo, spec.hi, size=spec.shape)


def build_synthetic(N, seed=0, quad_scale=None):
    """Synthetic family ``A(mu) = -mu (A_s + A_s^T + 2N I)``.

    ``A_s``, ``B`` (N x 1) and the quadratic operator have i.i.d. uniform
    [0, 1] entries, drawn once per seed and shared by all parameters. The
    quadratic operator is multiplied by ``quad_scale``, default ``1/N``;
    unscaled, the model leaves every bounded region within a few steps from
    initial conditions in [0, 1]^N.
    """
    if N < 2:
        raise ValueError("synthetic model needs N >= 2")
    if quad_scale is None:
        quad_scale = 1.0 / N
    rng = np.random.default_rng(seed)
    As = rng.uniform(size=(N, N))
    B = rng.uniform(size=(N, 1))
    F = quad_scale * rng.uniform(size=(N, num_quadratic(N)))
    S = As + As.T + 2 * N * np.eye(N)

    def build(mu):
        return QuadraticModel(-mu * S, B, F)

    return FomFamily("synthetic", N, 1, (0.1, 1.0), build, seed)


def build_burgers(N, mu):
    """Burgers' ``x_t = (1/mu) x_ww - x x_w`` on ``N`` interior points of (0, 1).

    The diffusion coefficient is ``1/mu`` so that ``mu`` in [10, 100] acts as
    a Reynolds number. Boundary values are ``x(0) = u(t)`` and ``x(1) = 0``.
    Convection uses first-order upwinding of ``-(x^2/2)_w``; the boundary
    contribution ``u^2`` is not representable with linear input entry and is
    dropped, so the input enters through the diffusion stencil only.
    """
    if N < 3:
        raise ValueError("Burgers' model needs N >= 3")
    h = 1.0 / (N + 1)
    nu = 1.0 / mu
    A = (nu / h**2) * sp.diags([np.ones(N - 1), -2 * np.ones(N), np.ones(N - 1)],
                               [-1, 0, 1]).toarray()
    B = np.zeros((N, 1))
    B[0, 0] = nu / h**2
    # column of pair (i, i) is i(i+1)/2 + i
    diag_col = np.arange(N) * (np.arange(N) + 1) // 2 + np.arange(N)
    rows = np.concatenate([np.arange(N), np.arange(1, N)])
    cols = np.concatenate([diag_col, diag_col[:-1]])
    vals = np.concatenate([-np.ones(N), np.ones(N - 1)]) / (2 * h)
    F = sp.csr_matrix((vals, (rows, cols)), shape=(N, num_quadratic(N)))
    return QuadraticModel(A, B, F)


def burgers_family(N):
    return FomFamily("burgers", N, 1, (10.0, 100.0), lambda mu: build_burgers(N, mu))


def neumann_laplacian_2d(m, h):
    """Five-point Laplacian on an ``m x m`` cell-centred grid, mirrored ghost nodes."""
    T = sp.diags([np.ones(m - 1), -2 * np.ones(m), np.ones(m - 1)], [-1, 0, 1]).tolil()
    T[0, 0] = T[m - 1, m - 1] = -1.0
    T = T.tocsr() / h**2
    I = sp.identity(m, format="csr")
    return (sp.kron(I, T) + sp.kron(T, I)).toarray()


def reaction_source(x, mu, a=RD_A, b=RD_B, c=RD_C):
    """Second-order Taylor reaction term ``g(x)`` of the reaction-diffusion problem."""
    return -(a * np.sin(mu) + 2) * np.exp(-mu**2 * b) * (1 + mu * c * x + (mu * c) ** 2 / 2 * x**2)


def build_reaction_diffusion(mesh_h, mu):
    """Reaction-diffusion ``x_t = lap(x) + s u + g(x)`` on the unit square.

    The ``(1/h)^2`` unknowns sit at cell centres; ``g`` splits into the
    constant term ``c``, a diagonal shift of ``A`` and the diagonal pairs of
    ``F``.
    """
    m = int(round(1.0 / mesh_h))
    if abs(m * mesh_h - 1.0) > 1e-12:
        raise ValueError(f"1/mesh_h must be an integer, got {1.0 / mesh_h}")
    h = 1.0 / m
    N = m * m
    xi = (np.arange(m) + 0.5) * h
    # unknown index = j*m + i with xi_1 = xi[i], xi_2 = xi[j]
    X1, X2 = np.meshgrid(xi, xi)
    s = 0.1 * np.sin(2 * np.pi * X1.ravel()) * np.sin(2 * np.pi * X2.ravel())
    alpha = -(RD_A * np.sin(mu) + 2) * np.exp(-mu**2 * RD_B)
    A = neumann_laplacian_2d(m, h) + alpha * mu * RD_C * np.eye(N)
    idx = np.arange(N)
    F = sp.csr_matrix((np.full(N, alpha * (mu * RD_C) ** 2 / 2),
                       (idx, idx * (idx + 1) // 2 + idx)), shape=(N, num_quadratic(N)))
    return QuadraticModel(A, s[:, None], F, np.full(N, alpha))


def reaction_diffusion_family(mesh_h):
    N = int(round(1.0 / mesh_h)) ** 2
    return FomFamily("reaction_diffusion", N, 1, (1.0, 1.5),
                     lambda mu: build_reaction_diffusion(mesh_h, mu))
