"""Operator inference for quadratic reduced models with a stability-promoting
regularizer on the quadratic operator and structure-preserving constraints."""

__version__ = "0.1.0"

from .dynamics import QuadraticModel, Trajectory, euler_step, simulate, simulate_many
from .interp import ModelFamily, interp_entrywise, interp_log_cholesky
from .opinf import (RegressionData, FitReport, assemble, fit, fit_pir, fit_plain, fit_spir,
                    fit_tikhonov, forward_diff)
from .pod import PodBasis, assemble_snapshots, galerkin_reduce, pod_basis, project_trajectory
from .quadform import compress_quadratic, compress_square, expand_quadratic, kron_square
from .select import LambdaGrid, TrainingSet, build_grid, select_lambda, validation_error
from .stability import is_hurwitz, reflect_eigenvalues, solve_lyapunov, stability_radius
