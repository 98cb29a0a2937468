"""Experiment orchestration: data generation, fitting, selection and evaluation."""

import logging
from pathlib import Path

import numpy as np

from . import io
from .config import ExperimentConfig
from .dynamics import simulate_many
from .fom import build_synthetic, burgers_family, reaction_diffusion_family
from .interp import ModelFamily
from .metrics import DIVERGED, ErrorRow
from .pod import assemble_snapshots, galerkin_reduce, pod_basis
from .select import LambdaGrid, TrainingSet, fit_family, select_lambda
from .stability import stability_radius

log = logging.getLogger(__name__)

STREAMS = {"basis_u": 0, "basis_x0": 1, "train_u": 2, "train_x0": 3, "test_u": 4, "test_x0": 5}
SUMMARY_COLUMNS = ["method", "n", "lambda", "e_train", "e_test", "rho", "diverged"]


def make_family(cfg):
    if cfg.problem == "synthetic":
        return build_synthetic(cfg.N, cfg.seed, cfg.quad_scale)
    if cfg.problem == "burgers":
        return burgers_family(cfg.N)
    return reaction_diffusion_family(cfg.mesh_h)


def _rng(cfg, stream, j):
    return np.random.default_rng([cfg.seed, STREAMS[stream], j])


def draw_inputs(cfg, p, stream, j, count, rng_range):
    """``(count, p, K)`` i.i.d. uniform inputs for parameter index ``j``."""
    return _rng(cfg, stream, j).uniform(*rng_range, size=(count, p, cfg.K))


def draw_initial(cfg, mode, stream, j, count, N, V=None):
    """``(N, count)`` initial conditions; row ``i`` of the draw is reproducible
    for every ``count > i``."""
    if mode == "zero":
        return np.zeros((N, count))
    rng = _rng(cfg, stream, j)
    if mode == "uniform":
        return rng.uniform(*cfg.ic_range, size=(count, N)).T
    if mode == "basis":
        if V is None:
            raise ValueError("basis initial conditions need a basis")
        return V @ rng.uniform(0.0, 1.0, size=(count, V.shape[1])).T
    raise ValueError(f"initial-condition mode {mode!r} not valid here")


def basis_trajectories(cfg, fam):
    out = []
    for j, mu in enumerate(cfg.train_params):
        U = draw_inputs(cfg, fam.p, "basis_u", j, cfg.M_b, cfg.basis_input)
        X0 = draw_initial(cfg, cfg.basis_ic, "basis_x0", j, cfg.M_b, fam.N)
        out.extend(simulate_many(fam(mu), X0, U, cfg.dt))
    return out


def compute_basis(cfg, fam, nmax=None):
    trajs = basis_trajectories(cfg, fam)
    if any(t.diverged for t in trajs):
        raise FloatingPointError("full-order basis trajectory diverged")
    return pod_basis(assemble_snapshots(trajs), nmax or max(cfg.dims))


def training_trajectories(cfg, fam, V=None):
    """Training trajectories, one list per training parameter."""
    out = []
    for j, mu in enumerate(cfg.train_params):
        U = draw_inputs(cfg, fam.p, "train_u", j, cfg.M_t, cfg.train_input)
        X0 = draw_initial(cfg, cfg.train_ic, "train_x0", j, cfg.M_t, fam.N, V)
        out.append(simulate_many(fam(mu), X0, U, cfg.dt))
    return out


def test_trajectories(cfg, fam, V=None):
    """Test trajectories, one list per test parameter."""
    out = []
    train = np.asarray(cfg.train_params)
    for j, mu in enumerate(cfg.test_params):
        U = draw_inputs(cfg, fam.p, "test_u", j, cfg.M_test_inputs, cfg.test_input)
        if cfg.test_ic == "train":
            near = int(np.argmin(np.abs(train - mu)))
            X0 = draw_initial(cfg, cfg.train_ic, "train_x0", near, cfg.M_test_inputs, fam.N, V)
        else:
            X0 = draw_initial(cfg, cfg.test_ic, "test_x0", j, cfg.M_test_inputs, fam.N, V)
        out.append(simulate_many(fam(mu), X0, U, cfg.dt))
    return out


# not a pytest test despite the name
test_trajectories.__test__ = False


def _depends_on_basis(cfg, which):
    mode = cfg.train_ic if which == "train" else cfg.test_ic
    return mode == "basis" or (mode == "train" and cfg.train_ic == "basis")


def reference_sets(mus, trajs, V):
    for mu, ts in zip(mus, trajs):
        if any(t.diverged for t in ts):
            raise FloatingPointError(f"full-order trajectory diverged at mu={mu}")
    return [TrainingSet.from_trajectories(mu, ts, V) for mu, ts in zip(mus, trajs)]


def _mean_score(models, sets):
    scores = [s.score(s.simulate(m)) for m, s in zip(models, sets)]
    return DIVERGED if np.any(np.isinf(scores)) else float(np.mean(scores))


def _min_radius(models):
    rhos = [stability_radius(m).rho for m in models]
    return float(np.nan if np.any(np.isnan(rhos)) else np.min(rhos))


def learn_family(cfg, bundle, method, lam):
    return fit_family(bundle, method, lam, cfg.eps, cfg.constant)


def evaluate_models(train_models, test_models, train_sets, test_sets):
    """Errors and radius of explicit per-parameter model lists."""
    e_train = _mean_score(train_models, train_sets)
    e_test = float(np.sum([s.score(s.simulate(m)) for m, s in zip(test_models, test_sets)]))
    return e_train, e_test, _min_radius(test_models)


def evaluate_family(family, train_sets, test_sets):
    train_models = [family.interpolate(s.mu) for s in train_sets]
    test_models = [family.interpolate(s.mu) for s in test_sets]
    return evaluate_models(train_models, test_models, train_sets, test_sets)


def evaluate_intrusive(fam, V, train_sets, test_sets):
    train_models = [galerkin_reduce(fam(s.mu), V) for s in train_sets]
    test_models = [galerkin_reduce(fam(s.mu), V) for s in test_sets]
    return evaluate_models(train_models, test_models, train_sets, test_sets)


def run_method(cfg, method, n, fam, V, train_sets, test_sets, out=None):
    """One (method, n) cell of the experiment; failures become diverged rows."""
    lam = np.nan
    try:
        if method == "intrusive":
            e_train, e_test, rho = evaluate_intrusive(fam, V, train_sets, test_sets)
        else:
            if method == "plain":
                lam = 0.0
                family = learn_family(cfg, train_sets, method, 0.0)
            else:
                lo, hi, m = cfg.lambda_grid
                sel = select_lambda(train_sets, LambdaGrid(lo, hi, int(m)), method, cfg.eps,
                                    cfg.constant)
                lam, family = sel.lam, sel.family
                if out is not None:
                    io.write_validation_table(Path(out) / f"validation_{method}_n{n}.csv", sel)
            if out is not None:
                io.write_family(Path(out) / "models" / f"{method}_n{n}", family,
                                {"method": method, "lambda": float(lam)})
            e_train, e_test, rho = evaluate_family(family, train_sets, test_sets)
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        log.warning("%s n=%d failed: %s", method, n, exc)
        return ErrorRow(method, n, DIVERGED, DIVERGED, np.nan, True, lam)
    return ErrorRow(method, n, e_train, e_test, rho, bool(np.isinf(e_test)), lam)


def run_experiment(cfg, out=None):
    """Run every (n, method) cell of ``cfg``; write CSVs under ``out`` if given.

    Returns the list of :class:`~stableopinf.metrics.ErrorRow`.
    """
    fam = make_family(cfg)
    basis = compute_basis(cfg, fam)
    if out is not None:
        out = Path(out)
        io.write_matrix(out / "basis.csv", basis.V)
        io.write_matrix(out / "singular_values.csv", basis.singular_values[:, None])
        io.write_json(out / "manifest.json", io.run_manifest(cfg.to_dict()))
    train_full = None if _depends_on_basis(cfg, "train") else training_trajectories(cfg, fam)
    test_full = None if _depends_on_basis(cfg, "test") else test_trajectories(cfg, fam)
    rows = []
    for n in cfg.dims:
        V = basis.V[:, :n]
        tr = train_full or training_trajectories(cfg, fam, V)
        te = test_full or test_trajectories(cfg, fam, V)
        train_sets = reference_sets(cfg.train_params, tr, V)
        test_sets = reference_sets(cfg.test_params, te, V)
        for method in cfg.methods:
            row = run_method(cfg, method, n, fam, V, train_sets, test_sets, out)
            log.info("%s n=%d lambda=%g e_train=%.3e e_test=%.3e rho=%.3e", row.method, n,
                     row.lam, row.e_train, row.e_test, row.rho)
            rows.append(row)
    if out is not None:
        io.write_rows(out / "summary.csv", [r.as_dict() for r in rows], SUMMARY_COLUMNS)
    return rows
