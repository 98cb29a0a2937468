"""Command-line entry point: ``stableopinf <subcommand> [flags]``.

Subcommands share one output directory so that each step can run on the
artifacts persisted by the previous one::

    stableopinf basis    --config synthetic --out run
    stableopinf select   --config synthetic --method pir --dim 4 --out run
    stableopinf evaluate --config synthetic --method pir --dim 4 --out run
    stableopinf reproduce synthetic --seed 7 --out run

``--config`` takes a JSON file or the name of a built-in experiment.
"""

import argparse
import logging
import sys
import traceback
from pathlib import Path

import numpy as np

from . import harness, io
from .config import PRESETS, ConfigError, ExperimentConfig
from .metrics import ErrorRow
from .opinf import METHODS
from .select import LambdaGrid, select_lambda

log = logging.getLogger("stableopinf")


class UsageError(Exception):
    """Bad command-line input; reported with exit status 2."""


def load_config(spec, seed=None):
    if spec is None:
        raise UsageError("--config is required")
    if spec in PRESETS:
        cfg = PRESETS[spec]()
    else:
        path = Path(spec)
        if not path.is_file():
            raise UsageError(f"no such config file or experiment: {spec}")
        cfg = ExperimentConfig.load(path)
    if seed is not None:
        cfg = cfg.replace(seed=seed)
    return cfg


def _out(args):
    if args.out is None:
        raise UsageError("--out is required")
    return Path(args.out)


def _dim(args, cfg):
    n = args.dim if args.dim is not None else max(cfg.dims)
    if n < 1:
        raise UsageError("--dim must be positive")
    return n


def _basis(cfg, fam, out, n):
    """Basis from ``out/basis.csv`` if present, else computed and stored."""
    path = out / "basis.csv"
    if path.is_file():
        V = io.read_matrix(path)
        if V.shape != (fam.N, V.shape[1]) or V.shape[1] < n:
            raise UsageError(f"{path} does not hold an N={fam.N} basis with {n} columns")
        return V[:, :n]
    basis = harness.compute_basis(cfg, fam)
    io.write_matrix(path, basis.V)
    io.write_matrix(out / "singular_values.csv", basis.singular_values[:, None])
    return basis.V[:, :n]


def _sets(cfg, fam, V, test=False):
    train = harness.training_trajectories(cfg, fam, V)
    train_sets = harness.reference_sets(cfg.train_params, train, V)
    if not test:
        return train_sets, None
    tests = harness.test_trajectories(cfg, fam, V)
    return train_sets, harness.reference_sets(cfg.test_params, tests, V)


def cmd_simulate(args):
    cfg = load_config(args.config, args.seed)
    out = _out(args)
    fam = harness.make_family(cfg)
    if cfg.train_ic == "basis" or cfg.train_ic == "train":
        raise UsageError("simulate needs initial conditions that do not depend on a basis")
    for j, trajs in enumerate(harness.training_trajectories(cfg, fam)):
        for i, t in enumerate(trajs):
            io.write_trajectory(out / "trajectories" / f"mu{j}_traj{i}.csv", t)
    io.write_json(out / "manifest.json", io.run_manifest(cfg.to_dict()))
    return 0


def cmd_basis(args):
    cfg = load_config(args.config, args.seed)
    out = _out(args)
    fam = harness.make_family(cfg)
    basis = harness.compute_basis(cfg, fam, args.dim)
    io.write_matrix(out / "basis.csv", basis.V)
    io.write_matrix(out / "singular_values.csv", basis.singular_values[:, None])
    return 0


def _method(args, allowed):
    if args.method not in allowed:
        raise UsageError(f"--method must be one of {', '.join(allowed)}")
    return args.method


def cmd_learn(args):
    cfg = load_config(args.config, args.seed)
    method = _method(args, METHODS)
    lam = 0.0 if args.lam is None else args.lam
    if lam < 0:
        raise UsageError("--lambda must be nonnegative")
    out = _out(args)
    fam = harness.make_family(cfg)
    n = _dim(args, cfg)
    V = _basis(cfg, fam, out, n)
    train_sets, _ = _sets(cfg, fam, V)
    family = harness.learn_family(cfg, train_sets, method, lam)
    io.write_family(out / "models" / f"{method}_n{n}", family,
                    {"method": method, "lambda": float(lam)})
    return 0


def cmd_select(args):
    cfg = load_config(args.config, args.seed)
    method = _method(args, METHODS)
    out = _out(args)
    fam = harness.make_family(cfg)
    n = _dim(args, cfg)
    V = _basis(cfg, fam, out, n)
    train_sets, _ = _sets(cfg, fam, V)
    lo, hi, m = cfg.lambda_grid
    sel = select_lambda(train_sets, LambdaGrid(lo, hi, int(m)), method, cfg.eps, cfg.constant)
    io.write_validation_table(out / f"validation_{method}_n{n}.csv", sel)
    io.write_family(out / "models" / f"{method}_n{n}", sel.family,
                    {"method": method, "lambda": float(sel.lam)})
    print(f"{method} n={n} lambda*={sel.lam:.6g}")
    return 0


def cmd_evaluate(args):
    cfg = load_config(args.config, args.seed)
    method = _method(args, ("intrusive",) + METHODS)
    out = _out(args)
    fam = harness.make_family(cfg)
    n = _dim(args, cfg)
    V = _basis(cfg, fam, out, n)
    train_sets, test_sets = _sets(cfg, fam, V, test=True)
    lam = np.nan
    if method == "intrusive":
        e_train, e_test, rho = harness.evaluate_intrusive(fam, V, train_sets, test_sets)
    else:
        d = out / "models" / f"{method}_n{n}"
        if not (d / "manifest.json").is_file():
            raise UsageError(f"no learned family at {d}; run learn or select first")
        family, info = io.read_family(d)
        lam = info.get("lambda", np.nan)
        e_train, e_test, rho = harness.evaluate_family(family, train_sets, test_sets)
    row = ErrorRow(method, n, e_train, e_test, rho, bool(np.isinf(e_test)), lam)
    io.write_rows(out / f"evaluation_{method}_n{n}.csv", [row.as_dict()],
                  harness.SUMMARY_COLUMNS)
    print(f"{method} n={n} e_train={e_train:.6g} e_test={e_test:.6g} rho={rho:.6g}")
    return 0


def cmd_reproduce(args):
    cfg = load_config(args.experiment, args.seed)
    out = _out(args)
    rows = harness.run_experiment(cfg, out)
    for r in rows:
        print(f"{r.method:9s} n={r.n:<3d} e_train={r.e_train:.4g} e_test={r.e_test:.4g} "
              f"rho={r.rho:.4g}")
    return 0


COMMANDS = {"simulate": cmd_simulate, "basis": cmd_basis, "learn": cmd_learn,
            "select": cmd_select, "evaluate": cmd_evaluate, "reproduce": cmd_reproduce}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file or built-in experiment name")
    common.add_argument("--method", help="plain, tikhonov, pir, spir (or intrusive)")
    common.add_argument("--dim", type=int, help="reduced dimension n")
    common.add_argument("--lambda", dest="lam", type=float, help="regularization parameter")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="stableopinf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "reproduce":
            p.add_argument("experiment", help=f"one of {', '.join(PRESETS)} or a config file")
    return parser


def _origin(exc):
    """Name of the innermost package module the exception passed through."""
    name = "stableopinf"
    for frame, _ in traceback.walk_tb(exc.__traceback__):
        mod = frame.f_globals.get("__name__", "")
        if mod.startswith("stableopinf."):
            name = mod
    return name


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        parser.print_usage(sys.stderr)
        print(f"stableopinf: error: {exc}", file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"{_origin(exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
