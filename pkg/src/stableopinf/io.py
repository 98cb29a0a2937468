"""CSV and manifest persistence for trajectories, bases, operators and tables."""

import csv
import hashlib
import json
import platform
from pathlib import Path

import numpy as np
import scipy

from .dynamics import QuadraticModel, Trajectory
from .interp import ModelFamily

FMT = "%.17g"


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return FMT % v
    return str(v)


def write_matrix(path, M):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.atleast_2d(M), delimiter=",", fmt=FMT)


def read_matrix(path):
    M = np.loadtxt(path, delimiter=",", ndmin=2)
    return M


def write_trajectory(path, traj):
    """Rows ``t, x1..xn, u1..up``; the inputs of row 0 are left empty."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n, p = traj.states.shape[0], traj.inputs.shape[0]
    header = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"u{i + 1}" for i in range(p)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for k, t in enumerate(traj.times):
            u = [""] * p if k == 0 else [FMT % v for v in traj.inputs[:, k - 1]]
            w.writerow([FMT % t] + [FMT % v for v in traj.states[:, k]] + u)


def read_trajectory(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    n = sum(h.startswith("x") for h in header)
    p = sum(h.startswith("u") for h in header)
    vals = np.array([[float(v) if v != "" else np.nan for v in r] for r in body])
    t = vals[:, 0]
    dt = float(t[1] - t[0]) if t.size > 1 else 0.0
    states = vals[:, 1:1 + n].T.copy()
    inputs = vals[1:, 1 + n:1 + n + p].T.copy()
    return Trajectory(states, inputs, dt, not np.all(np.isfinite(states)))


def write_rows(path, rows, columns):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_validation_table(path, selection):
    """Rows are grid values, columns the interior parameters plus the mean."""
    mus = selection.params[1:-1]
    columns = ["lambda"] + [f"mu={FMT % m}" for m in mus] + ["mean"]
    rows = []
    for lam, errs, mean in zip(selection.grid, selection.table, selection.means):
        rows.append(dict(zip(columns, [lam, *errs, mean])))
    write_rows(path, rows, columns)


def write_family(directory, family, manifest):
    """Per-parameter operator CSVs plus ``manifest.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for j, m in enumerate(family.models):
        write_matrix(d / f"mu{j}_A.csv", m.A)
        write_matrix(d / f"mu{j}_B.csv", m.B)
        write_matrix(d / f"mu{j}_F.csv", m.F)
        write_matrix(d / f"mu{j}_c.csv", m.c[None, :])
    info = dict(manifest, params=[float(p) for p in family.params],
                structure=family.structure, eps=family.eps, n=family.models[0].dim,
                p=family.models[0].input_dim)
    write_json(d / "manifest.json", info)


def read_family(directory):
    d = Path(directory)
    info = read_json(d / "manifest.json")
    models = []
    for j in range(len(info["params"])):
        B = read_matrix(d / f"mu{j}_B.csv")
        models.append(QuadraticModel(read_matrix(d / f"mu{j}_A.csv"),
                                     B.reshape(info["n"], info["p"]),
                                     read_matrix(d / f"mu{j}_F.csv"),
                                     read_matrix(d / f"mu{j}_c.csv").ravel()))
    return ModelFamily(info["params"], models, info["structure"], info["eps"]), info


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def config_hash(cfg_dict):
    blob = json.dumps(cfg_dict, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def run_manifest(cfg_dict):
    from . import __version__

    return {"config": cfg_dict, "config_sha256": config_hash(cfg_dict),
            "seed": cfg_dict.get("seed"),
            "versions": {"stableopinf": __version__, "python": platform.python_version(),
                         "numpy": np.__version__, "scipy": scipy.__version__}}
