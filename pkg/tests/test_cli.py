import subprocess
import sys

import numpy as np
import pytest

from stableopinf import config, harness, io
from stableopinf.cli import main


@pytest.fixture(scope="module")
def cfg_path(tmp_path_factory):
    cfg = config.synthetic(N=20, K=120, train_params=[0.1, 0.5, 0.9], M_t=2, dims=[3],
                           lambda_grid=[1e-6, 1e2, 5], M_test=3, seed=4)
    path = tmp_path_factory.mktemp("cfg") / "small.json"
    io.write_json(path, cfg.to_dict())
    return str(path)


def read_family(out, name):
    return io.read_family(out / "models" / name)[0]


def test_pir_at_zero_matches_plain(cfg_path, tmp_path):
    for m in ("plain", "pir"):
        assert main(["learn", "--config", cfg_path, "--method", m, "--dim", "3",
                     "--lambda", "0", "--out", str(tmp_path)]) == 0
    plain, pir = read_family(tmp_path, "plain_n3"), read_family(tmp_path, "pir_n3")
    for a, b in zip(plain.models, pir.models):
        for name in ("A", "B", "F"):
            np.testing.assert_allclose(getattr(b, name), getattr(a, name), rtol=1e-10,
                                       atol=1e-10)


def test_select_then_evaluate(cfg_path, tmp_path, capsys):
    assert main(["basis", "--config", cfg_path, "--out", str(tmp_path)]) == 0
    assert main(["select", "--config", cfg_path, "--method", "pir", "--dim", "3",
                 "--out", str(tmp_path)]) == 0
    assert "lambda*=" in capsys.readouterr().out
    assert (tmp_path / "validation_pir_n3.csv").is_file()
    assert main(["evaluate", "--config", cfg_path, "--method", "pir", "--dim", "3",
                 "--out", str(tmp_path)]) == 0
    row = io.read_rows(tmp_path / "evaluation_pir_n3.csv")[0]
    assert np.isfinite(float(row["e_test"])) and float(row["lambda"]) > 0


def test_evaluate_at_a_node_reproduces_the_node_model(cfg_path, tmp_path):
    main(["learn", "--config", cfg_path, "--method", "tikhonov", "--dim", "3",
          "--lambda", "1e-3", "--out", str(tmp_path)])
    fam = read_family(tmp_path, "tikhonov_n3")
    cfg = config.ExperimentConfig.load(cfg_path)
    V = io.read_matrix(tmp_path / "basis.csv")[:, :3]
    full = harness.make_family(cfg)
    sets = harness.reference_sets(cfg.train_params,
                                  harness.training_trajectories(cfg, full, V), V)
    direct = harness.learn_family(cfg, sets, "tikhonov", 1e-3)
    for mu, m in zip(direct.params, direct.models):
        got = fam.interpolate(mu)
        np.testing.assert_array_equal(got.A, m.A)
        np.testing.assert_array_equal(got.F, m.F)


def test_simulate_writes_trajectories(cfg_path, tmp_path):
    assert main(["simulate", "--config", cfg_path, "--out", str(tmp_path)]) == 0
    t = io.read_trajectory(tmp_path / "trajectories" / "mu0_traj1.csv")
    assert t.states.shape == (20, 121) and t.dt == pytest.approx(1e-3)


@pytest.mark.parametrize("argv", [
    ["learn", "--config", "nowhere.json", "--method", "pir", "--out", "x"],
    ["learn", "--config", "synthetic", "--method", "lasso", "--out", "x"],
    ["learn", "--config", "synthetic", "--method", "pir", "--lambda", "-1", "--out", "x"],
    ["basis", "--config", "synthetic"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_unknown_flag_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["basis", "--bogus"])
    assert exc.value.code == 2


def test_numeric_failure_exits_1_with_module_tag(cfg_path, tmp_path, monkeypatch, capsys):
    import stableopinf.opinf as opinf

    def broken(*args, **kw):
        raise np.linalg.LinAlgError("singular")

    monkeypatch.setattr(opinf.la, "lstsq", broken)
    assert main(["learn", "--config", cfg_path, "--method", "plain", "--dim", "3",
                 "--out", str(tmp_path)]) == 1
    assert capsys.readouterr().err.startswith("stableopinf.opinf: LinAlgError")


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "stableopinf", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and "reproduce" in r.stdout
