import json
import subprocess
import sys

import numpy as np
import pytest

from couette import cli, spectral1d, suites


def _run(tmp_path, *argv):
    return cli.main(["--out", str(tmp_path), *argv])


def _record(path):
    rec = json.loads(path.read_text())
    rec.pop("wall_time")
    return rec


def test_eigen_writes_negative_lambda(tmp_path, capsys):
    assert _run(tmp_path, "eigen", "--gamma", "0.05", "--a", "1") == 0
    rec = json.loads((tmp_path / "eigen.json").read_text())
    assert rec["outputs"]["lambda"] < 0
    assert rec["outputs"]["beta_limit"] == pytest.approx(1.915008, abs=1e-6)
    assert set(rec) >= {"config", "version", "wall_time", "outputs", "files", "flags"}
    assert json.loads(capsys.readouterr().out)["outputs"]["n"] == rec["outputs"]["n"]


def test_fixed_grid_and_eigenfunction_csv(tmp_path):
    assert _run(tmp_path, "eigen", "--gamma", "0.1", "--a", "1", "--n", "255", "--write-phi", "true") == 0
    data = np.loadtxt(tmp_path / "eigenfunction.csv", delimiter=",", skiprows=1)
    assert data.shape == (255, 2)
    assert np.sqrt(np.sum(data[:, 1] ** 2) * 2 / 256) == pytest.approx(1.0, abs=1e-10)


def test_empty_window_is_success(tmp_path):
    assert _run(tmp_path, "window", "--gamma", "0.05", "--a", "0.4") == 0
    out = json.loads((tmp_path / "window.json").read_text())["outputs"]
    assert out["empty"] and out["t_min"] is None


def test_missing_flag_exits_2_with_usage():
    res = subprocess.run([sys.executable, "-m", "couette", "eigen", "--gamma", "0.05"],
                         capture_output=True, text=True)
    assert res.returncode == 2
    assert "usage:" in res.stderr and "--a" in res.stderr


def test_invalid_value_exits_2(tmp_path, capsys):
    assert _run(tmp_path, "eigen", "--gamma", "-1", "--a", "1") == 2
    assert "gamma" in capsys.readouterr().err
    assert _run(tmp_path, "beta", "--a", "0.3") == 2


def test_numerical_failure_exits_3(tmp_path, monkeypatch, capsys):
    from couette.errors import NoConvergence

    def boom(*a, **k):
        raise NoConvergence("forced")

    monkeypatch.setattr(spectral1d, "converged_eigenvalue", boom)
    assert _run(tmp_path, "eigen", "--gamma", "0.05", "--a", "1") == 3
    assert "forced" in capsys.readouterr().err


def test_same_seed_same_record(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["--out", str(d), "--seed", "9", "damp", "--rough", "true", "--rough-kmax", "2",
                         "--times", "10:100:3"]) == 0
    assert _record(a / "damp.json") == _record(b / "damp.json")
    assert (a / "norms.csv").read_bytes() == (b / "norms.csv").read_bytes()


def test_interrupted_write_leaves_nothing(tmp_path, monkeypatch):
    def interrupted(src, dst):
        raise KeyboardInterrupt

    monkeypatch.setattr(cli.os, "replace", interrupted)
    with pytest.raises(KeyboardInterrupt):
        cli.main(["--out", str(tmp_path), "window", "--gamma", "0.05", "--a", "0.4"])
    assert list(tmp_path.iterdir()) == []


def test_sweep_grid_rows_and_parallel_identity(tmp_path):
    grid = ["gamma=0.1,0.05,0.025", "a=0.6,1,2"]
    h1, r1 = cli.sweep("eigen", grid, {}, parallelism=1)
    h8, r8 = cli.sweep("eigen", grid, {}, parallelism=8)
    assert len(r1) == 9
    assert cli.csv_text(h1, r1) == cli.csv_text(h8, r8)
    points = [tuple(r[:2]) for r in r1]
    assert points == sorted(points)


def test_sweep_matches_convergence_study():
    gammas = [0.1, 0.05, 0.025]
    header, rows = cli.sweep("eigen", [f"gamma={','.join(map(str, gammas))}"], {"a": 1.0})
    lam = {r[0]: r[header.index("lambda")] for r in rows}
    study = spectral1d.convergence_study(1.0, gammas)
    for row in study.rows:
        assert lam[row.gamma] == row.lam


def test_sweep_records_failures_in_row():
    header, rows = cli.sweep("eigen", ["gamma=-1,0.1"], {"a": 1.0})
    status = header.index("status")
    assert [r[status] for r in rows] == ["error", "ok"]
    assert "gamma" in rows[0][header.index("failure")]


def test_sweep_command_writes_csv(tmp_path):
    assert _run(tmp_path, "--threads", "4", "sweep", "--experiment", "window", "--grid", "a=0.4,1",
                "--set", "gamma=0.05") == 0
    text = (tmp_path / "sweep_window.csv").read_text()
    assert text.splitlines()[0].startswith("a,")
    assert len(text.splitlines()) == 3


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.yaml"
    cfg.write_text(f"experiment: window\nout: {tmp_path / 'from_cfg'}\nparams:\n  gamma: 0.05\n  a: 0.4\n")
    assert cli.main(["--config", str(cfg), "run"]) == 0
    assert json.loads((tmp_path / "from_cfg" / "window.json").read_text())["outputs"]["empty"]
    assert cli.main(["--config", str(cfg), "--out", str(tmp_path / "flag"), "window", "--a", "1"]) == 0
    out = json.loads((tmp_path / "flag" / "window.json").read_text())["outputs"]
    assert out["a"] == 1.0 and not out["empty"]


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("- just\n- a list\n")
    assert cli.main(["--config", str(cfg), "eigen", "--gamma", "0.1", "--a", "1"]) == 2


def test_classify_and_hs_norm_from_csv(tmp_path):
    y = np.linspace(-1, 1, 257)
    np.savetxt(tmp_path / "u.csv", np.c_[y, np.sin(np.pi * y)], delimiter=",", header="y,u", comments="")
    assert _run(tmp_path, "hs-norm", "--field", str(tmp_path / "u.csv"), "--s", "1") == 0
    norm = json.loads((tmp_path / "hs-norm.json").read_text())["outputs"]["norm"]
    assert norm == pytest.approx(np.sqrt(1 + np.pi**2), rel=1e-4)
    np.savetxt(tmp_path / "U.csv", np.c_[y, y + 0.05 * np.sin(np.pi * y)], delimiter=",")
    assert _run(tmp_path, "classify", "--profile", str(tmp_path / "U.csv"), "--period", "6.283") == 0
    assert json.loads((tmp_path / "classify.json").read_text())["outputs"]["verdict"] == "Stable"


def test_bifurcate_outputs(tmp_path):
    assert _run(tmp_path, "bifurcate", "--gamma", "0.1", "--a", "1", "--steps", "2", "--step", "2e-4",
                "--cells-per-width", "8", "--modes", "8", "--s", "1,2") == 0
    rows = (tmp_path / "branch.csv").read_text().splitlines()
    assert rows[0] == "beta,alpha_sq,T,residual,hs_1,hs_2" and len(rows) == 3
    assert (tmp_path / "fields" / "state_001.csv").exists()


def test_report_missing_and_partial(tmp_path, capsys):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert cli.main(["--out", str(empty), "report", str(empty)]) == 0
    text = (empty / "report.md").read_text()
    assert text.count("MissingSuite") == len(suites.TITLES)
    part = tmp_path / "part"
    assert cli.main(["--out", str(part), "suite", "--ids", "1"]) == 0
    assert cli.main(["--out", str(part), "report"]) == 0
    text = (part / "report.md").read_text()
    assert text.count("MissingSuite") == len(suites.TITLES) - 1
    assert "| 1 | limit root" in text and "| pass |" in text


def test_report_all_pass_rendering(tmp_path):
    crits = []
    for i, title in suites.TITLES.items():
        res = suites.CriterionResult(i, title)
        res.add("value", 1.0, "any", True)
        crits.append(res.to_dict())
    (tmp_path / "suite.json").write_text(json.dumps({"outputs": {"criteria": crits}}))
    text = cli.render_report([tmp_path])
    assert "MissingSuite" not in text and "FAIL" not in text
    assert f"{len(crits)} of {len(crits)} criteria pass" in text
