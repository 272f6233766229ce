import json
import math

import numpy as np
import pytest

from glskit import GridFunction, MeasuredPartition, write_gridfn, write_psi_file
from glskit.cli import ConfigError, main, parse_config


def run(tmp_path, experiment, text, *extra):
    cfg = tmp_path / f"{experiment}.cfg"
    cfg.write_text(text)
    out = tmp_path / "out"
    status = main([experiment, "--config", str(cfg), "--out", str(out), *extra])
    report = json.loads((out / f"{experiment}.json").read_text()) if (out / f"{experiment}.json").exists() else None
    return status, report, out


@pytest.fixture
def grid16(tmp_path):
    path = tmp_path / "u.gridfn"
    u = GridFunction(MeasuredPartition.grid((16, 16)), np.random.default_rng(7).integers(0, 9, 256).astype(float))
    write_gridfn(path, u)
    return path


def test_parse_defaults_and_types():
    cfg = parse_config("# comment\npsi = grand_b:2   # trailing\ntol=1e-5\n", "norm")
    assert cfg == {"experiment": "norm", "seed": 0, "output_dir": "glskit_out", "f": "gaussian",
                   "psi": "grand_b:2", "tol": 1e-5}


@pytest.mark.parametrize("text", ["bogus = 1", "tol = abc", "psi", "tol = 1\ntol = 2", "experiment = g0",
                                  "seed = -1"])
def test_parse_rejects(text):
    with pytest.raises(ConfigError):
        parse_config(text, "norm")


def test_parse_unknown_experiment():
    with pytest.raises(ConfigError):
        parse_config("", "fly")


def test_norm_gaussian(tmp_path):
    status, rep, out = run(tmp_path, "norm", "f = gaussian\npsi = power_alpha:0.5\n", "--seed", "42")
    assert status == 0
    assert rep["result"]["value"] == pytest.approx(0.797885, abs=1e-6)
    assert rep["seed"] == 42 and rep["config"]["seed"] == 42
    assert rep["config"]["tol"] == 1e-4
    assert "GLSKIT_THREADS" in rep["environment"]
    assert (out / "norm_trace.csv").read_text().startswith("p,ratio\n")
    assert not list(out.glob("*.tmp"))


def test_norm_divergent_reports_inf(tmp_path):
    status, rep, _ = run(tmp_path, "norm", "psi = power_alpha:0.25\n")
    assert status == 0 and rep["result"]["value"] == "inf"


def test_norm_with_files(tmp_path):
    ps = np.geomspace(1.01, 1e4, 60)
    write_psi_file(tmp_path / "w.psi", ps, np.sqrt(ps), 1.0, math.inf)
    u = GridFunction(MeasuredPartition.grid(4), [1.0, 0.0, 0.0, 0.0])
    write_gridfn(tmp_path / "f.gridfn", u)
    status, rep, _ = run(tmp_path, "norm", "f = file:f.gridfn\npsi = file:w.psi\n")
    assert status == 0 and rep["result"]["value"] > 0


def test_validation_exit_codes(tmp_path):
    assert run(tmp_path, "norm", "nope = 1\n")[0] == 2
    status, rep, _ = run(tmp_path, "norm", "psi = cubic:1\n")
    assert status == 2 and rep["status"] == "error" and rep["error"]["type"] == "ConfigError"
    status, rep, _ = run(tmp_path, "norm", "f = file:missing.gridfn\n")
    assert status == 2
    assert main(["norm", "--config", str(tmp_path / "absent.cfg")]) == 2


def test_polarize_run_deterministic(tmp_path, grid16):
    text = f"grid = {grid16}\nseed = 7\nnu_list = power_alpha:0.5\n"
    s1, rep, out = run(tmp_path, "polarize_run", text)
    first = (out / "polarize_run_trace.csv").read_bytes()
    s2, _, _ = run(tmp_path, "polarize_run", text)
    assert s1 == s2 == 0
    assert (out / "polarize_run_trace.csv").read_bytes() == first
    rows = first.decode().splitlines()
    assert rows[0] == "iter,changed,lp_dist_2,gls_dist_power_alpha(0.5),potential"
    dist = [float(r.split(",")[2]) for r in rows[1:]]
    assert all(a >= b for a, b in zip(dist, dist[1:])) and dist[-1] == 0.0
    assert rep["seed"] == 7 and rep["result"]["terminal_fixed_point"]


def test_polarize_nonconvergence(tmp_path):
    status, rep, out = run(tmp_path, "polarize_run", "random_dims = 8,8\nmax_iter = 2\n")
    assert status == 3 and rep["error"]["type"] == "NonConvergence"
    assert (out / "polarize_run_trace.csv").exists()


def test_symmetrize(tmp_path, grid16):
    status, rep, out = run(tmp_path, "symmetrize", f"grid = {grid16}\n")
    assert status == 0
    for row in rep["result"]["norms"]:
        assert row["input"] == row["symmetrized"]
    assert (out / "symmetrized.gridfn").read_text().startswith("GRIDFN v1 d=2 n=16,16")


def test_polya_szego(tmp_path):
    status, rep, _ = run(tmp_path, "polya_szego", "random_dims = 32\n", "--seed", "3")
    assert status == 0 and all(r["holds"] for r in rep["result"]["rows"])


def test_remark1_column(tmp_path):
    status, rep, out = run(tmp_path, "remark1", "psi = power_alpha:0.5\nf = indicator:0.1\nn_max = 20\n")
    assert status == 0
    text = (out / "remark1_identity.csv").read_text()
    assert text.splitlines()[0] == "n,measured,norm_over_n_plus_1,rel_error"
    assert rep["result"]["max_rel_error"] < 1e-12


def test_remark2(tmp_path):
    status, rep, _ = run(tmp_path, "remark2", "n_max = 10\n")
    assert status == 0 and min(rep["result"]["gap_norms"]) > 0.55


def test_g0_and_ega(tmp_path):
    status, rep, _ = run(tmp_path, "g0", "f = gaussian_truncated:3\n")
    assert status == 0 and rep["result"]["verdict"] == "member"
    status, rep, out = run(tmp_path, "ega", "cells = 4096\nlevels = 1,2,3\ndeltas = 0.5,0.1,0.01\n")
    assert status == 0 and len(rep["result"]["etas"]) == 3
    assert (out / "ega_modulus.csv").exists()


def test_theorems(tmp_path):
    status, rep, out = run(tmp_path, "theorem1", "n_max = 60\nnu = power_alpha:0.25\npsi = power_alpha:0.5\n")
    assert status == 0 and rep["result"]["verdict"] == "condition1_fails"
    for leg in ("condition1", "condition2", "extraction"):
        assert (out / f"theorem1_{leg}.csv").exists()
    status, rep, _ = run(tmp_path, "theorem1", "nu = power_alpha:1\npsi = power_alpha:0.5\n")
    assert status == 2
    status, rep, _ = run(tmp_path, "theorem2", "cells = 4096\n")
    assert status == 0 and rep["result"]["verdict"] == "ega_fails"
