import json

import pytest

from slabres.cli import run
from slabres.reports import load_json_report


@pytest.fixture
def rod_config(tmp_path, rod_config_text):
    path = tmp_path / "rod.json"
    path.write_text(rod_config_text)
    return str(path)


def _read_rows(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("#") or line.startswith("kappa") or line.startswith("ktilde"):
                continue
            rows.append([float(v) for v in line.strip().split(",")])
    return rows


def test_model_reproduces_peak_dip_table(tmp_path):
    out = tmp_path / "anomaly.csv"
    svg = tmp_path / "anomaly.svg"
    png = tmp_path / "anomaly.png"
    model_json = tmp_path / "anomaly_model.json"
    argv = ["model", "--family", "generic", "--ell1", "0", "--r2", "2", "--t2", "1",
            "--r0", "0.6", "--t0", "0.8", "--ktilde", "0,0.01,0.02,0.03",
            "--wtilde", "-0.005:0.005:101", "--out", str(out), "--svg", str(svg),
            "--fig", str(png), "--save-model", str(model_json)]
    outcome = run(argv)
    assert outcome.exit_code == 0
    assert set(outcome.artifacts) == {str(out), str(svg), str(png), str(model_json)}

    head = out.read_text().splitlines()
    assert head[0].startswith("# slabres model 0.1.0 ")
    assert head[1] == "ktilde,wtilde,re_R,im_R,re_T,im_T,transmittance,energy_defect"
    rows = _read_rows(out)
    assert len(rows) == 4 * 101
    by_point = {(r[0], round(r[1], 7)): r for r in rows}
    # horizontal background at |T|^2 = t0^2 = 0.64 for ktilde = 0
    assert by_point[(0.0, 0.001)][6] == pytest.approx(0.64, abs=1e-12)
    # total reflection / transmission on the zero curves of ktilde = 0.02
    assert by_point[(0.02, -0.0004)][6] <= 1e-8
    assert by_point[(0.02, -0.0008)][6] >= 1.0 - 1e-8
    assert svg.read_text().startswith("<?xml")
    assert png.stat().st_size > 0
    model_doc = load_json_report(str(model_json))
    assert model_doc["family"] == "generic"
    assert model_doc["ell2"] == [1.36, 0.48]


def test_model_output_deterministic(tmp_path, monkeypatch):
    # identical argv (including the relative output path) => identical bytes
    argv = ["model", "--family", "generic", "--ell1", "0.9", "--r2", "2",
            "--t2", "1", "--r0", "0.6", "--t0", "0.8", "--ktilde", "0,0.003",
            "--wtilde", "-0.01:0.01:51", "--out", "out.csv"]
    dir1 = tmp_path / "run1"
    dir2 = tmp_path / "run2"
    dir1.mkdir()
    dir2.mkdir()
    monkeypatch.chdir(dir1)
    assert run(argv).exit_code == 0
    monkeypatch.chdir(dir2)
    assert run(argv).exit_code == 0
    assert (dir1 / "out.csv").read_bytes() == (dir2 / "out.csv").read_bytes()


def test_model_negative_flag_values(tmp_path):
    # values starting with '-' must parse when passed as separate tokens
    out = tmp_path / "m.csv"
    outcome = run(["model", "--family", "full_background", "--ell1", "0",
                   "--r1", "-0.04,0.06", "--r2", "-1,1", "--t2", "1",
                   "--r0", "0.6", "--ktilde", "0,0.01",
                   "--wtilde", "-0.002:0.002:41", "--out", str(out)])
    assert outcome.exit_code == 0
    assert out.exists()


def test_validate_valid_and_invalid(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"family": "generic", "ell1": 0.0, "r2": 2.0,
                                "t2": 1.0, "r0": 0.6, "t0": 0.8, "gamma": 0.0}))
    outcome = run(["validate", "--model", str(good)])
    assert outcome.exit_code == 0
    assert "FAIL" not in outcome.log

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "full_background", "ell1": 2.0,
                               "r1": [0.2, 4.0], "r2": [7.0, 7.0], "t2": 0.1,
                               "r0": 0.6, "t0": 0.99}))
    outcome = run(["validate", "--model", str(bad)])
    assert outcome.exit_code == 2
    assert "t0 = 1" in outcome.log and "FAIL" in outcome.log


def test_solve_outside_diamond_exit_code(rod_config):
    outcome = run(["solve", "--config", rod_config, "--kappa", "0.6",
                   "--omega", "0.7", "--nx", "16", "--nz", "16"])
    assert outcome.exit_code == 4


def test_solve_writes_single_row(rod_config, tmp_path):
    out = tmp_path / "solve.csv"
    outcome = run(["solve", "--config", rod_config, "--kappa", "0.1",
                   "--omega", "0.6", "--nx", "32", "--nz", "32", "--out", str(out)])
    assert outcome.exit_code == 0
    assert "transmittance" in outcome.log
    rows = _read_rows(out)
    assert len(rows) == 1
    assert abs(rows[0][2] ** 2 + rows[0][3] ** 2
               + rows[0][4] ** 2 + rows[0][5] ** 2 - 1.0) <= 1e-8


def test_sweep_csv_and_figures(rod_config, tmp_path):
    out = tmp_path / "sweep.csv"
    svg = tmp_path / "sweep.svg"
    outcome = run(["sweep", "--config", rod_config, "--kappa", "0.0,0.1",
                   "--omega", "0.4:0.6:5", "--nx", "32", "--nz", "32",
                   "--threads", "2", "--out", str(out), "--svg", str(svg)])
    assert outcome.exit_code == 0
    rows = _read_rows(out)
    assert len(rows) == 10
    keys = [(r[0], r[1]) for r in rows]
    assert keys == sorted(keys)
    assert all(abs(r[2] ** 2 + r[3] ** 2 + r[4] ** 2 + r[5] ** 2 - 1.0) <= 1e-8
               for r in rows)
    assert svg.exists()


def test_modes_subcommand(rod_config, tmp_path):
    out = tmp_path / "modes.json"
    outcome = run(["modes", "--config", rod_config, "--kappa", "0",
                   "--window", "0.48:0.56", "--nx", "32", "--nz", "32",
                   "--coarse", "30", "--out", str(out)])
    assert outcome.exit_code == 0
    doc = load_json_report(str(out))
    assert len(doc["modes"]) == 1
    assert doc["modes"][0]["omega0"] == pytest.approx(0.5039, rel=0.02)
    assert doc["modes"][0]["residual"] <= 1e-8
    with open(out) as fh:
        assert fh.readline().startswith("# slabres modes 0.1.0 ")


def test_trace_subcommand(rod_config, tmp_path):
    out = tmp_path / "trace.json"
    outcome = run(["trace", "--config", rod_config, "--kappa0", "0",
                   "--omega0", "0.5056912977432129", "--nx", "32", "--nz", "32",
                   "--offsets", "-0.02,-0.01,0.01,0.02", "--out", str(out)])
    assert outcome.exit_code == 0
    doc = load_json_report(str(out))
    assert len(doc["samples"]) == 4
    for kt, re_om, im_om in doc["samples"]:
        assert im_om <= 1e-8
    assert abs(doc["ell1"]) <= 1e-4
    assert doc["ell2"][1] > 0.0


def test_usage_errors(rod_config):
    assert run(["frobnicate"]).exit_code == 1
    assert run(["fit", "--config", rod_config, "--kappa0", "0"]).exit_code == 1
    assert run(["sweep", "--config", rod_config, "--kappa", "0",
                "--omega", "bad:grid"]).exit_code == 1


def test_invalid_config_exit_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    outcome = run(["solve", "--config", str(bad), "--kappa", "0", "--omega", "0.5"])
    assert outcome.exit_code == 2
    missing = run(["solve", "--config", str(tmp_path / "nope.json"),
                   "--kappa", "0", "--omega", "0.5"])
    assert missing.exit_code == 2
