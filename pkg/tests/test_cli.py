import json

import pytest

from lattice_akns.cli import main


def run(args):
    return main([str(a) for a in args])


def test_unknown_config_key_is_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": {"family": "type1", "bogus": 1}}))
    code = run(["soliton", "--config", cfg, "--out", tmp_path / "out"])
    assert code == 2


def test_unknown_top_level_key_is_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mystery": True, "params": {"family": "type1"}}))
    assert run(["soliton", "--config", cfg, "--out", tmp_path / "out"]) == 2


def test_soliton_periodicity_violation(tmp_path):
    out = tmp_path / "out"
    code = run(
        [
            "soliton",
            "--model",
            "dnls",
            "--family",
            "type1",
            "--sites",
            12,
            "--periodic",
            "--xi-re",
            "1.3",
            "--xi-im",
            "0.2",
            "--out",
            out,
        ]
    )
    assert code == 1
    report = json.loads((out / "failure-report.json").read_text())
    assert report["error"] == "PeriodicityViolation"


def test_soliton_root_of_unity_succeeds(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"params": {"family": "type1", "xi_root_of_unity": 1, "periodic": True, "sites": 12}}))
    out = tmp_path / "out"
    assert run(["soliton", "--config", cfg, "--out", out]) == 0
    state = json.loads((out / "state.json").read_text())
    assert state["config"]["params"]["xi_root_of_unity"] == 1
    assert state["sites"] == 12
    csv = (out / "state.csv").read_text().splitlines()
    assert csv[0] == "t,site,field,row,col,re,im"
    assert len(csv) == 1 + 2 * 12


def test_glm_symmetric_single_mode(tmp_path):
    out = tmp_path / "glm"
    assert run(["glm", "--scheme", "symmetric", "--modes", 1, "--out", out]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["factorization_residual"] < 1e-10
    assert report["closed_form_delta"] < 1e-10
    lines = (out / "glm_solution.csv").read_text().splitlines()
    assert lines[0] == "i,j,b_re,b_im,c_re,c_im"


def test_glm_output_is_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert run(["glm", "--modes", 2, "--seed", 7, "--out", out]) == 0
    assert (out1 / "glm_solution.csv").read_bytes() == (out2 / "glm_solution.csv").read_bytes()


def test_evolve_and_charges_commands(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "params": {
                    "initial": {"family": "type1", "xi_root_of_unity": 1, "sites": 12},
                    "alpha": 1,
                    "dt": 1e-3,
                    "steps": 50,
                }
            }
        )
    )
    out = tmp_path / "evolve"
    assert run(["evolve", "--config", cfg, "--out", out]) == 0
    assert (out / "trajectory.csv").exists()
    final = json.loads((out / "final_state.json").read_text())
    assert final["t"] == pytest.approx(0.05)

    out2 = tmp_path / "charges"
    assert run(["charges", "--config", cfg, "--out", out2]) == 0
    rep = json.loads((out2 / "report.json").read_text())
    assert rep["h_drift"] < 1e-8
    assert rep["trace_drift_rel"] < 1e-8
    header = (out2 / "charges.csv").read_text().splitlines()[0]
    assert header.startswith("t,h1_re,h1_im")


def test_burgers_command(tmp_path):
    out = tmp_path / "burgers"
    assert run(["burgers", "--delta", "0.05", "--out", out]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert 6.0 <= rep["truncation"]["ratio_squared_difference"] <= 10.0
    assert rep["exact_residuals"]["slope"] < 1e-10


def test_continuum_command(tmp_path):
    out = tmp_path / "continuum"
    assert run(["continuum", "--out", out]) == 0
    rep = json.loads((out / "report.json").read_text())
    assert 3.5 <= rep["ratio_u"] <= 4.5


def test_al_soliton_command(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "al", "params": {"family": "oscillator", "sites": 16}}))
    out = tmp_path / "al"
    assert run(["soliton", "--config", cfg, "--out", out]) == 0
    state = json.loads((out / "state.json").read_text())
    assert state["model"] == "al"


def test_verify_all_quick(tmp_path, capsys):
    out = tmp_path / "verify"
    assert run(["verify-all", "--quick", "--out", out]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 12
    assert all(line.startswith("PASS") for line in lines)
    rep = json.loads((out / "report.json").read_text())
    assert all(s["passed"] for s in rep["suites"])


def test_nested_initial_block_is_validated(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"params": {"initial": {"family": "type1", "junk": 1}, "steps": 5}})
    )
    assert run(["evolve", "--config", cfg, "--out", tmp_path / "out"]) == 2
