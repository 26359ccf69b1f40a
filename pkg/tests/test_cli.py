"""End-to-end CLI tests: subcommands, config files, exit codes, artifacts."""

import json

import pytest

from discountgap.cli import main
from discountgap.config import parse_config_file
from discountgap.errors import ConfigError


def _read_csv(path):
    lines = path.read_text().strip().split("\n")
    header = lines[0].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[1:]]
    return header, rows


# -- construct -----------------------------------------------------------------


def test_construct_writes_table_and_figure(tmp_path, capsys):
    rc = main(["construct", "--out", str(tmp_path)])
    assert rc == 0
    header, rows = _read_csv(tmp_path / "construct.csv")
    assert header == ["x", "psi", "eta", "h", "f", "g"]
    for row in rows:
        x, eta = float(row["x"]), float(row["eta"])
        if x <= -0.5 or x >= 0.0:
            assert eta == 2.0 * x  # anchor identity outside the envelope
    assert (tmp_path / "construct.png").exists()


def test_construct_no_plot(tmp_path):
    rc = main(["construct", "--out", str(tmp_path), "--no-plot"])
    assert rc == 0
    assert not (tmp_path / "construct.png").exists()


def test_construct_sinlog_h_crosses_zero_at_anchor(tmp_path):
    rc = main(["construct", "--out", str(tmp_path), "--variant", "sinlog",
               "--x-min", "0.9", "--x-max", "1.1", "--samples", "201", "--no-plot"])
    assert rc == 0
    _, rows = _read_csv(tmp_path / "construct.csv")
    hs = [(float(r["x"]), float(r["h"])) for r in rows]
    assert all(h < 0 for x, h in hs if x < 1.0 - 1e-12)
    assert all(h > 0 for x, h in hs if x > 1.0 + 1e-12)


def test_construct_empty_range_is_config_error(tmp_path, capsys):
    rc = main(["construct", "--out", str(tmp_path), "--x-min", "1.0", "--x-max", "1.0"])
    assert rc == 2
    assert "empty sample range" in capsys.readouterr().err


# -- solve ---------------------------------------------------------------------


def test_solve_defaults(capsys):
    rc = main(["solve", "--lambda", "2", "--format", "json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["u"] == pytest.approx(0.125, abs=1e-12)
    assert payload["v"] == pytest.approx(-0.375, abs=1e-12)
    assert payload["solver_discrepancy"] <= 1e-10
    assert max(abs(payload["residual_u"]), abs(payload["residual_v"])) <= 1e-10


def test_solve_tiny_lambda_z_near_anchor(capsys):
    rc = main(["solve", "--lambda", "1e-9", "--format", "json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["z"] - 1.0) <= 1e-6


def test_solve_lambda_zero_rejected(capsys):
    rc = main(["solve", "--lambda", "0"])
    assert rc == 2
    assert "positive" in capsys.readouterr().err


def test_solve_solver_failure_exit_code(tmp_path, capsys):
    cfg = tmp_path / "broken.cfg"
    cfg.write_text("solver.max_iter = 1\n")
    rc = main(["solve", "--lambda", "0.3", "--config", str(cfg)])
    assert rc == 3
    assert "solver failure" in capsys.readouterr().err


# -- sweep ---------------------------------------------------------------------


def test_sweep_artifacts_and_determinism(tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        rc = main(["sweep", "--schedule", "mu", "--j-lo", "1", "--j-hi", "12",
                   "--out", str(out), "--no-plot"])
        assert rc == 0
    assert (out1 / "sweep_mu.csv").read_bytes() == (out2 / "sweep_mu.csv").read_bytes()
    summary = json.loads((out1 / "sweep_mu.json").read_text())
    assert summary["params"] == {"k0": 0.5, "k1": 1.0, "k2": 2.0, "k_star": 1.6, "d": 1.0}
    assert summary["schedule"] == {"tag": "mu", "j_lo": 1, "j_hi": 12}
    assert summary["bounds_ok"] is True


def test_sweep_with_figure(tmp_path):
    rc = main(["sweep", "--schedule", "nu", "--j-hi", "8", "--out", str(tmp_path)])
    assert rc == 0
    assert (tmp_path / "sweep_nu.png").exists()


def test_sweep_loguniform_needs_bounds(tmp_path, capsys):
    rc = main(["sweep", "--schedule", "loguniform", "--out", str(tmp_path), "--no-plot"])
    assert rc == 2
    rc = main(["sweep", "--schedule", "loguniform", "--lam-min", "1e-6",
               "--lam-max", "1.0", "--j-hi", "20", "--out", str(tmp_path), "--no-plot"])
    assert rc == 0


# -- limits ----------------------------------------------------------------------


def test_limits_certifies_defaults(tmp_path, capsys):
    rc = main(["limits", "--j-max", "30", "--out", str(tmp_path), "--format", "json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["certified"] is True
    assert payload["gap"] == pytest.approx(0.0625, abs=1e-6)
    assert payload["target_lo"] == 0.25
    assert payload["target_hi"] == 0.3125
    assert (tmp_path / "limits.json").exists()
    assert (tmp_path / "limits.png").exists()
    echoed = json.loads((tmp_path / "limits.json").read_text())
    assert echoed["params"]["k_star"] == 1.6


def test_limits_small_gap_fails_certification(tmp_path, capsys):
    cfg = tmp_path / "close.cfg"
    cfg.write_text("params.k_star = 1.999\n")
    rc = main(["limits", "--j-max", "25", "--config", str(cfg),
               "--out", str(tmp_path), "--format", "json", "--no-plot"])
    assert rc == 4
    payload = json.loads(capsys.readouterr().out)
    assert payload["certified"] is False
    assert payload["gap"] == pytest.approx(0.5 * (1 / 1.999 - 0.5), abs=1e-7)


def test_limits_invalid_ordering_is_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("params.k1 = 3\n")  # k1 > k2
    rc = main(["limits", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 2
    assert "ordering" in capsys.readouterr().err


# -- pde -------------------------------------------------------------------------


def test_pde_single_lambda_matches_reduced(tmp_path, capsys):
    rc = main(["pde", "--lambda", "1", "--grid-n", "16", "--out", str(tmp_path),
               "--format", "json", "--no-plot"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["deviation"] <= 1e-6
    assert payload["constancy"] <= 1e-8
    assert (tmp_path / "pde_single.json").exists()


def test_pde_schedule_sweep(tmp_path):
    rc = main(["pde", "--schedule", "mu", "--j-lo", "1", "--j-hi", "6",
               "--grid-n", "16", "--out", str(tmp_path), "--no-plot"])
    assert rc == 0
    header, rows = _read_csv(tmp_path / "pde_mu.csv")
    assert header[-1] == "constancy"
    assert len(rows) == 6
    assert all(float(r["constancy"]) <= 1e-8 for r in rows)


# -- config parsing ---------------------------------------------------------------


def test_config_unknown_key_reports_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("params.k0 = 0.5\nnot.a.key = 1\n")
    with pytest.raises(ConfigError, match=r"run\.cfg:2: unknown key"):
        parse_config_file(cfg)


def test_config_bad_value_reports_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("\n# comment\nparams.k0 = fast\n")
    with pytest.raises(ConfigError, match=r"run\.cfg:3: bad value"):
        parse_config_file(cfg)


def test_config_missing_equals_reports_line(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("params.k0 0.5\n")
    with pytest.raises(ConfigError, match=r"run\.cfg:1: expected KEY = VALUE"):
        parse_config_file(cfg)


def test_config_values_parse_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "params.k0 = 0.4\n"
        "variant = dyadic\n"
        "schedule.tag = nu\n"
        "schedule.j_hi = 9\n"
        "output.plot = false\n"
    )
    rc = main(["sweep", "--config", str(cfg), "--j-hi", "5", "--out", str(tmp_path),
               "--format", "json"])
    assert rc == 0
    summary = json.loads((tmp_path / "sweep_nu.json").read_text())
    assert summary["params"]["k0"] == 0.4
    assert summary["schedule"]["j_hi"] == 5  # flag wins over file
    assert not (tmp_path / "sweep_nu.png").exists()


def test_sinlog_variant_default_k0(capsys):
    rc = main(["solve", "--lambda", "0.5", "--variant", "sinlog", "--format", "json"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    # with k0 = 0.25 the recovered u obeys lam*u = -f(z) = k0 (d - z)
    assert payload["u"] == pytest.approx(0.25 * (1.0 - payload["z"]) / 0.5, rel=1e-10)
