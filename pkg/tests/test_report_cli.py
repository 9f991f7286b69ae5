"""Report serialization, config validation, CLI exit codes and outputs."""
import json

import numpy as np
import pytest
from click.testing import CliRunner

from rieszcert.cli import main
from rieszcert.config import CampaignConfig, ConfigError
from rieszcert.report import CertificationReport, CheckResult, write_plotdata


def _small_config(tmp_path, **overrides):
    raw = {
        "seed": 3,
        "p_list": [2.0],
        "models": [
            {"kind": "weighted_circle", "N": 64, "phi": {"type": "zero"}, "label": "flat_circle"},
        ],
        "kappa_list": [0.2],
        "budgets": {"samples": 3, "ascent_iters": 40, "time_nodes": 128},
        "outputs": str(tmp_path / "out"),
    }
    raw.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return path


# ---------------------------------------------------------------------------
# report


def test_checkresult_row_and_json_roundtrip(tmp_path):
    rep = CertificationReport()
    rep.add(
        CheckResult(
            check_id="x.y",
            prop="something holds",
            params={"p": np.float64(2.0)},
            margin=np.float64(0.5),
            passed=True,
            witness={"arr": np.arange(3)},
        )
    )
    row = rep.rows[0].as_row()
    assert row["id"] == "x.y"
    assert row["pass"] == "True"
    path = tmp_path / "r.json"
    rep.write_json(path)
    loaded = json.loads(path.read_text())
    assert loaded["all_passed"] is True
    assert loaded["rows"][0]["witness"]["arr"] == [0, 1, 2]
    rep.write_csv(tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().startswith("id,prop,params,margin")


def test_report_merge_and_verdicts():
    a = CertificationReport([CheckResult("a", "p", margin=1.0, passed=True)])
    b = CertificationReport(
        [CheckResult("b", "p", margin=-1.0, passed=False, inconclusive=True)]
    )
    a.extend(b)
    assert [r.check_id for r in a.rows] == ["a", "b"]
    assert not a.all_passed
    assert a.any_inconclusive
    assert len(a.summary_lines()) == 2


def test_write_plotdata(tmp_path):
    path = tmp_path / "pd" / "t.csv"
    write_plotdata(path, ["a", "b"], [[1.0, "x"], [0.25, "y"]])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1.0,x"


# ---------------------------------------------------------------------------
# config


def test_config_defaults_valid():
    cfg = CampaignConfig()
    assert cfg.p_list == [2.0, 3.0]
    assert cfg.tolerances["assert_tol"] > 0


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        CampaignConfig(p_list=[])
    with pytest.raises(ConfigError):
        CampaignConfig(p_list=[1.0])
    with pytest.raises(ConfigError):
        CampaignConfig(kappa_list=[1.5])
    with pytest.raises(ConfigError):
        CampaignConfig(tolerances={"assert_tol": -1.0})
    with pytest.raises(ConfigError):
        CampaignConfig.from_dict({"mystery_key": 1})
    with pytest.raises(ConfigError):
        CampaignConfig.from_dict([1, 2])


def test_config_conjugate_swap_rule():
    cfg = CampaignConfig(p_list=[1.5, 4.0])
    assert cfg.bellman_p(1.5) == pytest.approx(3.0)
    assert cfg.bellman_p(4.0) == 4.0


def test_config_file_roundtrip(tmp_path):
    cfg = CampaignConfig(seed=9)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    loaded = CampaignConfig.from_file(path)
    assert loaded.seed == 9
    assert loaded.to_dict() == cfg.to_dict()


# ---------------------------------------------------------------------------
# cli


def test_cli_constant_audit_exit_zero(tmp_path):
    out = tmp_path / "out"
    runner = CliRunner()
    result = runner.invoke(main, ["constant-audit", "--out", str(out)])
    assert result.exit_code == 0
    report = json.loads((out / "report.json").read_text())
    sup = next(r for r in report["rows"] if r["id"] == "audit.sup_constant")
    assert 2.5 < sup["witness"]["sup"] < 3.0
    assert (out / "report.csv").exists()
    assert (out / "plotdata" / "constant_curve.csv").exists()
    assert (out / "figures" / "constant_curve.png").exists()
    assert (out / "figures" / "margins.png").exists()


def test_cli_embedding_defaults_worked_ratio(tmp_path):
    cfg = _small_config(tmp_path)
    runner = CliRunner()
    result = runner.invoke(main, ["embedding", "--config", str(cfg)])
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    worked = next(r for r in report["rows"] if r["id"] == "embedding.worked_example")
    assert worked["details"]["ratio"] == pytest.approx(0.122, abs=0.01)
    assert (tmp_path / "out" / "plotdata" / "embedding_ratios.csv").exists()


def test_cli_empty_plist_schema_error(tmp_path):
    cfg = _small_config(tmp_path, p_list=[])
    runner = CliRunner()
    result = runner.invoke(main, ["embedding", "--config", str(cfg)])
    assert result.exit_code == 2


def test_cli_malformed_json_schema_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    runner = CliRunner()
    result = runner.invoke(main, ["constant-audit", "--config", str(path)])
    assert result.exit_code == 2


def test_cli_seed_override_and_byte_identical_reports(tmp_path):
    cfg = _small_config(tmp_path)
    runner = CliRunner()
    out1 = tmp_path / "o1"
    out2 = tmp_path / "o2"
    r1 = runner.invoke(main, ["embedding", "--config", str(cfg), "--out", str(out1), "--seed", "11"])
    r2 = runner.invoke(main, ["embedding", "--config", str(cfg), "--out", str(out2), "--seed", "11"])
    assert r1.exit_code == 0 and r2.exit_code == 0
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()
    out3 = tmp_path / "o3"
    r3 = runner.invoke(main, ["embedding", "--config", str(cfg), "--out", str(out3), "--seed", "12"])
    assert (out1 / "report.json").read_bytes() != (out3 / "report.json").read_bytes()


def test_cli_unknown_subcommand(tmp_path):
    runner = CliRunner()
    result = runner.invoke(main, ["not-a-campaign"])
    assert result.exit_code != 0


def test_cli_riesz_norm_plotdata(tmp_path):
    cfg = _small_config(tmp_path)
    runner = CliRunner()
    result = runner.invoke(main, ["riesz-norm", "--config", str(cfg)])
    assert result.exit_code == 0
    pd = (tmp_path / "out" / "plotdata" / "norm_vs_p.csv").read_text().splitlines()
    assert pd[0] == "model,p,empirical_norm,ceiling"
    assert len(pd) == 2  # one model x one p
    assert (tmp_path / "out" / "figures" / "norm_vs_p.png").exists()
