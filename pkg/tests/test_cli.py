"""Command-line verbs: artifacts, overrides, exit codes, determinism."""

import csv
import json
from pathlib import Path

import pytest
import yaml

from shellcalc import cli
from shellcalc.config import parse_config


def _write(tmp_path: Path, name: str, text: str) -> str:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _read_csv(path: Path):
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.reader(fh))


def test_validate_config_prints_normalized_form(tmp_path, capsys):
    config_path = _write(
        tmp_path, "run.yaml", "mode: stability\nn_ladder: [4, 16]\nmc: {seed: 9}\n"
    )
    assert cli.main(["validate-config", "--config", config_path]) == cli.EXIT_OK
    out = capsys.readouterr().out
    doc = yaml.safe_load(out)
    assert doc["mode"] == "stability"
    assert doc["n_ladder"] == [4, 16]
    assert doc["mc"]["seed"] == 9
    # the printed form is the normalized one: parsing it back is the identity
    assert parse_config(out).serialize() == out


def test_validate_config_accepts_presets(capsys):
    assert cli.main(["validate-config", "--preset", "onshell-vanishing"]) == cli.EXIT_OK
    doc = yaml.safe_load(capsys.readouterr().out)
    assert doc["current_model"]["kind"] == "onshell-vanishing"


def test_overrides_reach_the_document(capsys):
    code = cli.main(
        [
            "validate-config",
            "--preset",
            "counterexample-default",
            "--seed",
            "7",
            "--format",
            "json",
            "--out",
            "elsewhere",
        ]
    )
    assert code == cli.EXIT_OK
    doc = yaml.safe_load(capsys.readouterr().out)
    assert doc["mc"]["seed"] == 7
    assert doc["output"]["formats"] == ["json"]
    assert doc["output"]["directory"] == "elsewhere"


def test_config_and_preset_conflict_exits_2(capsys, tmp_path):
    config_path = _write(tmp_path, "run.yaml", "mode: stability\n")
    code = cli.main(
        ["validate-config", "--config", config_path, "--preset", "onshell-nonzero"]
    )
    assert code == cli.EXIT_CONFIG
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "config"


def test_unreadable_config_exits_2(tmp_path, capsys):
    code = cli.main(["validate-config", "--config", str(tmp_path / "absent.yaml")])
    assert code == cli.EXIT_CONFIG
    assert json.loads(capsys.readouterr().err)["error"] == "config"


def test_invalid_document_exits_2(tmp_path, capsys):
    config_path = _write(tmp_path, "run.yaml", "surprise: 1\n")
    assert cli.main(["validate-config", "--config", config_path]) == cli.EXIT_CONFIG
    diag = json.loads(capsys.readouterr().err)
    assert "surprise" in diag["detail"]


def test_invalid_workers_exits_2(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = cli.main(["stability-demo", "--out", out, "--workers", "0"])
    assert code == cli.EXIT_CONFIG
    assert json.loads(capsys.readouterr().err)["error"] == "config"


def test_stability_demo_writes_all_artifacts(tmp_path, capsys):
    out = tmp_path / "demo"
    assert cli.main(["stability-demo", "--out", str(out)]) == cli.EXIT_OK
    stdout = capsys.readouterr().out
    assert "summary:" in stdout

    rows = _read_csv(out / "stability.csv")
    assert rows[0] == [
        "n",
        "pairing_re",
        "pairing_im",
        "kl_norm",
        "bound_integral",
        "cs_lhs",
        "cs_rhs",
    ]
    assert [r[0] for r in rows[1:]] == ["4", "16", "64", "256"]
    for record in rows[1:]:
        assert float(record[1]) == pytest.approx(3.0, abs=1e-9)
        assert float(record[5]) == 4.0
        assert float(record[6]) == float(record[3])

    payload = json.loads((out / "stability.json").read_text(encoding="utf-8"))
    assert payload["report"]["verdict"] == "CONTRADICTION_DEMONSTRATED"
    assert payload["config"]["mode"] == "stability"

    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["stability_verdict"] == "CONTRADICTION_DEMONSTRATED"
    assert summary["summary"]["indefinite_witness_found"] is None

    for figure in ("stability_collapse.png", "stability_pairing.png"):
        assert (out / figure).stat().st_size > 0


def test_stability_demo_reruns_are_byte_identical(tmp_path, capsys):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["stability-demo", "--out", str(out_a)]) == cli.EXIT_OK
    assert cli.main(["stability-demo", "--out", str(out_b)]) == cli.EXIT_OK
    capsys.readouterr()
    names = sorted(p.name for p in out_a.iterdir())
    assert names == sorted(p.name for p in out_b.iterdir())
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_stability_demo_vanishing_preset_is_consistent(tmp_path, capsys):
    out = tmp_path / "vanishing"
    code = cli.main(
        ["stability-demo", "--preset", "onshell-vanishing", "--out", str(out)]
    )
    assert code == cli.EXIT_OK
    capsys.readouterr()
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["summary"]["stability_verdict"] == "CONSISTENT"
    rows = _read_csv(out / "stability.csv")
    assert len(rows) == 1  # header only: no ladder rows exist
    assert not (out / "stability_collapse.png").exists()


def test_nonconvergence_exits_3(tmp_path, capsys):
    # n = 1 puts the regulator bump outside any certifiable strip
    config_path = _write(
        tmp_path,
        "run.yaml",
        f"mode: stability\nn_ladder: [1]\noutput: {{directory: {tmp_path / 'out'}}}\n",
    )
    code = cli.main(["stability-demo", "--config", config_path])
    assert code == cli.EXIT_NONCONVERGED
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "non-convergence"
    assert diag["type"] == "InsufficientNError"


def test_internal_error_exits_4(tmp_path, capsys, monkeypatch):
    def boom(config, *, workers=1):
        raise RuntimeError("simulated hardware fault")

    monkeypatch.setattr(cli, "run", boom)
    code = cli.main(["stability-demo", "--out", str(tmp_path / "out")])
    assert code == cli.EXIT_INTERNAL
    diag = json.loads(capsys.readouterr().err)
    assert diag["error"] == "internal"
    assert diag["type"] == "RuntimeError"


def test_convergence_report_writes_series(tmp_path, capsys):
    config_path = _write(
        tmp_path,
        "run.yaml",
        f"mode: stability\nn_ladder: [4, 16]\noutput: {{directory: {tmp_path / 'conv'}}}\n",
    )
    assert cli.main(["convergence-report", "--config", config_path]) == cli.EXIT_OK
    capsys.readouterr()
    rows = _read_csv(tmp_path / "conv" / "convergence.csv")
    assert rows[0] == ["series", "step", "value_re", "value_im", "error"]
    series = {r[0] for r in rows[1:]}
    assert series == {"kl_norm", "pairing"}
    steps = [r[1] for r in rows[1:] if r[0] == "kl_norm"]
    assert steps == ["4", "16"]
    payload = json.loads((tmp_path / "conv" / "convergence.json").read_text(encoding="utf-8"))
    assert len(payload["rows"]) == len(rows) - 1


def test_version_flag_exits_zero(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["--version"])
    assert excinfo.value.code == 0
    assert "shellcalc" in capsys.readouterr().out
