"""Experiment runner: configs, reports, curves, figures, exit codes."""

import math
from pathlib import Path

import pytest
import yaml

from hardycone.cli import main
from hardycone.reports import (
    ConfigError,
    ExperimentConfig,
    emit_curves,
    format_number,
    load_config,
    run_experiment,
)

CONDITION_OK = {
    "kind": "condition",
    "condition": "Br",
    "r": 2.0,
    "weight": {"dimension": None,
               "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 0.0}]},
    "expectations": {"holds": True, "constant_le": 1.0 + 1e-9},
}

BEST_CONSTANT = {
    "kind": "best-constant",
    "operator": {"kind": "T"},
    "exponent": {"pieces": [{"interval": [0.0, math.inf], "value": 2.0}]},
    "weight": {"dimension": None,
               "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 0.0}]},
    "budget": 40,
    "seed": 3,
}


def _write(tmp_path, record, name="exp.yaml"):
    path = tmp_path / name
    path.write_text(yaml.safe_dump(record), encoding="utf-8")
    return path


def test_condition_run_passes(tmp_path):
    cfg = _write(tmp_path, CONDITION_OK)
    out = tmp_path / "out"
    assert main(["--config", str(cfg), "--out", str(out), "--emit-csv"]) == 0
    assert (out / "report.yaml").exists()
    assert (out / "sweep.csv").exists()
    assert (out / "sweep.png").exists()


def test_expectation_mismatch_exits_4(tmp_path):
    bad = dict(CONDITION_OK)
    bad["weight"] = {"dimension": None,
                     "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 1.0}]}
    cfg = _write(tmp_path, bad)
    out = tmp_path / "out"
    assert main(["--config", str(cfg), "--out", str(out)]) == 4
    report = yaml.safe_load((out / "report.yaml").read_text())
    assert report["expectations"]["passed"] is False
    assert report["results"]["holds"] is False


def test_malformed_config_exits_2_without_output(tmp_path):
    cfg = tmp_path / "broken.yaml"
    cfg.write_text("kind: [unclosed", encoding="utf-8")
    out = tmp_path / "out"
    assert main(["--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()


def test_missing_field_exits_2(tmp_path):
    cfg = _write(tmp_path, {"kind": "condition", "condition": "Br", "r": 2.0})
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_unknown_expectation_rejected(tmp_path):
    bad = dict(CONDITION_OK)
    bad["expectations"] = {"no_such_check": 1}
    cfg = _write(tmp_path, bad)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_numeric_failure_exits_3(tmp_path):
    record = {
        "kind": "polar",
        "dimension": 3,
        "r": 2.0,
        # gamma >= rn - n makes both sides diverge: declared-finite experiment fails
        "weight": {"dimension": 3,
                   "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 4.0}]},
        "corpus": {"count": 2, "max_pieces": 3},
    }
    cfg = _write(tmp_path, record)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 3


def test_report_determinism(tmp_path):
    cfg = _write(tmp_path, BEST_CONSTANT)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["--config", str(cfg), "--out", str(out), "--emit-csv"]) == 0
        body = [
            line for line in (out / "report.yaml").read_text().splitlines()
            if "wall_time" not in line
        ]
        outs.append(("\n".join(body), (out / "trajectory.csv").read_bytes()))
    assert outs[0] == outs[1]


def test_seed_override_changes_results_echo(tmp_path):
    cfg = _write(tmp_path, BEST_CONSTANT)
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "--seed", "99"]) == 0
    report = yaml.safe_load((out / "report.yaml").read_text())
    assert report["config"]["seed"] == 99
    assert report["provenance"]["seed"] == 99


def test_budget_override_applies(tmp_path):
    cfg = _write(tmp_path, BEST_CONSTANT)
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "--budget", "25"]) == 0
    report = yaml.safe_load((out / "report.yaml").read_text())
    assert report["results"]["evaluations"] == 25


def test_budget_override_rejected_for_conditions(tmp_path):
    cfg = _write(tmp_path, CONDITION_OK)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o"), "--budget", "5"]) == 2


def test_config_echo_round_trips(tmp_path):
    cfg = _write(tmp_path, BEST_CONSTANT)
    config = load_config(cfg)
    report = run_experiment(config)
    echoed = ExperimentConfig.from_dict(report.body()["config"])
    assert echoed.raw == config.raw


def test_trajectory_csv_monotone(tmp_path):
    config = ExperimentConfig.from_dict(BEST_CONSTANT)
    report = run_experiment(config)
    paths = emit_curves(report, tmp_path)
    lines = Path(paths[0]).read_text().splitlines()
    assert lines[0] == "evaluations,best_ratio"
    best = [float(line.split(",")[1]) for line in lines[1:]]
    assert all(b > a for a, b in zip(best, best[1:]))


def test_sweep_csv_constant_ratio_for_power_weight(tmp_path):
    config = ExperimentConfig.from_dict(CONDITION_OK)
    report = run_experiment(config)
    paths = emit_curves(report, tmp_path)
    lines = Path(paths[0]).read_text().splitlines()
    ratios = {line.split(",")[4] for line in lines[1:]}
    floats = {float(r) for r in ratios}
    assert max(floats) - min(floats) <= 1e-12


def test_empty_curve_gives_header_only_csv(tmp_path):
    record = {
        "kind": "violation",
        "exponent": {"pieces": [{"interval": [0.0, math.inf], "value": 2.0}]},
        "weight": {"dimension": None,
                   "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 0.0}]},
        "target_ratio": 1e6,
    }
    report = run_experiment(ExperimentConfig.from_dict(record))
    assert report.results["status"] == "constant-exponent"
    paths = emit_curves(report, tmp_path)
    assert Path(paths[0]).read_text() == "s,ratio\n"


def test_format_number():
    assert format_number(1.0) == "1"
    assert format_number(math.pi) == "3.1415926535897931"
    assert format_number(math.inf) == "inf"
    assert format_number(7) == "7"
    assert format_number("") == ""


def test_kind_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"kind": "nope"})
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict([1, 2])
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(
            {"kind": "condition", "condition": "Br", "r": -1.0,
             "weight": CONDITION_OK["weight"]}
        )


def test_geometry_mismatch_in_config():
    record = {
        "kind": "condition",
        "condition": "Br-radial",
        "r": 2.0,
        "weight": CONDITION_OK["weight"],  # half-line weight for a radial condition
    }
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(record)


def test_violation_run_finds_witness(tmp_path):
    record = {
        "kind": "violation",
        "exponent": {"pieces": [{"interval": [0.0, 1.0], "value": 2.0},
                                 {"interval": [1.0, math.inf], "value": 3.0}]},
        "weight": {"dimension": None,
                   "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 0.0}]},
        "target_ratio": 1e6,
        "expectations": {"found": True},
    }
    cfg = _write(tmp_path, record)
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "--emit-csv"]) == 0
    report = yaml.safe_load((out / "report.yaml").read_text())
    assert report["results"]["slope"] == pytest.approx(-1.0, rel=0.05)
    assert (out / "descent.png").exists()


def test_sandwich_run(tmp_path):
    record = {
        "kind": "sandwich",
        "operator": {"kind": "R", "alpha": 0.5},
        "corpus": {"count": 12, "max_pieces": 5},
        "seed": 1,
        "expectations": {"min_ratio_ge": 1.0 - 1e-10,
                         "max_ratio_le": 3.0 * math.sqrt(2.0) + 1e-8},
    }
    cfg = _write(tmp_path, record)
    out = tmp_path / "o"
    assert main(["--config", str(cfg), "--out", str(out), "--emit-csv", "--no-plots"]) == 0
    assert not (out / "cases.png").exists()
    assert (out / "cases.csv").exists()


def test_consistency_run(tmp_path):
    record = {
        "kind": "consistency",
        "operator": {"kind": "T"},
        "exponent": {"pieces": [{"interval": [0.0, math.inf], "value": 2.0}]},
        "weight": {"dimension": None,
                   "pieces": [{"interval": [0.0, math.inf], "coefficient": 1.0, "exponent": 0.5}]},
        "budget": 500,
        "expectations": {"agree": True},
    }
    cfg = _write(tmp_path, record)
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
