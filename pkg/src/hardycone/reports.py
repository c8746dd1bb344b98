"""Batch experiment runner: configs in, deterministic reports and curves out.

An experiment is one YAML document (schema in the README) naming a kind
(sandwich | condition | best-constant | polar | consistency | violation)
plus its parameters.  Running it produces a YAML report whose body is a
pure function of config and seed (wall time excluded), CSV curves with
17-significant-digit locale-independent numbers, and matplotlib figures
next to each curve.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from . import __version__
from .cone import random_decreasing, random_radial
from .conditions import (
    check_br,
    check_br_radial,
    check_br_variable,
    check_br_variable_radial,
    default_sweep,
    find_violation,
    violation_slope,
)
from .lab import (
    OperatorSpec,
    best_constant_search,
    equivalence_check,
    polar_reduce,
    theorem_consistency,
)
from .operators import sandwich_constants
from .quadrature import QuadratureSpec
from .weights import ExponentFunction, Weight, is_divergent

__all__ = [
    "ConfigError",
    "NumericFailure",
    "ExperimentConfig",
    "Curve",
    "Report",
    "run_experiment",
    "write_report",
    "emit_curves",
    "format_number",
]

KINDS = ("sandwich", "condition", "best-constant", "polar", "consistency", "violation")

CONDITION_NAMES = ("Br", "Br-radial", "variable", "variable-radial")


class ConfigError(ValueError):
    pass


class NumericFailure(RuntimeError):
    pass


def _require(record: dict, key: str, kind: str):
    if key not in record:
        raise ConfigError(f"experiment kind '{kind}' requires the field '{key}'")
    return record[key]


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    raw: dict

    @classmethod
    def from_dict(cls, record) -> "ExperimentConfig":
        if not isinstance(record, dict):
            raise ConfigError("config must be a mapping")
        kind = record.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
        normalized = _normalize(kind, record)
        return cls(kind, normalized)

    def to_dict(self) -> dict:
        return self.raw


def _parse_weight(record, kind: str) -> Weight:
    try:
        return Weight.from_dict(_require(record, "weight", kind))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid weight description: {exc}") from exc


def _parse_exponent(record, kind: str) -> ExponentFunction:
    try:
        return ExponentFunction.from_dict(_require(record, "exponent", kind))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid exponent description: {exc}") from exc


def _parse_operator(record, kind: str) -> OperatorSpec:
    try:
        return OperatorSpec.from_dict(_require(record, "operator", kind))
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"invalid operator description: {exc}") from exc


def _positive(value, name: str) -> float:
    value = float(value)
    if not (value > 0.0 and math.isfinite(value)):
        raise ConfigError(f"{name} must be positive and finite")
    return value


def _normalize(kind: str, record: dict) -> dict:
    """Validate and normalize a raw config mapping (pure; no computation)."""
    out = {
        "kind": kind,
        "seed": int(record.get("seed", 0)),
        "output": str(record.get("output", "report.yaml")),
    }
    tol = record.get("tolerances", {})
    out["tolerances"] = {
        "abs": _positive(tol.get("abs", 1e-12), "tolerances.abs"),
        "rel": _positive(tol.get("rel", 1e-10), "tolerances.rel"),
    }
    if "expectations" in record:
        if not isinstance(record["expectations"], dict):
            raise ConfigError("expectations must be a mapping")
        for key in record["expectations"]:
            if key not in _CHECKS:
                raise ConfigError(f"unknown expectation '{key}'")
        out["expectations"] = record["expectations"]

    if kind == "sandwich":
        op = _parse_operator(record, kind)
        if op.kind not in ("R", "I"):
            raise ConfigError("sandwich experiments compare R with T or I with H")
        out["operator"] = op.to_dict()
        if op.kind == "I":
            n = int(_require(record, "dimension", kind))
            if n < 1:
                raise ConfigError("dimension must be >= 1")
            out["dimension"] = n
        corpus = record.get("corpus", {})
        out["corpus"] = {
            "count": int(corpus.get("count", 50)),
            "max_pieces": int(corpus.get("max_pieces", 8)),
        }
        if out["corpus"]["count"] < 1 or out["corpus"]["max_pieces"] < 1:
            raise ConfigError("corpus count and max_pieces must be >= 1")
        out["points_per_case"] = int(record.get("points_per_case", 20))
    elif kind == "condition":
        name = _require(record, "condition", kind)
        if name not in CONDITION_NAMES:
            raise ConfigError(f"condition must be one of {CONDITION_NAMES}")
        out["condition"] = name
        w = _parse_weight(record, kind)
        out["weight"] = w.to_dict()
        radial = name.endswith("radial")
        if radial != w.is_radial:
            raise ConfigError(f"condition {name} needs a {'radial' if radial else 'half-line'} weight")
        if name.startswith("Br"):
            out["r"] = _positive(_require(record, "r", kind), "r")
        else:
            out["exponent"] = _parse_exponent(record, kind).to_dict()
        sweep = record.get("sweep", {})
        out["sweep"] = {
            "s_min": _positive(sweep.get("s_min", 1e-6), "sweep.s_min"),
            "s_max": _positive(sweep.get("s_max", 1e6), "sweep.s_max"),
            "per_decade": int(sweep.get("per_decade", 4)),
        }
        if out["sweep"]["s_min"] >= out["sweep"]["s_max"]:
            raise ConfigError("sweep.s_min must be below sweep.s_max")
    elif kind == "best-constant":
        out["operator"] = _parse_operator(record, kind).to_dict()
        out["weight"] = _parse_weight(record, kind).to_dict()
        out["exponent"] = _parse_exponent(record, kind).to_dict()
        out["budget"] = int(record.get("budget", 10000))
        if out["budget"] < 1:
            raise ConfigError("budget must be >= 1")
        search = record.get("search", {})
        out["search"] = {
            "max_pieces": int(search.get("max_pieces", 64)),
            "horizon": float(search.get("horizon", 1e4)),
        }
    elif kind == "polar":
        n = int(_require(record, "dimension", kind))
        if n < 1:
            raise ConfigError("dimension must be >= 1")
        out["dimension"] = n
        out["r"] = _positive(_require(record, "r", kind), "r")
        w = _parse_weight(record, kind)
        if not w.is_radial or w.dimension != n:
            raise ConfigError("polar experiments need a radial weight in the stated dimension")
        out["weight"] = w.to_dict()
        corpus = record.get("corpus", {})
        out["corpus"] = {
            "count": int(corpus.get("count", 20)),
            "max_pieces": int(corpus.get("max_pieces", 6)),
        }
    elif kind == "consistency":
        op = _parse_operator(record, kind)
        out["operator"] = op.to_dict()
        w = _parse_weight(record, kind)
        if op.radial != w.is_radial:
            raise ConfigError("operator and weight geometry must agree")
        out["weight"] = w.to_dict()
        out["exponent"] = _parse_exponent(record, kind).to_dict()
        out["budget"] = int(record.get("budget", 1000))
    elif kind == "violation":
        out["weight"] = _parse_weight(record, kind).to_dict()
        out["exponent"] = _parse_exponent(record, kind).to_dict()
        out["target_ratio"] = _positive(record.get("target_ratio", 1e6), "target_ratio")
        if out["target_ratio"] <= 1.0:
            raise ConfigError("target_ratio must exceed 1")
    return out


@dataclass(frozen=True)
class Curve:
    name: str
    header: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class Report:
    config: ExperimentConfig
    results: dict
    curves: tuple[Curve, ...]
    expectations: Optional[dict]
    wall_time_s: float
    seed: int

    @property
    def passed(self) -> bool:
        return self.expectations is None or self.expectations["passed"]

    def body(self) -> dict:
        doc = {
            "config": self.config.to_dict(),
            "results": self.results,
            "provenance": {
                "tool": "hardycone",
                "version": __version__,
                "seed": self.seed,
                "wall_time_s": round(self.wall_time_s, 6),
            },
        }
        if self.expectations is not None:
            doc["expectations"] = self.expectations
        return doc


def _clean(obj):
    """Make results YAML-safe and deterministic: plain floats, lists, strings."""
    if is_divergent(obj):
        return "DIVERGENT"
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return math.inf
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


# ----------------------------------------------------------------------------
# runners


def _run_sandwich(cfg: dict):
    op = OperatorSpec.from_dict(cfg["operator"])
    rng = np.random.default_rng(cfg["seed"])
    count = cfg["corpus"]["count"]
    max_pieces = cfg["corpus"]["max_pieces"]
    cst = (
        sandwich_constants("R-vs-T", op.alpha)
        if op.kind == "R"
        else sandwich_constants("I-vs-H", op.alpha, cfg["dimension"])
    )
    rows = []
    lo_all, hi_all = math.inf, -math.inf
    for case in range(count):
        pieces = int(rng.integers(1, max_pieces + 1))
        if op.kind == "R":
            element = random_decreasing(rng, pieces)
        else:
            element = random_radial(rng, cfg["dimension"], pieces)
        rep = equivalence_check(element, op.alpha, tol=math.inf)
        rows.append((case, op.alpha, rep.min_ratio, rep.max_ratio))
        lo_all = min(lo_all, rep.min_ratio)
        hi_all = max(hi_all, rep.max_ratio)
    results = {
        "cases": count,
        "lower_constant": cst.lower,
        "upper_constant": cst.upper,
        "min_ratio": lo_all,
        "max_ratio": hi_all,
    }
    curves = (Curve("cases", ("case", "alpha", "min_ratio", "max_ratio"), tuple(rows)),)
    return results, curves


def _run_condition(cfg: dict):
    name = cfg["condition"]
    w = Weight.from_dict(cfg["weight"])
    sweep = cfg["sweep"]
    grid = default_sweep(sweep["s_min"], sweep["s_max"], sweep["per_decade"])
    if name == "Br":
        report = check_br(w, cfg["r"], grid)
    elif name == "Br-radial":
        report = check_br_radial(w, cfg["r"], grid)
    else:
        p = ExponentFunction.from_dict(cfg["exponent"])
        if name == "variable":
            report = check_br_variable(w, p, grid, grid)
        else:
            report = check_br_variable_radial(w, p, grid, grid)
    rows = tuple(
        (row.r if row.r is not None else "", row.s, row.lhs, row.rhs,
         row.ratio if row.ratio is not None else "")
        for row in report.rows
    )
    results = {
        "condition": report.condition,
        "holds": report.holds,
        "constant": report.constant,
        "witness": report.witness,
        "analytic_constant": report.analytic_constant,
        "sweep": report.sweep,
    }
    curves = (Curve("sweep", ("r", "s", "lhs", "rhs", "ratio"), rows),)
    return results, curves


def _run_best_constant(cfg: dict):
    op = OperatorSpec.from_dict(cfg["operator"])
    w = Weight.from_dict(cfg["weight"])
    p = ExponentFunction.from_dict(cfg["exponent"])
    res = best_constant_search(
        op, p, w,
        budget=cfg["budget"],
        seed=cfg["seed"],
        max_pieces=cfg["search"]["max_pieces"],
        tail_horizon=cfg["search"]["horizon"],
    )
    results = {
        "best_ratio": res.best_ratio,
        "evaluations": res.evaluations,
        "tail_truncated": res.tail_truncated,
        "everywhere_divergent": res.everywhere_divergent,
        "argmax": res.argmax.to_dict() if res.argmax is not None else None,
    }
    curves = (Curve("trajectory", ("evaluations", "best_ratio"), res.trajectory),)
    return results, curves


def _run_polar(cfg: dict):
    n = cfg["dimension"]
    w = Weight.from_dict(cfg["weight"])
    rng = np.random.default_rng(cfg["seed"])
    spec = QuadratureSpec(abs_tol=cfg["tolerances"]["abs"], rel_tol=cfg["tolerances"]["rel"],
                          max_subdivisions=600)
    rows = []
    worst = 0.0
    for case in range(cfg["corpus"]["count"]):
        pieces = int(rng.integers(1, cfg["corpus"]["max_pieces"] + 1))
        g = random_radial(rng, n, pieces)
        pair = polar_reduce(g, w, cfg["r"], spec)
        if is_divergent(pair.lhs):
            raise NumericFailure(
                "polar reduction diverged; choose a weight making both sides finite"
            )
        rows.append((case, pair.lhs, pair.rhs_reduced, pair.relative_gap))
        worst = max(worst, pair.relative_gap)
    results = {"cases": len(rows), "max_relative_gap": worst, "exponent_r": cfg["r"]}
    curves = (Curve("cases", ("case", "lhs", "rhs_reduced", "relative_gap"), tuple(rows)),)
    return results, curves


def _run_consistency(cfg: dict):
    op = OperatorSpec.from_dict(cfg["operator"])
    w = Weight.from_dict(cfg["weight"])
    p = ExponentFunction.from_dict(cfg["exponent"])
    rep = theorem_consistency(op, p, w, budget=cfg["budget"], seed=cfg["seed"])
    results = {
        "condition_verdict": rep.condition_verdict,
        "characterization_verdict": rep.characterization_verdict,
        "empirical_verdict": rep.empirical_verdict,
        "agree": rep.agree,
        "p_constant": rep.p_constant,
        "p0": rep.p0,
        "condition_constant": rep.condition_report.constant,
        "best_at_budget": rep.best_at_budget,
        "best_final": rep.best_final,
        "blowup_threshold": rep.blowup_threshold,
    }
    curves = (
        Curve("trajectory", ("evaluations", "best_ratio"), rep.search.trajectory),
    )
    return results, curves


def _run_violation(cfg: dict):
    w = Weight.from_dict(cfg["weight"])
    p = ExponentFunction.from_dict(cfg["exponent"])
    out = find_violation(p, w, cfg["target_ratio"])
    results = {
        "status": out.status,
        "case": out.case,
        "r": out.r,
        "s": out.s,
        "ratio": out.ratio,
        "epsilon": out.epsilon,
        "target_ratio": out.target,
    }
    if out.found and len(out.samples) >= 2:
        results["slope"] = violation_slope(out)
    curves = (Curve("descent", ("s", "ratio"), out.samples),)
    return results, curves


_RUNNERS = {
    "sandwich": _run_sandwich,
    "condition": _run_condition,
    "best-constant": _run_best_constant,
    "polar": _run_polar,
    "consistency": _run_consistency,
    "violation": _run_violation,
}


# ----------------------------------------------------------------------------
# expectations

_CHECKS = {
    "holds": lambda res, v: res.get("holds") is v or res.get("holds") == v,
    "constant_le": lambda res, v: res.get("constant") is not None and res["constant"] <= v,
    "constant_ge": lambda res, v: res.get("constant") is not None and res["constant"] >= v,
    "max_ratio_le": lambda res, v: res.get("max_ratio", math.inf) <= v,
    "min_ratio_ge": lambda res, v: res.get("min_ratio", -math.inf) >= v,
    "best_ge": lambda res, v: res.get("best_ratio", -math.inf) >= v,
    "best_le": lambda res, v: res.get("best_ratio", math.inf) <= v,
    "max_relative_gap_le": lambda res, v: res.get("max_relative_gap", math.inf) <= v,
    "agree": lambda res, v: res.get("agree") == v,
    "found": lambda res, v: (res.get("status") == "witness") == v,
}


def _evaluate_expectations(expect: dict, results: dict) -> dict:
    evaluated = {}
    all_ok = True
    for key, wanted in expect.items():
        if key not in _CHECKS:
            raise ConfigError(f"unknown expectation '{key}'")
        ok = bool(_CHECKS[key](results, wanted))
        actual = {
            "holds": results.get("holds"),
            "constant_le": results.get("constant"),
            "constant_ge": results.get("constant"),
            "max_ratio_le": results.get("max_ratio"),
            "min_ratio_ge": results.get("min_ratio"),
            "best_ge": results.get("best_ratio"),
            "best_le": results.get("best_ratio"),
            "max_relative_gap_le": results.get("max_relative_gap"),
            "agree": results.get("agree"),
            "found": results.get("status"),
        }[key]
        evaluated[key] = {"expected": wanted, "actual": actual, "passed": ok}
        all_ok = all_ok and ok
    return {"checks": evaluated, "passed": all_ok}


# ----------------------------------------------------------------------------
# entry points


def run_experiment(config: ExperimentConfig) -> Report:
    start = time.perf_counter()
    results, curves = _RUNNERS[config.kind](config.raw)
    results = _clean(results)
    expectations = None
    if "expectations" in config.raw:
        expectations = _evaluate_expectations(config.raw["expectations"], results)
    return Report(
        config=config,
        results=results,
        curves=curves,
        expectations=expectations,
        wall_time_s=time.perf_counter() - start,
        seed=config.raw["seed"],
    )


def format_number(value) -> str:
    """Locale-independent, 17 significant digits; inf and DIVERGENT explicit."""
    if value == "" or value is None:
        return ""
    if is_divergent(value):
        return "inf"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return format(float(value), ".17g")


def emit_curves(report: Report, out_dir) -> list:
    """One CSV per curve: header row then numeric rows."""
    from pathlib import Path

    out = []
    base = Path(out_dir)
    base.mkdir(parents=True, exist_ok=True)
    for curve in report.curves:
        path = base / f"{curve.name}.csv"
        lines = [",".join(curve.header)]
        for row in curve.rows:
            lines.append(",".join(format_number(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        out.append(path)
    return out


def write_report(report: Report, path) -> None:
    from pathlib import Path

    body = _clean(report.body())
    text = yaml.safe_dump(body, sort_keys=True, allow_unicode=True, default_flow_style=False)
    Path(path).write_text(text, encoding="utf-8")


def load_config(path) -> ExperimentConfig:
    from pathlib import Path

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        record = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return ExperimentConfig.from_dict(record)
