"""Experiment harness: seeded sweeps and baseline comparison tables.

Every run is deterministic: scenario seeds derive from ``seed_base`` plus
the repetition index, results are sorted before writing, and floats are
printed with 17 significant digits, so identical inputs give identical
CSV bytes.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from fdmafl.model import Scenario, SystemConfig, evaluate, generate_scenario
from fdmafl.orchestrator import (
    InfeasibleDeadline,
    SolveOptions,
    baseline_comm_only,
    baseline_comp_only,
    baseline_random,
    solve,
)
from fdmafl.sp2 import Sp2Infeasible

log = logging.getLogger(__name__)

SWEEP_AXES = (
    "weight_pair",
    "p_max_dbm",
    "f_max_ghz",
    "num_devices",
    "radius_km",
    "local_iters",
)
DEFAULT_WEIGHT_PAIRS = ((0.9, 0.1), (0.7, 0.3), (0.5, 0.5), (0.3, 0.7), (0.1, 0.9))
SWEEP_COLUMNS = (
    "axis",
    "axis_value",
    "series",
    "mean_energy_j",
    "mean_delay_s",
    "mean_objective",
    "solver_iters_mean",
    "failures",
)
COMPARISON_COLUMNS = ("scheme", "total_time_s", "p_max_dbm", "mean_energy_j", "failures")

# Scenario-generation overrides accepted in config files and SweepSpec.
_GEN_KEYS = (
    "p_max_dbm",
    "p_min_dbm",
    "f_max_ghz",
    "f_min_ghz",
    "upload_kbits",
    "samples_per_device",
    "cycles_low",
    "cycles_high",
    "shadow_std_db",
)
_CONFIG_KEYS = (
    "total_bandwidth_hz",
    "noise_psd_w_per_hz",
    "kappa",
    "global_rounds",
    "local_iters",
    "num_devices",
    "area_radius_km",
)
_INT_CONFIG_KEYS = ("global_rounds", "local_iters", "num_devices")


@dataclass(frozen=True)
class SweepSpec:
    sweep_axis: str
    axis_values: tuple[float, ...]
    repetitions: int = 100
    seed_base: int = 0
    weight_pairs: tuple[tuple[float, float], ...] = DEFAULT_WEIGHT_PAIRS
    config_overrides: dict = field(default_factory=dict)
    gen_overrides: dict = field(default_factory=dict)
    # Device-count sweeps hold the total dataset size fixed and split it
    # evenly, so more devices means fewer samples each.
    total_samples: float = 25000.0

    def __post_init__(self) -> None:
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
        if not self.axis_values:
            raise ValueError("axis_values must be non-empty")
        if list(self.axis_values) != sorted(self.axis_values):
            raise ValueError("axis_values must be sorted ascending")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not self.weight_pairs:
            raise ValueError("weight_pairs must be non-empty")
        for key in self.config_overrides:
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config override {key!r}")
        for key in self.gen_overrides:
            if key not in _GEN_KEYS:
                raise ValueError(f"unknown scenario override {key!r}")


@dataclass(frozen=True)
class SweepResult:
    axis_value: float
    series: str
    weight_pair: tuple[float, float] | None
    mean_energy_j: float
    mean_delay_s: float
    mean_objective: float
    solver_iters_mean: float
    failures_count: int


def _base_config(spec: SweepSpec, seed: int) -> SystemConfig:
    overrides = dict(spec.config_overrides)
    for key in _INT_CONFIG_KEYS:
        if key in overrides:
            overrides[key] = int(overrides[key])
    return replace(SystemConfig(), rng_seed=seed, **overrides)


def _scenario_for(spec: SweepSpec, axis_value: float, seed: int) -> Scenario:
    cfg = _base_config(spec, seed)
    gen = dict(spec.gen_overrides)
    axis = spec.sweep_axis
    if axis == "p_max_dbm":
        gen["p_max_dbm"] = axis_value
    elif axis == "f_max_ghz":
        gen["f_max_ghz"] = axis_value
    elif axis == "num_devices":
        cfg = replace(cfg, num_devices=int(axis_value))
        gen.setdefault("samples_per_device", spec.total_samples / int(axis_value))
    elif axis == "radius_km":
        cfg = replace(cfg, area_radius_km=axis_value)
    elif axis == "local_iters":
        cfg = replace(cfg, local_iters=int(axis_value))
    return generate_scenario(cfg, **gen)


def _mean(values: list[float]) -> float:
    return float(np.mean(values)) if values else math.nan


def run_sweep(spec: SweepSpec, out_path: str | None = None) -> list[SweepResult]:
    """One row per (axis value, series); benchmark series ride along.

    Series are the weight pairs (or "joint" when the axis is the weight pair
    itself) plus the two random benchmarks, whose energy and delay do not
    depend on the weights; their objective column is written as 0.
    """
    results: list[SweepResult] = []
    for axis_value in spec.axis_values:
        if spec.sweep_axis == "weight_pair":
            pairs = [(axis_value, 1.0 - axis_value)]
            labels = ["joint"]
        else:
            pairs = list(spec.weight_pairs)
            labels = [f"w1={w1:g}" for w1, _ in pairs]
        per_series: dict[str, dict[str, list[float]]] = {
            lab: {"e": [], "d": [], "o": [], "it": [], "fail": []} for lab in labels
        }
        bench: dict[str, dict[str, list[float]]] = {
            "benchmark_a": {"e": [], "d": []},
            "benchmark_b": {"e": [], "d": []},
        }
        for rep in range(spec.repetitions):
            seed = spec.seed_base + rep
            scenario = _scenario_for(spec, axis_value, seed)
            for variant, lab in (("a", "benchmark_a"), ("b", "benchmark_b")):
                alloc = baseline_random(scenario, variant=variant)
                cost = evaluate(scenario, alloc)
                bench[lab]["e"].append(cost.total_energy_j)
                bench[lab]["d"].append(cost.total_delay_s)
            for (w1, w2), lab in zip(pairs, labels):
                sc = replace(scenario, config=scenario.config.with_weights(w1, w2))
                acc = per_series[lab]
                try:
                    report = solve(sc)
                except (Sp2Infeasible, InfeasibleDeadline, ValueError) as exc:
                    log.warning(
                        "sweep failure axis=%s value=%g seed=%d w1=%g: %s",
                        spec.sweep_axis, axis_value, seed, w1, exc,
                    )
                    acc["fail"].append(1.0)
                    continue
                acc["e"].append(report.cost.total_energy_j)
                acc["d"].append(report.cost.total_delay_s)
                acc["o"].append(report.cost.objective)
                acc["it"].append(float(report.outer_iters))
        for (w1, w2), lab in zip(pairs, labels):
            acc = per_series[lab]
            results.append(
                SweepResult(
                    axis_value=axis_value,
                    series=lab,
                    weight_pair=(w1, w2),
                    mean_energy_j=_mean(acc["e"]),
                    mean_delay_s=_mean(acc["d"]),
                    mean_objective=_mean(acc["o"]),
                    solver_iters_mean=_mean(acc["it"]),
                    failures_count=len(acc["fail"]),
                )
            )
        for lab in ("benchmark_a", "benchmark_b"):
            results.append(
                SweepResult(
                    axis_value=axis_value,
                    series=lab,
                    weight_pair=None,
                    mean_energy_j=_mean(bench[lab]["e"]),
                    mean_delay_s=_mean(bench[lab]["d"]),
                    mean_objective=0.0,
                    solver_iters_mean=0.0,
                    failures_count=0,
                )
            )
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(sweep_results_to_csv(spec.sweep_axis, results))
    return results


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def sweep_results_to_csv(axis: str, results: list[SweepResult]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for r in results:
        writer.writerow(
            [
                axis,
                _fmt(r.axis_value),
                r.series,
                _fmt(r.mean_energy_j),
                _fmt(r.mean_delay_s),
                _fmt(r.mean_objective),
                _fmt(r.solver_iters_mean),
                str(r.failures_count),
            ]
        )
    return buf.getvalue()


def run_comparison(
    t_values: tuple[float, ...] = (80.0, 100.0, 150.0),
    p_max_values: tuple[float, ...] = (12.0,),
    *,
    num_scenarios: int = 20,
    seed_base: int = 0,
    config_overrides: dict | None = None,
    out_path: str | None = None,
) -> list[dict]:
    """Fixed-completion-time comparison of the four schemes.

    For each scenario the joint scheme is solved at ascending T, warm
    starting each deadline from the previous solution, so relaxing T can
    never raise its energy. Infeasible (scenario, T) pairs are skipped and
    counted in the failures column.
    """
    t_values = tuple(sorted(t_values))
    overrides = dict(config_overrides or {})
    for key in _INT_CONFIG_KEYS:
        if key in overrides:
            overrides[key] = int(overrides[key])
    rows: list[dict] = []
    for p_max_dbm in p_max_values:
        cells: dict[tuple[str, float], list[float]] = {}
        fails: dict[tuple[str, float], int] = {}
        for scheme in ("joint", "comm_only", "comp_only", "random"):
            for t in t_values:
                cells[(scheme, t)] = []
                fails[(scheme, t)] = 0
        for rep in range(num_scenarios):
            cfg = replace(SystemConfig(), rng_seed=seed_base + rep, **overrides)
            scenario = generate_scenario(cfg, p_max_dbm=p_max_dbm)
            prev_alloc = None
            for t in t_values:
                try:
                    options = SolveOptions(
                        mode="fixed_deadline",
                        total_time_s=t,
                        init_allocation=prev_alloc,
                    )
                    joint = solve(scenario, options)
                    cells[("joint", t)].append(joint.cost.total_energy_j)
                    prev_alloc = joint.allocation
                except (Sp2Infeasible, InfeasibleDeadline, ValueError) as exc:
                    log.warning("joint skipped T=%g seed=%d: %s", t, cfg.rng_seed, exc)
                    fails[("joint", t)] += 1
                for scheme, fn in (
                    ("comm_only", baseline_comm_only),
                    ("comp_only", baseline_comp_only),
                ):
                    try:
                        cells[(scheme, t)].append(fn(scenario, t).cost.total_energy_j)
                    except (Sp2Infeasible, InfeasibleDeadline, ValueError) as exc:
                        log.warning(
                            "%s skipped T=%g seed=%d: %s", scheme, t, cfg.rng_seed, exc
                        )
                        fails[(scheme, t)] += 1
                alloc = baseline_random(scenario, variant="a")
                cells[("random", t)].append(evaluate(scenario, alloc).total_energy_j)
        for scheme in ("joint", "comm_only", "comp_only", "random"):
            for t in t_values:
                rows.append(
                    {
                        "scheme": scheme,
                        "total_time_s": t,
                        "p_max_dbm": p_max_dbm,
                        "mean_energy_j": _mean(cells[(scheme, t)]),
                        "failures": fails[(scheme, t)],
                    }
                )
    if out_path is not None:
        with open(out_path, "w", newline="") as fh:
            fh.write(comparison_rows_to_csv(rows))
    return rows


def comparison_rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARISON_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r["scheme"],
                _fmt(r["total_time_s"]),
                _fmt(r["p_max_dbm"]),
                _fmt(r["mean_energy_j"]),
                str(r["failures"]),
            ]
        )
    return buf.getvalue()


def parse_config_text(text: str) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ValueError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_floats(value: str, key: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in value.split(",") if x.strip())
    except ValueError as exc:
        raise ValueError(f"field {key!r}: {exc}") from None


def parse_sweep_spec(text: str) -> SweepSpec:
    """Build a SweepSpec from a key=value document.

    Recognized keys: axis, values, repetitions, seed_base, weight_pairs
    (semicolon-separated w1:w2 pairs), total_samples, plus any system or
    scenario override field.
    """
    raw = parse_config_text(text)
    if "axis" not in raw:
        raise ValueError("field 'axis' is required")
    if "values" not in raw:
        raise ValueError("field 'values' is required")
    kwargs: dict = {
        "sweep_axis": raw.pop("axis"),
        "axis_values": _parse_floats(raw.pop("values"), "values"),
    }
    if "repetitions" in raw:
        kwargs["repetitions"] = int(raw.pop("repetitions"))
    if "seed_base" in raw:
        kwargs["seed_base"] = int(raw.pop("seed_base"))
    if "total_samples" in raw:
        kwargs["total_samples"] = float(raw.pop("total_samples"))
    if "weight_pairs" in raw:
        pairs = []
        for chunk in raw.pop("weight_pairs").split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            if ":" not in chunk:
                raise ValueError(f"field 'weight_pairs': expected w1:w2, got {chunk!r}")
            w1, w2 = chunk.split(":", 1)
            pairs.append((float(w1), float(w2)))
        kwargs["weight_pairs"] = tuple(pairs)
    config_overrides: dict = {}
    gen_overrides: dict = {}
    for key, value in raw.items():
        if key in _CONFIG_KEYS:
            config_overrides[key] = float(value)
        elif key in _GEN_KEYS:
            gen_overrides[key] = float(value)
        else:
            raise ValueError(f"unknown field {key!r}")
    kwargs["config_overrides"] = config_overrides
    kwargs["gen_overrides"] = gen_overrides
    return SweepSpec(**kwargs)
