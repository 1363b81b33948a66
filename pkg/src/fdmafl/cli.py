"""Command-line interface: solve one scenario, run sweeps, compare baselines,
or check the solver against the brute-force grid oracle.

Exit codes: 0 on success, 2 when the requested problem is infeasible, 1 on
any other error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from dataclasses import replace

from fdmafl.harness import (
    DEFAULT_WEIGHT_PAIRS,
    comparison_rows_to_csv,
    parse_config_text,
    parse_sweep_spec,
    run_comparison,
    run_sweep,
    sweep_results_to_csv,
)
from fdmafl.model import (
    SystemConfig,
    generate_scenario,
    scenario_from_text,
)
from fdmafl.oracle import full_grid_objective
from fdmafl.orchestrator import InfeasibleDeadline, SolveOptions, solve
from fdmafl.sp2 import Sp2Infeasible

log = logging.getLogger(__name__)

_CONFIG_FLOAT_KEYS = {
    "total_bandwidth_hz",
    "noise_psd_w_per_hz",
    "kappa",
    "area_radius_km",
    "weight_energy",
    "weight_time",
}
_CONFIG_INT_KEYS = {"global_rounds", "local_iters", "num_devices", "rng_seed"}
_GEN_FLOAT_KEYS = {
    "p_max_dbm",
    "p_min_dbm",
    "f_max_ghz",
    "f_min_ghz",
    "upload_kbits",
    "samples_per_device",
    "cycles_low",
    "cycles_high",
    "shadow_std_db",
}


def _load_scenario(args) -> "Scenario":
    if args.scenario is not None:
        with open(args.scenario) as fh:
            return scenario_from_text(fh.read())
    cfg_kwargs: dict = {}
    gen_kwargs: dict = {}
    if args.config is not None:
        with open(args.config) as fh:
            raw = parse_config_text(fh.read())
        for key, value in raw.items():
            if key in _CONFIG_FLOAT_KEYS:
                cfg_kwargs[key] = float(value)
            elif key in _CONFIG_INT_KEYS:
                cfg_kwargs[key] = int(value)
            elif key in _GEN_FLOAT_KEYS:
                gen_kwargs[key] = float(value)
            else:
                raise ValueError(f"unknown config field {key!r}")
    if args.seed is not None:
        cfg_kwargs["rng_seed"] = args.seed
    return generate_scenario(SystemConfig(**cfg_kwargs), **gen_kwargs)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _report_csv(report) -> str:
    import csv as _csv

    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(
        [
            "device",
            "power_w",
            "bandwidth_hz",
            "freq_hz",
            "round_deadline_s",
            "energy_total_j",
            "delay_total_s",
            "objective",
        ]
    )
    alloc, cost = report.allocation, report.cost
    for i in range(len(alloc.power_w)):
        writer.writerow(
            [
                str(i),
                f"{alloc.power_w[i]:.17g}",
                f"{alloc.bandwidth_hz[i]:.17g}",
                f"{alloc.freq_hz[i]:.17g}",
                f"{alloc.round_deadline_s:.17g}",
                f"{cost.total_energy_j:.17g}",
                f"{cost.total_delay_s:.17g}",
                f"{cost.objective:.17g}",
            ]
        )
    return buf.getvalue()


def _cmd_solve(args) -> int:
    scenario = _load_scenario(args)
    if args.total_time is not None:
        options = SolveOptions(mode="fixed_deadline", total_time_s=args.total_time)
    else:
        options = SolveOptions()
    report = solve(scenario, options)
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n", args.out)
    else:
        _emit(_report_csv(report), args.out)
    return 0


def _cmd_sweep(args) -> int:
    if args.config is None:
        raise ValueError("sweep requires --config <spec file>")
    with open(args.config) as fh:
        spec = parse_sweep_spec(fh.read())
    if args.seed is not None:
        spec = replace(spec, seed_base=args.seed)
    results = run_sweep(spec)
    if args.format == "json":
        payload = [
            {
                "axis": spec.sweep_axis,
                "axis_value": r.axis_value,
                "series": r.series,
                "mean_energy_j": r.mean_energy_j,
                "mean_delay_s": r.mean_delay_s,
                "mean_objective": r.mean_objective,
                "solver_iters_mean": r.solver_iters_mean,
                "failures": r.failures_count,
            }
            for r in results
        ]
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        _emit(sweep_results_to_csv(spec.sweep_axis, results), args.out)
    return 0


def _cmd_compare(args) -> int:
    rows = run_comparison(
        t_values=tuple(args.t_values),
        p_max_values=tuple(args.p_max_values),
        num_scenarios=args.scenarios,
        seed_base=args.seed if args.seed is not None else 0,
    )
    if args.format == "json":
        _emit(json.dumps(rows, sort_keys=True, indent=2) + "\n", args.out)
    else:
        _emit(comparison_rows_to_csv(rows), args.out)
    return 0


def _cmd_oracle(args) -> int:
    if args.n > 3:
        raise ValueError("the grid oracle supports at most 3 devices")
    seed0 = args.seed if args.seed is not None else 0
    lines = []
    worst = 0.0
    for trial in range(args.trials):
        cfg = SystemConfig(num_devices=args.n, rng_seed=seed0 + trial)
        scenario = generate_scenario(cfg)
        report = solve(scenario)
        reference = full_grid_objective(scenario)
        gap = (report.cost.objective - reference) / reference
        worst = max(worst, abs(gap))
        lines.append(
            f"seed={seed0 + trial} solver={report.cost.objective:.10g} "
            f"oracle={reference:.10g} gap={gap:+.5%}"
        )
    lines.append(f"max relative gap {worst:.5%} over {args.trials} trials")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fdmafl",
        description="Joint power, bandwidth, and CPU-frequency allocation "
        "for federated learning over an FDMA uplink.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=None, help="scenario seed")
        p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
        p.add_argument("--config", type=str, default=None, help="key=value config file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p_solve = sub.add_parser("solve", help="solve one scenario")
    common(p_solve)
    p_solve.add_argument("--scenario", type=str, default=None, help="scenario text file")
    p_solve.add_argument(
        "--total-time", type=float, default=None,
        help="fixed total completion time in seconds (switches to energy-only mode)",
    )
    p_solve.set_defaults(fn=_cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run a seeded sweep from a spec file")
    common(p_sweep)
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_cmp = sub.add_parser("compare", help="fixed-deadline baseline comparison")
    common(p_cmp)
    p_cmp.add_argument(
        "--t-values", type=float, nargs="+", default=[80.0, 100.0, 150.0]
    )
    p_cmp.add_argument("--p-max-values", type=float, nargs="+", default=[12.0])
    p_cmp.add_argument("--scenarios", type=int, default=20)
    p_cmp.set_defaults(fn=_cmd_compare)

    p_oracle = sub.add_parser("oracle", help="compare against the grid-search oracle")
    common(p_oracle)
    p_oracle.add_argument("--n", type=int, default=2, help="devices per instance (<= 3)")
    p_oracle.add_argument("--trials", type=int, default=10)
    p_oracle.set_defaults(fn=_cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (InfeasibleDeadline, Sp2Infeasible) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
