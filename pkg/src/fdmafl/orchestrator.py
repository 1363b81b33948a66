"""Alternating optimization of the frequency/deadline and power/bandwidth blocks.

Weighted mode alternates the two block solvers until the solution stops
moving. Fixed-deadline mode pins the per-round deadline to T/R_g, treats
the energy weight as 1 inside the power/bandwidth block, and (optionally)
also continues the alternation from the communication-only baseline's
solution, keeping whichever end point has lower energy; block descent is
monotone, so that end point can never be worse than the baseline itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from fdmafl.model import (
    Allocation,
    CostBreakdown,
    Scenario,
    check_feasibility,
    data_rate,
    evaluate,
    uplink_time,
    watts_to_dbm,
)
from fdmafl.sp1 import solve_sp1
from fdmafl.sp2 import (
    NewtonParams,
    Sp2Infeasible,
    bandwidth_for_rate,
    compute_rate_floor,
    solve_sp2,
)


class InfeasibleDeadline(ValueError):
    """The requested total completion time admits no feasible allocation."""


@dataclass(frozen=True)
class SolveOptions:
    max_outer_k: int = 20
    sol_tol_eps0: float = 1e-5
    mode: str = "weighted"  # "weighted" | "fixed_deadline"
    total_time_s: float | None = None  # required in fixed_deadline mode
    newton: NewtonParams = NewtonParams()
    multi_start: bool = True
    init_allocation: Allocation | None = None

    def __post_init__(self) -> None:
        if self.max_outer_k < 1:
            raise ValueError("max_outer_k must be >= 1")
        if self.sol_tol_eps0 <= 0:
            raise ValueError("sol_tol_eps0 must be > 0")
        if self.mode not in ("weighted", "fixed_deadline"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "fixed_deadline" and self.total_time_s is None:
            raise ValueError("fixed_deadline mode needs total_time_s")


@dataclass
class SolveReport:
    allocation: Allocation
    cost: CostBreakdown
    outer_iters: int
    objective_trace: list[float]
    converged: bool

    def to_dict(self) -> dict:
        return {
            "power_w": [float(x) for x in self.allocation.power_w],
            "bandwidth_hz": [float(x) for x in self.allocation.bandwidth_hz],
            "freq_hz": [float(x) for x in self.allocation.freq_hz],
            "round_deadline_s": float(self.allocation.round_deadline_s),
            "energy_total_j": self.cost.total_energy_j,
            "energy_trans_j": self.cost.energy_trans_total_j,
            "energy_cmp_j": self.cost.energy_cmp_total_j,
            "delay_total_s": self.cost.total_delay_s,
            "objective": self.cost.objective,
            "outer_iters": self.outer_iters,
            "objective_trace": self.objective_trace,
            "converged": self.converged,
        }


def _default_init(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    n = scenario.config.num_devices
    return scenario.p_max.copy(), np.full(n, scenario.config.total_bandwidth_hz / (2 * n))


def _trace_objective(
    scenario: Scenario, p, b, f, deadline: float, w1: float, w2: float
) -> float:
    cost = evaluate(scenario, Allocation(p, b, f, deadline))
    return w1 * cost.total_energy_j + w2 * scenario.config.global_rounds * deadline


def _alternate(
    scenario: Scenario,
    p: np.ndarray,
    b: np.ndarray,
    options: SolveOptions,
    fixed_round_deadline: float | None,
) -> tuple[Allocation, list[float], int, bool]:
    cfg = scenario.config
    if fixed_round_deadline is None:
        w1, w2 = cfg.weight_energy, cfg.weight_time
    else:
        w1, w2 = 1.0, 0.0
    p = np.asarray(p, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    trace: list[float] = []
    prev = None
    converged = False
    freq = scenario.f_max.copy()
    deadline = fixed_round_deadline or 0.0
    iters = 0
    for _ in range(options.max_outer_k):
        iters += 1
        sol = solve_sp1(scenario, p, b, fixed_deadline_s=fixed_round_deadline)
        freq, deadline = sol.freq_hz, sol.round_deadline_s
        if w1 > 0:
            floors = compute_rate_floor(
                scenario.upload_bits, scenario.cycles_per_round, freq, deadline
            )
            state = solve_sp2(
                scenario.devices, floors, cfg.total_bandwidth_hz, w1, cfg.global_rounds,
                p, b, cfg.noise_psd_w_per_hz, options.newton,
            )
            p, b = state.power_w, state.bandwidth_hz
        trace.append(_trace_objective(scenario, p, b, freq, deadline, w1, w2))
        vec = np.concatenate([p, b, freq])
        if prev is not None:
            delta = np.max(np.abs(vec - prev) / np.maximum(np.abs(prev), 1e-12))
            if delta <= options.sol_tol_eps0:
                converged = True
                break
        prev = vec
    return Allocation(p, b, freq, deadline), trace, iters, converged


def _delay_waterfill(scenario: Scenario) -> Allocation:
    """Pure delay minimization (w1 = 0): full power, fastest CPUs, and a
    bandwidth split that equalizes per-device round times."""
    cfg = scenario.config
    noise = cfg.noise_psd_w_per_hz
    g = scenario.gain
    d = scenario.upload_bits
    p = scenario.p_max.copy()
    f = scenario.f_max.copy()
    t_cmp = scenario.cycles_per_round / f
    cap = g * p / (noise * math.log(2.0))

    def needed(t: float) -> float:
        total = 0.0
        for i in range(cfg.num_devices):
            total += bandwidth_for_rate(p[i], g[i], noise, d[i] / (t - t_cmp[i]))
        return total

    t_lo = float(np.max(t_cmp + d / cap)) * (1 + 1e-9)
    t_hi = t_lo * 2.0
    for _ in range(200):
        if needed(t_hi) <= cfg.total_bandwidth_hz:
            break
        t_hi *= 2.0
    lo, hi = t_lo, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if needed(mid) > cfg.total_bandwidth_hz:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi:
            break
    bw = np.array(
        [bandwidth_for_rate(p[i], g[i], noise, d[i] / (hi - t_cmp[i])) for i in range(cfg.num_devices)]
    )
    rates = data_rate(p, bw, g, noise)
    deadline = float(np.max(t_cmp + uplink_time(d, rates)))
    return Allocation(p, bw, f, deadline)


def check_deadline_feasible(scenario: Scenario, total_time_s: float) -> None:
    """Raise InfeasibleDeadline unless T admits a feasible point from the
    standard initialization (p_max, B/(2N), f_max)."""
    cfg = scenario.config
    round_deadline = total_time_s / cfg.global_rounds
    p, b = _default_init(scenario)
    rates = data_rate(p, b, scenario.gain, cfg.noise_psd_w_per_hz)
    t_up = uplink_time(scenario.upload_bits, rates)
    floor_time = t_up + scenario.cycles_per_round / scenario.f_max
    worst = int(np.argmax(floor_time))
    if not np.all(floor_time < round_deadline):
        raise InfeasibleDeadline(
            f"total time {total_time_s:.6g} s infeasible: device {worst} needs at least "
            f"{float(floor_time[worst]) * cfg.global_rounds:.6g} s"
        )


def solve(scenario: Scenario, options: SolveOptions = SolveOptions()) -> SolveReport:
    """Run the alternating resource allocation algorithm."""
    cfg = scenario.config
    if options.mode == "fixed_deadline":
        check_deadline_feasible(scenario, options.total_time_s)
        round_deadline = options.total_time_s / cfg.global_rounds
        starts: list[tuple[np.ndarray, np.ndarray]] = [_default_init(scenario)]
        if options.multi_start:
            try:
                comm = baseline_comm_only(scenario, options.total_time_s)
                starts.append((comm.allocation.power_w, comm.allocation.bandwidth_hz))
            except (InfeasibleDeadline, Sp2Infeasible, ValueError):
                pass
        if options.init_allocation is not None:
            starts.append(
                (options.init_allocation.power_w, options.init_allocation.bandwidth_hz)
            )
        best = None
        for p0, b0 in starts:
            try:
                alloc, trace, iters, conv = _alternate(
                    scenario, p0, b0, options, round_deadline
                )
            except Sp2Infeasible:
                continue
            if best is None or trace[-1] < best[1][-1]:
                best = (alloc, trace, iters, conv)
        if best is None:
            raise InfeasibleDeadline(
                f"no feasible allocation found for total time {options.total_time_s:.6g} s"
            )
        alloc, trace, iters, conv = best
    elif cfg.weight_energy == 0.0:
        alloc = _delay_waterfill(scenario)
        cost0 = evaluate(scenario, alloc)
        trace = [cfg.weight_time * cost0.total_delay_s]
        iters, conv = 1, True
    else:
        p0, b0 = _default_init(scenario)
        alloc, trace, iters, conv = _alternate(scenario, p0, b0, options, None)
    cost = evaluate(scenario, alloc)
    return SolveReport(
        allocation=alloc, cost=cost, outer_iters=iters, objective_trace=trace, converged=conv
    )


def baseline_random(scenario: Scenario, variant: str) -> Allocation:
    """Benchmark allocations: variant 'a' randomizes CPU frequency at full
    power, variant 'b' randomizes transmit power (in dBm) at full frequency;
    both split the bandwidth evenly."""
    cfg = scenario.config
    n = cfg.num_devices
    if variant not in ("a", "b"):
        raise ValueError("variant must be 'a' or 'b'")
    rng = np.random.default_rng([cfg.rng_seed, 0xB0 if variant == "a" else 0xB1])
    bw = np.full(n, cfg.total_bandwidth_hz / n)
    if variant == "a":
        freq = rng.uniform(scenario.f_min, scenario.f_max)
        p = scenario.p_max.copy()
    else:
        dbm_lo = np.array([watts_to_dbm(x) for x in scenario.p_min])
        dbm_hi = np.array([watts_to_dbm(x) for x in scenario.p_max])
        p = np.array([1e-3 * 10.0 ** (x / 10.0) for x in rng.uniform(dbm_lo, dbm_hi)])
        freq = scenario.f_max.copy()
    rates = data_rate(p, bw, scenario.gain, cfg.noise_psd_w_per_hz)
    t_up = uplink_time(scenario.upload_bits, rates)
    deadline = float(np.max(scenario.cycles_per_round / freq + t_up))
    return Allocation(p, bw, freq, deadline)


def baseline_comm_only(scenario: Scenario, total_time_s: float) -> SolveReport:
    """Fix every CPU at the uniform-slack frequency and optimize (p, B) only."""
    cfg = scenario.config
    check_deadline_feasible(scenario, total_time_s)
    round_deadline = total_time_s / cfg.global_rounds
    p0, b0 = _default_init(scenario)
    rates0 = data_rate(p0, b0, scenario.gain, cfg.noise_psd_w_per_hz)
    max_t_up = float(np.max(uplink_time(scenario.upload_bits, rates0)))
    if round_deadline <= max_t_up:
        raise InfeasibleDeadline(
            f"total time {total_time_s:.6g} s leaves no computation slack"
        )
    freq = scenario.cycles_per_round / (round_deadline - max_t_up)
    if np.any(freq > scenario.f_max * (1 + 1e-9)):
        worst = int(np.argmax(freq / scenario.f_max))
        raise InfeasibleDeadline(
            f"fixed-frequency rule needs {freq[worst]:.6g} Hz on device {worst}"
        )
    freq = np.clip(freq, scenario.f_min, scenario.f_max)
    floors = compute_rate_floor(
        scenario.upload_bits, scenario.cycles_per_round, freq, round_deadline
    )
    state = solve_sp2(
        scenario.devices, floors, cfg.total_bandwidth_hz, 1.0, cfg.global_rounds,
        p0, b0, cfg.noise_psd_w_per_hz,
    )
    alloc = Allocation(state.power_w, state.bandwidth_hz, freq, round_deadline)
    cost = evaluate(scenario, alloc)
    return SolveReport(
        allocation=alloc, cost=cost, outer_iters=state.iterations,
        objective_trace=[cost.total_energy_j], converged=state.converged,
    )


def baseline_comp_only(scenario: Scenario, total_time_s: float) -> SolveReport:
    """Fix (p, B) at the standard initialization and optimize frequency only."""
    cfg = scenario.config
    check_deadline_feasible(scenario, total_time_s)
    round_deadline = total_time_s / cfg.global_rounds
    p0, b0 = _default_init(scenario)
    sol = solve_sp1(scenario, p0, b0, fixed_deadline_s=round_deadline)
    alloc = Allocation(p0, b0, sol.freq_hz, round_deadline)
    cost = evaluate(scenario, alloc)
    return SolveReport(
        allocation=alloc, cost=cost, outer_iters=1,
        objective_trace=[cost.total_energy_j], converged=True,
    )


def assert_feasible(scenario: Scenario, allocation: Allocation) -> None:
    violations = check_feasibility(scenario, allocation)
    if violations:
        raise AssertionError("; ".join(violations))
