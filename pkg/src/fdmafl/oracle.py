"""Brute-force grid-search oracles for small instances (N <= 3).

These deliberately share no code path with the solvers: plain grids over
power, bandwidth splits, frequencies and the round deadline, combined by
dynamic programming over the quantized bandwidth budget.
"""

from __future__ import annotations

import math

import numpy as np

from fdmafl.model import Scenario, data_rate


def sp1_grid_objective(
    scenario: Scenario,
    power_w: np.ndarray,
    bandwidth_hz: np.ndarray,
    n_points: int = 200,
) -> float:
    """Grid minimum of the frequency/deadline block objective for fixed (p, B)."""
    cfg = scenario.config
    w1, w2, rg = cfg.weight_energy, cfg.weight_time, cfg.global_rounds
    cycles = scenario.cycles_per_round
    rates = data_rate(power_w, bandwidth_hz, scenario.gain, cfg.noise_psd_w_per_hz)
    t_up = scenario.upload_bits / rates
    f_min, f_max = scenario.f_min, scenario.f_max

    t_lo = float(np.max(t_up + cycles / f_max))
    t_hi = float(np.max(t_up + cycles / f_min)) * 1.001
    t_grid = np.geomspace(t_lo, t_hi, n_points)
    best = math.inf
    for t in t_grid:
        total = w2 * rg * t
        for i in range(cfg.num_devices):
            f_grid = np.linspace(f_min[i], f_max[i], n_points)
            feas = cycles[i] / f_grid + t_up[i] <= t
            if not np.any(feas):
                total = math.inf
                break
            total += w1 * rg * cfg.kappa * float(np.min(f_grid[feas] ** 2)) * cycles[i]
        best = min(best, total)
    return best


def sp2_grid_objective(
    devices,
    rate_floor: np.ndarray,
    budget_b: float,
    noise_psd: float,
    n_points: int = 200,
) -> float:
    """Grid minimum of sum_n p_n d_n / G_n over power grids and budget splits."""
    n_dev = len(devices)
    if n_dev > 3:
        raise ValueError("grid oracle supports N <= 3")
    tables = []
    for i, dev in enumerate(devices):
        p_grid = np.linspace(dev.p_min_w, dev.p_max_w, n_points)
        b_grid = budget_b * np.arange(1, n_points + 1) / n_points
        rates = data_rate(
            p_grid[:, None], b_grid[None, :], dev.gain, noise_psd
        )
        cost = np.where(
            rates >= rate_floor[i], p_grid[:, None] * dev.upload_bits / rates, np.inf
        )
        tables.append(np.min(cost, axis=0))  # per bandwidth index
    return _combine_budget(tables, n_points)


def _combine_budget(tables: list[np.ndarray], n_points: int) -> float:
    """Min of summed per-device costs subject to sum of grid indices <= n_points.

    Each table is indexed by k-1 where the device uses budget*k/n_points.
    Tables may carry a trailing axis (e.g. deadline grid); the reduction is
    elementwise over it.
    """
    shaped = [t[:, None] if t.ndim == 1 else t for t in tables]
    n = n_points
    p1 = np.minimum.accumulate(shaped[0], axis=0)
    if len(shaped) == 1:
        out = p1[-1]
    elif len(shaped) == 2:
        c2 = shaped[1][0 : n - 1]
        out = np.min(c2 + p1[n - 2 :: -1], axis=0)
    else:
        t_axis = shaped[0].shape[1]
        q = np.full((n + 1, t_axis), np.inf)
        c2 = shaped[1]
        for k2 in range(1, n):
            q[k2 + 1 : n + 1] = np.minimum(q[k2 + 1 : n + 1], c2[k2 - 1][None, :] + p1[0 : n - k2])
        q = np.minimum.accumulate(q, axis=0)
        c3 = shaped[2]
        best = np.full(t_axis, np.inf)
        for k3 in range(1, n - 1):
            best = np.minimum(best, c3[k3 - 1] + q[n - k3])
        out = best
    if tables[0].ndim == 1:
        return float(out[0])
    return out


def full_grid_objective(scenario: Scenario, n_points: int = 200, t_points: int = 260) -> float:
    """Grid minimum of the full weighted objective over (p, B, f) and the deadline.

    Bandwidth splits respect the budget via DP over the quantized grid; a
    second pass refines the deadline axis around the coarse optimum.
    """
    cfg = scenario.config
    if cfg.num_devices > 3:
        raise ValueError("grid oracle supports N <= 3")
    budget = cfg.total_bandwidth_hz
    noise = cfg.noise_psd_w_per_hz
    cycles = scenario.cycles_per_round
    gains = scenario.gain
    d_bits = scenario.upload_bits

    t_lo = 0.0
    t_hi = 0.0
    for i, dev in enumerate(scenario.devices):
        best_rate = data_rate(dev.p_max_w, budget, gains[i], noise)
        worst_rate = data_rate(dev.p_min_w, budget / n_points, gains[i], noise)
        t_lo = max(t_lo, d_bits[i] / best_rate + cycles[i] / dev.f_max_hz)
        t_hi = max(t_hi, d_bits[i] / worst_rate + cycles[i] / dev.f_min_hz)
    t_grid = np.geomspace(t_lo * 0.999, t_hi * 1.001, t_points)

    best_val, best_idx = _grid_pass(scenario, t_grid, n_points)
    lo = t_grid[max(best_idx - 1, 0)]
    hi = t_grid[min(best_idx + 1, len(t_grid) - 1)]
    fine_grid = np.linspace(lo, hi, t_points)
    fine_val, _ = _grid_pass(scenario, fine_grid, n_points)
    return min(best_val, fine_val)


def _grid_pass(
    scenario: Scenario, t_grid: np.ndarray, n_points: int
) -> tuple[float, int]:
    cfg = scenario.config
    w1, w2, rg = cfg.weight_energy, cfg.weight_time, cfg.global_rounds
    budget = cfg.total_bandwidth_hz
    noise = cfg.noise_psd_w_per_hz
    cycles = scenario.cycles_per_round
    n = n_points
    t_axis = len(t_grid)

    tables = []
    for i, dev in enumerate(scenario.devices):
        p_grid = np.linspace(dev.p_min_w, dev.p_max_w, n)
        b_grid = budget * np.arange(1, n + 1) / n
        f_grid = np.linspace(dev.f_min_hz, dev.f_max_hz, n)
        rates = data_rate(p_grid[:, None], b_grid[None, :], dev.gain, noise)
        t_up = dev.upload_bits / rates
        e_trans = w1 * rg * p_grid[:, None] * t_up
        table = np.empty((n, t_axis))
        for ti, t in enumerate(t_grid):
            slack = t - t_up
            with np.errstate(divide="ignore"):
                req = np.where(slack > 0, cycles[i] / np.maximum(slack, 1e-300), np.inf)
            idx = np.searchsorted(f_grid, req, side="left")
            feasible = idx < n
            f_sel = f_grid[np.minimum(idx, n - 1)]
            e_cmp = w1 * rg * cfg.kappa * cycles[i] * f_sel**2
            cost = np.where(feasible, e_trans + e_cmp, np.inf)
            table[:, ti] = np.min(cost, axis=0)
        tables.append(table)

    combined = _combine_budget(tables, n)
    totals = combined + w2 * rg * t_grid
    best_idx = int(np.argmin(totals))
    return float(totals[best_idx]), best_idx
