"""Frequency/deadline block: computation energy vs. round deadline trade-off.

Given fixed (p, B) the problem is convex. For a fixed deadline the optimal
frequency of each device is the smallest feasible one (computation energy
grows with f), so the problem reduces to a 1-D convex search over the
deadline, solved by bisection on the subgradient. Multipliers are recovered
from the stationarity condition f* = (lambda / (2*w1*R_g*kappa))^(1/3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fdmafl.model import Scenario, data_rate, uplink_time

DEADLINE_BISECT_RTOL = 1e-9
ACTIVE_LAMBDA_TOL = 1e-12


@dataclass(frozen=True)
class Sp1Solution:
    freq_hz: np.ndarray
    round_deadline_s: float
    multipliers: np.ndarray


def required_frequency(
    device, deadline_s: float, uplink_time_s: float, local_iters: int
) -> float:
    """Smallest CPU frequency meeting the deadline; inf if the deadline is
    already consumed by the upload."""
    slack = deadline_s - uplink_time_s
    if slack <= 0:
        return math.inf
    return local_iters * device.cycles_per_local_iter / slack


def _clamped_freq(cycles: np.ndarray, t_up: np.ndarray, deadline: float,
                  f_min: np.ndarray, f_max: np.ndarray) -> np.ndarray:
    slack = deadline - t_up
    with np.errstate(divide="ignore"):
        req = np.where(slack > 0, cycles / np.maximum(slack, 1e-300), np.inf)
    return np.clip(req, f_min, f_max)


def solve_sp1(
    scenario: Scenario,
    power_w: np.ndarray,
    bandwidth_hz: np.ndarray,
    *,
    fixed_deadline_s: float | None = None,
) -> Sp1Solution:
    """Optimal (f, deadline) for fixed (p, B).

    ``fixed_deadline_s`` switches to the externally imposed deadline mode:
    each frequency is the clamped required frequency (energy-minimal
    feasible choice) and no deadline search happens.
    """
    cfg = scenario.config
    w1, w2 = cfg.weight_energy, cfg.weight_time
    rg, kappa = cfg.global_rounds, cfg.kappa
    cycles = scenario.cycles_per_round  # R_l * c_n * D_n
    f_min, f_max = scenario.f_min, scenario.f_max

    rates = data_rate(power_w, bandwidth_hz, scenario.gain, cfg.noise_psd_w_per_hz)
    t_up = np.atleast_1d(uplink_time(scenario.upload_bits, rates))
    if not np.all(np.isfinite(t_up)):
        raise ValueError("(p, B) gives a zero rate; subproblem 1 needs finite upload times")

    if fixed_deadline_s is not None:
        slack = fixed_deadline_s - t_up
        if np.any(slack <= 0):
            worst = int(np.argmin(slack))
            raise ValueError(
                f"deadline {fixed_deadline_s:.6g} s infeasible: device {worst} uploads "
                f"for {t_up[worst]:.6g} s"
            )
        req = cycles / slack
        if np.any(req > f_max * (1 + 1e-9)):
            worst = int(np.argmax(req / f_max))
            raise ValueError(
                f"deadline {fixed_deadline_s:.6g} s infeasible: device {worst} needs "
                f"{req[worst]:.6g} Hz > f_max {f_max[worst]:.6g} Hz"
            )
        freq = np.clip(req, f_min, f_max)
        lam = 2.0 * w1 * rg * kappa * freq**3
        lam[req < f_min] = 0.0
        return Sp1Solution(freq_hz=freq, round_deadline_s=fixed_deadline_s, multipliers=lam)

    t_lb = float(np.max(t_up + cycles / f_max))
    t_hi = float(np.max(t_up + cycles / f_min))

    if w1 == 0.0:
        # Pure delay minimization: tightest deadline, frequencies pinned by it.
        deadline = t_lb
        freq = _clamped_freq(cycles, t_up, deadline, f_min, f_max)
        lam = _recover_multipliers(freq, cycles, t_up, deadline, f_min, w1, w2, rg, kappa)
        return Sp1Solution(freq_hz=freq, round_deadline_s=deadline, multipliers=lam)

    if w2 == 0.0:
        # Energy-only: the deadline is free, every device idles at f_min.
        freq = f_min.copy()
        deadline = float(np.max(t_up + cycles / freq))
        return Sp1Solution(
            freq_hz=freq, round_deadline_s=deadline, multipliers=np.zeros_like(freq)
        )

    def subgradient(deadline: float) -> float:
        # d/dT of the reduced objective; devices resting at f_min contribute 0.
        slack = deadline - t_up
        req = cycles / np.maximum(slack, 1e-300)
        active = req > f_min
        f_act = np.clip(req[active], f_min[active], f_max[active])
        return rg * (w2 - 2.0 * w1 * kappa * float(np.sum(f_act**3)))

    if subgradient(t_lb) >= 0:
        deadline = t_lb
    else:
        lo, hi = t_lb, t_hi
        while hi - lo > DEADLINE_BISECT_RTOL * hi:
            mid = 0.5 * (lo + hi)
            if subgradient(mid) < 0:
                lo = mid
            else:
                hi = mid
        deadline = 0.5 * (lo + hi)

    freq = _clamped_freq(cycles, t_up, deadline, f_min, f_max)
    lam = _recover_multipliers(freq, cycles, t_up, deadline, f_min, w1, w2, rg, kappa)
    return Sp1Solution(freq_hz=freq, round_deadline_s=deadline, multipliers=lam)


def _recover_multipliers(
    freq: np.ndarray,
    cycles: np.ndarray,
    t_up: np.ndarray,
    deadline: float,
    f_min: np.ndarray,
    w1: float,
    w2: float,
    rg: float,
    kappa: float,
) -> np.ndarray:
    slack = deadline - t_up
    req = cycles / np.maximum(slack, 1e-300)
    binding = req >= f_min * (1 - 1e-12)
    if w1 == 0.0:
        # Degenerate dual: split the stationarity mass over binding devices.
        lam = np.zeros_like(freq)
        if np.any(binding):
            lam[binding] = w2 * rg / int(np.sum(binding))
        return lam
    lam = np.where(binding, 2.0 * w1 * rg * kappa * freq**3, 0.0)
    total = float(np.sum(lam))
    target = w2 * rg
    if total > 0 and abs(total - target) > 1e-9 * max(target, total):
        # A device sitting exactly at the f_min kink owns the residual mass;
        # shrink its multiplier so stationarity in the deadline holds.
        at_kink = binding & (np.abs(req - f_min) <= 1e-6 * f_min)
        if np.any(at_kink) and total > target:
            excess = total - target
            for i in np.flatnonzero(at_kink):
                cut = min(lam[i], excess)
                lam[i] -= cut
                excess -= cut
                if excess <= 0:
                    break
    return lam
