"""Power/bandwidth block: sum-of-ratios transmission-energy minimization.

The ratio objective sum_n p_n*d_n / G_n(p_n, B_n) is handled by the
parametric transform: auxiliary multipliers (nu, beta) are driven to the
root of the residual phi by damped Newton steps, and for fixed (nu, beta)
the convex inner problem is solved in closed form: a bisection on the
bandwidth-budget multiplier mu through the Lambert W relation, a
rate-floor branch for deadline-binding devices, and a greedy linear
program for the rest.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from fdmafl.lambertw import lambert_w0, lambert_wm1
from fdmafl.model import LN2, Device, data_rate

log = logging.getLogger(__name__)

MU_BRACKET_RTOL = 1e-12
RATE_FLOOR_SLOP = 1e-9


class Sp2Infeasible(ValueError):
    """Raised when no (p, B) satisfies the rate floors within the budget."""


@dataclass(frozen=True)
class NewtonParams:
    xi: float = 0.5
    eps: float = 0.01
    max_outer: int = 50
    armijo_max_j: int = 40
    phi_tol: float = 1e-8

    def __post_init__(self) -> None:
        if not (0 < self.xi < 1):
            raise ValueError("xi must be in (0, 1)")
        if not (0 < self.eps < 1):
            raise ValueError("eps must be in (0, 1)")
        if self.max_outer < 1 or self.armijo_max_j < 0:
            raise ValueError("iteration limits must be positive")


@dataclass
class IterationRecord:
    index: int
    phi_norm: float
    phi_after_step: float
    armijo_j: int
    mu: float


@dataclass
class Sp2State:
    power_w: np.ndarray
    bandwidth_hz: np.ndarray
    nu: np.ndarray
    beta: np.ndarray
    phi_norm: float
    converged: bool
    iterations: int
    trace: list[IterationRecord] = field(default_factory=list)


def compute_rate_floor(
    upload_bits: np.ndarray,
    cycles_per_round: np.ndarray,
    freq_hz: np.ndarray,
    round_deadline_s: float,
) -> np.ndarray:
    """r_min = d / (deadline - T_cmp); requires deadline > T_cmp for every device."""
    slack = round_deadline_s - cycles_per_round / freq_hz
    if np.any(slack <= 0):
        worst = int(np.argmin(slack))
        raise ValueError(
            f"device {worst}: computation time exceeds deadline {round_deadline_s:.6g} s"
        )
    floor = upload_bits / slack
    if not np.all(np.isfinite(floor)) or np.any(floor <= 0):
        raise ValueError("rate floor must be positive and finite")
    return floor


def update_multipliers(
    p: np.ndarray, b: np.ndarray, gains: np.ndarray, upload_bits: np.ndarray,
    noise_psd: float, w1: float, rg: float,
) -> tuple[np.ndarray, np.ndarray]:
    """nu = w1*R_g/G, beta = p*d/G; needs every rate positive."""
    g_rate = data_rate(p, b, gains, noise_psd)
    if np.any(g_rate <= 0):
        raise ValueError("update_multipliers needs G_n > 0 for all devices")
    return w1 * rg / g_rate, p * upload_bits / g_rate


def phi_residual(
    p: np.ndarray, b: np.ndarray, nu: np.ndarray, beta: np.ndarray,
    gains: np.ndarray, upload_bits: np.ndarray, noise_psd: float, w1: float, rg: float,
) -> np.ndarray:
    """Stacked residual [phi1; phi2] in R^(2N)."""
    g_rate = data_rate(p, b, gains, noise_psd)
    phi1 = -p * upload_bits + beta * g_rate
    phi2 = -w1 * rg + nu * g_rate
    return np.concatenate([phi1, phi2])


def phi_jacobian_diag(
    p: np.ndarray, b: np.ndarray, gains: np.ndarray, noise_psd: float
) -> np.ndarray:
    """Diagonal of both Jacobian blocks: the rates G_n, repeated twice."""
    g_rate = data_rate(p, b, gains, noise_psd)
    return np.concatenate([g_rate, g_rate])


def bandwidth_for_rate(
    p_w: float, gain: float, noise_psd: float, rate_bps: float
) -> float:
    """Smallest bandwidth with G(p, B) >= rate at fixed power.

    The rate grows monotonically in B toward the capacity limit
    g*p/(N0*ln2); returns inf when the target exceeds that limit.
    """
    cap = gain * p_w / (noise_psd * LN2)
    if rate_bps <= 0:
        return 0.0
    if rate_bps >= cap * (1 - 1e-12):
        return math.inf
    lo = rate_bps / math.log2(1.0 + gain * p_w / (noise_psd * rate_bps))
    hi = lo
    while data_rate(p_w, hi, gain, noise_psd) < rate_bps:
        hi *= 2.0
    while data_rate(p_w, lo, gain, noise_psd) > rate_bps:
        lo *= 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if data_rate(p_w, mid, gain, noise_psd) < rate_bps:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * hi:
            break
    return hi


def _fixed_power_bandwidth(
    p_w: np.ndarray, g: np.ndarray, noise_psd: float, rate_floor: np.ndarray
) -> np.ndarray:
    """Bandwidth with G(p, B) = floor at fixed power, inf past capacity.

    Substituting u = g*p/(N0*B) into B*log2(1+u) = r gives ln(1+u) = c*u
    with c = r*ln2*N0/(g*p); the nontrivial root lives on the secondary
    Lambert branch.
    """
    a = g * p_w / noise_psd
    c = rate_floor * LN2 / a
    ok = c < 1.0
    safe_c = np.where(ok, c, 0.5)
    v = -lambert_wm1(-safe_c * np.exp(-safe_c))
    u = v / safe_c - 1.0
    return np.where(ok & (u > 0), a / np.maximum(u, 1e-300), np.inf)


def _floor_bandwidth(
    slope: np.ndarray,
    p_min: np.ndarray,
    p_max: np.ndarray,
    g: np.ndarray,
    noise_psd: float,
    rate_floor: np.ndarray,
    b_lo: np.ndarray,
    b_hi: np.ndarray,
) -> np.ndarray:
    """Per-device smallest B with G(clip(slope*B), B) >= floor.

    ``slope`` is the power-per-bandwidth ratio of the stationarity path;
    ``b_lo`` and ``b_hi`` are the precomputed floor bandwidths at the power
    bounds. The clipped rate is monotone increasing in B, so the answer is
    whichever of three closed forms lands in its own clip region: power
    pinned low, power on the path, or power pinned high.
    """
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        lo_ok = np.isfinite(b_lo) & (
            np.nan_to_num(slope * b_lo, nan=np.inf) <= p_min * (1 + 1e-12)
        )

        path = np.isfinite(slope) & (slope > 0)
        lam = np.where(path, 1.0 + slope * g / noise_psd, 2.0)
        b_int = rate_floor / np.log2(lam)
        p_int = slope * b_int
        int_ok = path & (p_int >= p_min * (1 - 1e-12)) & (p_int <= p_max * (1 + 1e-12))

        bw = np.where(lo_ok, b_lo, np.where(int_ok, b_int, b_hi))
    if np.any(~np.isfinite(bw)):
        bad = int(np.flatnonzero(~np.isfinite(bw))[0])
        raise Sp2Infeasible(f"device {bad}: rate floor exceeds the link capacity")
    return bw


def energy_min_allocation(
    devices: tuple[Device, ...],
    rate_floor: np.ndarray,
    budget_b: float,
    noise_psd: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Exact minimizer of the total transmission energy under the floors.

    The per-device energy p*d/G(p, B) is strictly increasing in p at any
    fixed bandwidth (log(1+x) > x/(1+x)), so the optimal power is the
    smallest floor-achieving one. That collapses the problem to a separable
    convex bandwidth split, solved by waterfilling on the marginal energy.
    """
    g = np.array([dev.gain for dev in devices])
    d = np.array([dev.upload_bits for dev in devices])
    p_min = np.array([dev.p_min_w for dev in devices])
    p_max = np.array([dev.p_max_w for dev in devices])
    floor = np.maximum(np.asarray(rate_floor, dtype=float), 0.0)
    positive = floor > 0
    n = len(devices)

    b_req = np.where(
        positive, _fixed_power_bandwidth(p_max, g, noise_psd, np.maximum(floor, 1.0)), 0.0
    )
    if np.any(~np.isfinite(b_req)):
        bad = int(np.flatnonzero(~np.isfinite(b_req))[0])
        raise Sp2Infeasible(f"device {bad}: rate floor exceeds the link capacity")
    if float(np.sum(b_req)) > budget_b * (1 + 1e-12):
        raise Sp2Infeasible("minimum bandwidths exceed the budget")

    cap_min = g * p_min / (noise_psd * LN2)
    free_floor = positive & (floor < cap_min * (1 - 1e-12))
    b_free = np.where(
        free_floor, _fixed_power_bandwidth(p_min, g, noise_psd, np.maximum(floor, 1.0)), 0.0
    )
    b_free = np.where(positive & ~free_floor, np.inf, b_free)

    def marginal(b: np.ndarray) -> np.ndarray:
        """dE/dB; negative and increasing toward zero."""
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            x = g * p_min / (noise_psd * b)
            r = b * np.log1p(x) / LN2
            r_b = (np.log1p(x) - x / (1.0 + x)) / LN2
            grad_min = -p_min * d * r_b / r**2
            t = floor / b
            grad_floor = (d * noise_psd / (g * np.maximum(floor, 1e-300))) * (
                np.exp2(t) * (1.0 - LN2 * t) - 1.0
            )
            out = np.where(b >= b_free, grad_min, grad_floor)
        return np.where(b <= 0, -np.inf, out)

    def split(lam: float) -> np.ndarray:
        lo = b_req.copy()
        hi = np.full(n, budget_b)
        at_hi = marginal(hi) + lam <= 0
        at_lo = marginal(np.maximum(lo, 1e-300)) + lam >= 0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            low_side = marginal(mid) + lam <= 0
            lo = np.where(low_side, mid, lo)
            hi = np.where(low_side, hi, mid)
        b = np.where(at_hi, budget_b, np.where(at_lo, b_req, hi))
        return np.maximum(b, b_req)

    lam_hi = 1.0
    for _ in range(400):
        if float(np.sum(split(lam_hi))) <= budget_b:
            break
        lam_hi *= 4.0
    lam_lo = 0.0
    b = split(lam_hi)
    for _ in range(100):
        lam = 0.5 * (lam_lo + lam_hi)
        cand = split(lam)
        if float(np.sum(cand)) > budget_b:
            lam_lo = lam
        else:
            lam_hi = lam
            b = cand
    total = float(np.sum(b))
    if 0 < total < budget_b:
        b = b * (budget_b / total)

    with np.errstate(over="ignore"):
        p_need = np.where(
            positive, (noise_psd * b / g) * (np.exp2(floor / np.maximum(b, 1e-300)) - 1.0), 0.0
        )
    p = np.clip(np.maximum(p_need, p_min), p_min, p_max)
    rates = data_rate(p, b, g, noise_psd)
    if np.any(rates < floor * (1.0 - 1e-9)):
        bad = int(np.argmax(floor - rates))
        raise Sp2Infeasible(f"device {bad}: rate floor unreachable within the budget")
    return p, b


def solve_sp2_v2(
    nu: np.ndarray,
    beta: np.ndarray,
    rate_floor: np.ndarray,
    devices: tuple[Device, ...],
    budget_b: float,
    noise_psd: float,
    target_scale: float | None = None,
) -> tuple[np.ndarray, np.ndarray, float]:
    """KKT point of the convex inner problem for fixed (nu, beta).

    Returns (p, B, mu). The budget multiplier mu is bisected on the total
    bandwidth demand: each device demands the smallest bandwidth meeting its
    rate floor along the power-stationarity path implied by the Lambert W
    relation, with the power clipped to its box. Leftover budget at mu = 0
    goes to devices whose reduced bandwidth cost is negative.

    ``target_scale`` (w1 * R_g in the outer loop) enables a tie-break on the
    degenerate pour face: slack reaching a group of near-tied devices is
    split toward their multiplier-implied rates target_scale / nu instead of
    greedily, so the outer fixed point is reproducible by this solver.
    """
    n = len(devices)
    g = np.array([d.gain for d in devices])
    d_bits = np.array([d.upload_bits for d in devices])
    p_min = np.array([d.p_min_w for d in devices])
    p_max = np.array([d.p_max_w for d in devices])
    if np.any(nu <= 0) or np.any(beta <= 0):
        raise ValueError("nu and beta must be positive")
    if budget_b <= 0:
        raise ValueError("budget must be positive")
    if not np.all(np.isfinite(rate_floor)) or np.any(rate_floor <= 0):
        raise ValueError("rate floors must be positive and finite")

    j_n = nu * d_bits * noise_psd / g
    nb = nu * beta
    chi = beta * g / (noise_psd * d_bits * LN2)
    floor_t = rate_floor * (1.0 + 1e-12)
    cap_max = g * p_max / (noise_psd * LN2)
    if np.any(floor_t >= cap_max):
        bad = int(np.argmax(floor_t / cap_max))
        raise Sp2Infeasible(
            f"device {bad}: rate floor exceeds the maximum-power capacity"
        )

    def path_slope(mu: float) -> np.ndarray:
        z = (mu - j_n) / (math.e * j_n)
        w = lambert_w0(np.maximum(z, -1.0 / math.e))
        near_zero = np.abs(w) < 1e-12
        ratio = np.where(
            near_zero,
            math.e * j_n * LN2,  # limit of (mu - j)ln2 / W(z) as mu -> j
            (mu - j_n) * LN2 / np.where(near_zero, 1.0, w),
        )
        tau = np.maximum(ratio - nb, 0.0)
        lam = (nb + tau) * g / (noise_psd * d_bits * nu * LN2)
        slope = np.maximum(lam - 1.0, 0.0) * noise_psd / g
        # A flat path whose minimum-power capacity misses the floor needs
        # power above the stationarity value; jump straight to p_max.
        cap_here = g * np.where(slope > 0, p_max, p_min) / (noise_psd * LN2)
        return np.where(cap_here > floor_t, slope, np.inf), tau

    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        b_at_pmin = _fixed_power_bandwidth(p_min, g, noise_psd, floor_t)
        b_at_pmax = _fixed_power_bandwidth(p_max, g, noise_psd, floor_t)

    def demand(mu: float) -> tuple[np.ndarray, np.ndarray]:
        slope, tau = path_slope(mu)
        bw = _floor_bandwidth(
            slope, p_min, p_max, g, noise_psd, floor_t, b_at_pmin, b_at_pmax
        )
        return bw, tau

    bw, tau = demand(0.0)
    mu = 0.0
    if float(np.sum(bw)) > budget_b:
        if float(np.sum(b_at_pmax)) > budget_b:
            raise Sp2Infeasible("rate floors exceed the bandwidth budget at maximum power")
        lo_mu = 0.0
        hi_mu = float(np.max(j_n)) * 2.0 + 1e-300
        for _ in range(400):
            d_hi, _ = demand(hi_mu)
            if float(np.sum(d_hi)) <= budget_b:
                break
            hi_mu *= 2.0
        else:
            raise Sp2Infeasible("rate floors exceed the bandwidth budget at maximum power")
        for _ in range(70):
            mid = 0.5 * (lo_mu + hi_mu)
            d_mid, _ = demand(mid)
            if float(np.sum(d_mid)) <= budget_b:
                hi_mu = mid
            else:
                lo_mu = mid
        mu = hi_mu
        bw, tau = demand(mu)
    else:
        # Budget slack at mu = 0: spend it where the reduced cost of extra
        # bandwidth is negative, along each device's own stationarity path.
        k = nb / LN2 - noise_psd * d_bits * nu / g - nb * np.log2(np.maximum(chi, 1e-300))
        with np.errstate(invalid="ignore"):
            hi_bw = np.where(chi > 1.0, p_max * g / ((chi - 1.0) * noise_psd), 0.0)
        spare = budget_b - float(np.sum(bw))
        if target_scale is None:
            for i in sorted(range(n), key=lambda i: k[i]):
                if k[i] >= 0 or spare <= 0:
                    break
                if tau[i] > 0:
                    continue
                add = min(max(hi_bw[i] - bw[i], 0.0), spare)
                bw[i] += add
                spare -= add
        elif spare > 0:
            # Target-seeking pour: at the outer fixed point every device off
            # its floor sits at the rate target_scale / nu with zero reduced
            # cost, so give each unconstrained device bandwidth toward that
            # rate. This selection is continuous in the multipliers, which
            # the greedy (vertex) fill is not.
            slope0, _ = path_slope(0.0)
            want = np.zeros(n)
            for i in range(n):
                if tau[i] > 0:
                    continue
                p_eval = (
                    p_max[i]
                    if not np.isfinite(slope0[i])
                    else float(np.clip(slope0[i] * max(bw[i], 1.0), p_min[i], p_max[i]))
                )
                b_tgt = bandwidth_for_rate(p_eval, g[i], noise_psd, target_scale / nu[i])
                if not math.isfinite(b_tgt):
                    b_tgt = max(hi_bw[i], bw[i])
                want[i] = max(b_tgt - bw[i], 0.0)
            total_want = float(np.sum(want))
            if total_want > 0:
                bw += want * min(spare / total_want, 1.0)

    slope, tau = path_slope(mu)
    with np.errstate(invalid="ignore"):
        power = np.clip(slope * bw, p_min, p_max)
    power[~np.isfinite(power)] = p_max[~np.isfinite(power)]

    # Repair pass: power clamping may leave rates below their floors while
    # other devices hold surplus bandwidth. Give every short device exactly
    # its floor-restoring bandwidth and reclaim the overdraft from surplus
    # devices in proportion to what they can spare.
    rates = data_rate(power, bw, g, noise_psd)
    short = rates < rate_floor * (1.0 - RATE_FLOOR_SLOP)
    if np.any(short):
        b_need = np.array(
            [
                bandwidth_for_rate(power[i], g[i], noise_psd, rate_floor[i] * (1 + 1e-12))
                for i in range(n)
            ]
        )
        if np.any(~np.isfinite(b_need[short])):
            bad = int(np.flatnonzero(short & ~np.isfinite(b_need))[0])
            raise Sp2Infeasible(f"device {bad}: rate floor unreachable at clamped power")
        bw[short] = b_need[short]
        overdraft = float(np.sum(bw)) - budget_b
        if overdraft > 0:
            surplus = np.maximum(bw - b_need, 0.0)
            surplus[short] = 0.0
            pool = float(np.sum(surplus))
            if pool < overdraft * (1.0 - 1e-12):
                worst = sorted(np.flatnonzero(short), key=lambda i: -bw[i])[:3]
                raise Sp2Infeasible(
                    f"bandwidth budget cannot cover all rate floors; "
                    f"binding devices {list(map(int, worst))}"
                )
            bw -= surplus * min(overdraft / pool, 1.0)

    total = float(np.sum(bw))
    if total > budget_b:
        bw *= budget_b / total
    rates = data_rate(power, bw, g, noise_psd)
    if np.any(rates < rate_floor * (1.0 - RATE_FLOOR_SLOP)):
        raise Sp2Infeasible("bandwidth budget cannot cover all rate floors")
    return power, bw, mu


def solve_sp2(
    devices: tuple[Device, ...],
    rate_floor: np.ndarray,
    budget_b: float,
    w1: float,
    rg: float,
    init_p: np.ndarray,
    init_b: np.ndarray,
    noise_psd: float,
    params: NewtonParams = NewtonParams(),
) -> Sp2State:
    """Damped-Newton outer loop driving phi(beta, nu) to zero.

    Each iteration re-solves the inner problem for the current multipliers,
    then takes the largest damped Newton step satisfying the contraction
    rule ||phi_new|| <= (1 - eps*xi^j) ||phi||. The inner solver's greedy
    face selection gives exact surrogate minima but can cycle on degenerate
    faces; if that happens the loop is rerun with the continuous
    target-seeking selection and the result is checked against the direct
    convex solution.
    """
    if w1 <= 0:
        raise ValueError("solve_sp2 requires w1 > 0 (the caller skips it at w1 = 0)")
    g = np.array([d.gain for d in devices])
    d_bits = np.array([d.upload_bits for d in devices])
    init_p = np.asarray(init_p, dtype=float).copy()
    init_b = np.asarray(init_b, dtype=float).copy()
    init_rates = data_rate(init_p, init_b, g, noise_psd)
    if np.any(init_rates < rate_floor * (1.0 - RATE_FLOOR_SLOP)):
        raise Sp2Infeasible("initial point violates the rate floors")
    init_obj = float(np.sum(init_p * d_bits / init_rates))
    nu0, beta0 = update_multipliers(init_p, init_b, g, d_bits, noise_psd, w1, rg)

    # Absolute floor for the stopping rule: a warm start at the fixed point
    # has a near-zero initial residual that no relative test can improve on.
    res_scale = float(
        np.linalg.norm(np.concatenate([init_p * d_bits, np.full(len(devices), w1 * rg)]))
    )
    stop_at = lambda phi0: max(params.phi_tol * phi0, 1e-12 * res_scale)  # noqa: E731

    def newton_loop(target_scale):
        nu, beta = nu0.copy(), beta0.copy()
        converged = False
        trace = []
        p, b, mu = solve_sp2_v2(
            nu, beta, rate_floor, devices, budget_b, noise_psd, target_scale=target_scale
        )
        rates = data_rate(p, b, g, noise_psd)
        phi = np.concatenate([-p * d_bits + beta * rates, -w1 * rg + nu * rates])
        phi_norm = float(np.linalg.norm(phi))
        phi0 = phi_norm
        for i in range(params.max_outer):
            if phi_norm <= stop_at(phi0):
                trace.append(IterationRecord(i, phi_norm, phi_norm, -1, mu))
                converged = True
                break
            sigma1 = p * d_bits / rates - beta
            sigma2 = w1 * rg / rates - nu
            accepted = False
            # The residual is linear in the multipliers at a frozen
            # allocation, so a meaningful contraction test has to re-solve
            # the inner problem at each damped candidate before measuring
            # the residual there.
            for j in range(params.armijo_max_j + 1):
                step = params.xi**j
                cand_beta = beta + step * sigma1
                cand_nu = nu + step * sigma2
                try:
                    cand_p, cand_b, cand_mu = solve_sp2_v2(
                        cand_nu, cand_beta, rate_floor, devices, budget_b, noise_psd,
                        target_scale=target_scale,
                    )
                except Sp2Infeasible:
                    continue
                cand_rates = data_rate(cand_p, cand_b, g, noise_psd)
                cand = np.concatenate(
                    [
                        -cand_p * d_bits + cand_beta * cand_rates,
                        -w1 * rg + cand_nu * cand_rates,
                    ]
                )
                cand_norm = float(np.linalg.norm(cand))
                if cand_norm <= (1.0 - params.eps * step) * phi_norm:
                    trace.append(IterationRecord(i, phi_norm, cand_norm, j, cand_mu))
                    log.debug(
                        "sp2 iter=%d |phi|=%.3e j=%d mu=%.6e", i, phi_norm, j, cand_mu
                    )
                    beta, nu = cand_beta, cand_nu
                    p, b, mu, rates = cand_p, cand_b, cand_mu, cand_rates
                    phi_norm = cand_norm
                    accepted = True
                    break
            if not accepted:
                trace.append(
                    IterationRecord(i, phi_norm, phi_norm, params.armijo_max_j, mu)
                )
                break
        else:
            if phi_norm <= stop_at(phi0):
                converged = True
        return p, b, nu, beta, phi_norm, converged, trace

    p, b, nu, beta, phi_norm, converged, trace = newton_loop(None)
    used_fallback = False
    if not converged:
        p, b, nu, beta, phi_norm, converged, trace = newton_loop(w1 * rg)
        used_fallback = True

    # Keep the best of the parametric answer, the feasible warm start, and
    # (on the fallback path, whose fixed points are not guaranteed optimal)
    # the direct convex solution.
    final_obj = float(np.sum(p * d_bits / data_rate(p, b, g, noise_psd)))
    best_obj, best = final_obj, None
    if init_obj < best_obj:
        best_obj = init_obj
        best = (init_p, init_b)
    if used_fallback:
        try:
            exact_p, exact_b = energy_min_allocation(devices, rate_floor, budget_b, noise_psd)
            exact_obj = float(
                np.sum(exact_p * d_bits / data_rate(exact_p, exact_b, g, noise_psd))
            )
            if exact_obj < best_obj:
                best_obj = exact_obj
                best = (exact_p, exact_b)
        except Sp2Infeasible:
            pass
    if best is not None:
        p, b = best
        nu, beta = update_multipliers(p, b, g, d_bits, noise_psd, w1, rg)
        phi_norm = 0.0
        converged = True
    return Sp2State(
        power_w=p, bandwidth_hz=b, nu=nu, beta=beta,
        phi_norm=phi_norm, converged=converged, iterations=len(trace), trace=trace,
    )
