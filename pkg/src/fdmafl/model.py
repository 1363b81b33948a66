"""Physical system model: devices, channels, cost accounting and feasibility.

All quantities are SI internally (watts, hertz, bits, seconds, joules).
dB/dBm conversions happen only when parsing configs or emitting reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

LN2 = math.log(2.0)

#: Defaults of the simulated deployment: 50 devices in a 0.25 km disk,
#: N0 = -174 dBm/Hz, kappa = 1e-28, 400 global rounds x 10 local iterations.
DEFAULT_NOISE_PSD_W_PER_HZ = 1e-3 * 10.0 ** (-174.0 / 10.0)

BANDWIDTH_SUM_RTOL = 1e-9
DEADLINE_RTOL = 1e-6
BOX_RTOL = 1e-9


def dbm_to_watts(dbm: float) -> float:
    return 1e-3 * 10.0 ** (dbm / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts / 1e-3)


@dataclass(frozen=True)
class SystemConfig:
    """Global constants shared by all devices.

    ``weight_energy``/``weight_time`` are normalized to sum to one at
    construction time.
    """

    total_bandwidth_hz: float = 20e6
    noise_psd_w_per_hz: float = DEFAULT_NOISE_PSD_W_PER_HZ
    kappa: float = 1e-28
    global_rounds: int = 400
    local_iters: int = 10
    weight_energy: float = 0.5
    weight_time: float = 0.5
    num_devices: int = 50
    area_radius_km: float = 0.25
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.total_bandwidth_hz <= 0:
            raise ValueError("total_bandwidth_hz must be > 0")
        if self.noise_psd_w_per_hz <= 0:
            raise ValueError("noise_psd_w_per_hz must be > 0")
        if self.kappa <= 0:
            raise ValueError("kappa must be > 0")
        if self.global_rounds < 1 or self.local_iters < 1:
            raise ValueError("global_rounds and local_iters must be >= 1")
        if self.num_devices < 1:
            raise ValueError("num_devices must be >= 1")
        if self.weight_energy < 0 or self.weight_time < 0:
            raise ValueError("weights must be non-negative")
        total = self.weight_energy + self.weight_time
        if total <= 0:
            raise ValueError("weight_energy + weight_time must be positive")
        if total != 1.0:
            object.__setattr__(self, "weight_energy", self.weight_energy / total)
            object.__setattr__(self, "weight_time", self.weight_time / total)

    def with_weights(self, weight_energy: float, weight_time: float) -> "SystemConfig":
        return replace(self, weight_energy=weight_energy, weight_time=weight_time)


@dataclass(frozen=True)
class Device:
    """Per-device physical parameters (linear channel gain, workload, boxes)."""

    gain: float
    cycles_per_sample: float
    num_samples: float
    upload_bits: float
    p_min_w: float
    p_max_w: float
    f_min_hz: float
    f_max_hz: float

    def __post_init__(self) -> None:
        if not (0 < self.p_min_w <= self.p_max_w):
            raise ValueError("need 0 < p_min <= p_max")
        if not (0 < self.f_min_hz <= self.f_max_hz):
            raise ValueError("need 0 < f_min <= f_max")
        if self.gain <= 0:
            raise ValueError("gain must be > 0")
        if self.upload_bits <= 0:
            raise ValueError("upload_bits must be > 0")
        if self.cycles_per_sample * self.num_samples <= 0:
            raise ValueError("cycles_per_sample * num_samples must be > 0")

    @property
    def cycles_per_local_iter(self) -> float:
        return self.cycles_per_sample * self.num_samples


@dataclass(frozen=True)
class Scenario:
    config: SystemConfig
    devices: tuple[Device, ...]
    distances_km: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.devices) != self.config.num_devices:
            raise ValueError("devices length must equal config.num_devices")
        if len(self.distances_km) != self.config.num_devices:
            raise ValueError("distances_km length must equal config.num_devices")

    # Convenience vectors used by the solvers.
    @property
    def gain(self) -> np.ndarray:
        return np.array([d.gain for d in self.devices])

    @property
    def upload_bits(self) -> np.ndarray:
        return np.array([d.upload_bits for d in self.devices])

    @property
    def cycles_per_round(self) -> np.ndarray:
        """Cycles per global round: R_l * c_n * D_n."""
        return np.array(
            [self.config.local_iters * d.cycles_per_local_iter for d in self.devices]
        )

    @property
    def p_min(self) -> np.ndarray:
        return np.array([d.p_min_w for d in self.devices])

    @property
    def p_max(self) -> np.ndarray:
        return np.array([d.p_max_w for d in self.devices])

    @property
    def f_min(self) -> np.ndarray:
        return np.array([d.f_min_hz for d in self.devices])

    @property
    def f_max(self) -> np.ndarray:
        return np.array([d.f_max_hz for d in self.devices])


@dataclass(frozen=True)
class Allocation:
    """Decision variables plus the per-global-round deadline."""

    power_w: np.ndarray
    bandwidth_hz: np.ndarray
    freq_hz: np.ndarray
    round_deadline_s: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "power_w", np.asarray(self.power_w, dtype=float))
        object.__setattr__(self, "bandwidth_hz", np.asarray(self.bandwidth_hz, dtype=float))
        object.__setattr__(self, "freq_hz", np.asarray(self.freq_hz, dtype=float))


@dataclass(frozen=True)
class CostBreakdown:
    energy_trans_j: np.ndarray
    energy_cmp_j: np.ndarray
    total_energy_j: float
    total_delay_s: float
    objective: float

    @property
    def energy_trans_total_j(self) -> float:
        return float(np.sum(self.energy_trans_j))

    @property
    def energy_cmp_total_j(self) -> float:
        return float(np.sum(self.energy_cmp_j))


def data_rate(p_w, bandwidth_hz, gain, noise_psd):
    """Shannon uplink rate in bit/s; 0 at zero power or zero bandwidth."""
    p = np.asarray(p_w, dtype=float)
    b = np.asarray(bandwidth_hz, dtype=float)
    g = np.asarray(gain, dtype=float)
    if np.any(p < 0) or np.any(b < 0):
        raise ValueError("power and bandwidth must be non-negative")
    if np.any(g <= 0) or noise_psd <= 0:
        raise ValueError("gain and noise_psd must be positive")
    with np.errstate(divide="ignore", invalid="ignore"):
        snr = np.where(b > 0, g * p / (noise_psd * np.maximum(b, 1e-300)), 0.0)
        rate = np.where(b > 0, b * np.log2(1.0 + snr), 0.0)
    if rate.ndim == 0:
        return float(rate)
    return rate


def uplink_time(d_bits, rate_bps):
    """Upload seconds d/r; +inf when the rate is zero."""
    d = np.asarray(d_bits, dtype=float)
    r = np.asarray(rate_bps, dtype=float)
    with np.errstate(divide="ignore"):
        t = np.where(r > 0, d / np.maximum(r, 1e-300), np.inf)
    if t.ndim == 0:
        return float(t)
    return t


def transmission_energy(p_w, uplink_time_s):
    """Joules spent uploading once: p * T_up."""
    e = np.asarray(p_w, dtype=float) * np.asarray(uplink_time_s, dtype=float)
    if e.ndim == 0:
        return float(e)
    return e


def comp_time(device: Device, f_hz: float, local_iters: int) -> float:
    """Local computation seconds in one global round: R_l * c_n * D_n / f."""
    if f_hz <= 0:
        raise ValueError("frequency must be positive")
    return local_iters * device.cycles_per_local_iter / f_hz


def comp_energy_per_global_round(
    device: Device, f_hz: float, kappa: float, local_iters: int
) -> float:
    """Joules of local computation in one global round: kappa * R_l * c_n * D_n * f^2."""
    if f_hz <= 0:
        raise ValueError("frequency must be positive")
    return kappa * local_iters * device.cycles_per_local_iter * f_hz**2


def round_times(scenario: Scenario, allocation: Allocation) -> tuple[np.ndarray, np.ndarray]:
    """Per-device (T_cmp, T_up) for one global round."""
    cfg = scenario.config
    rates = data_rate(
        allocation.power_w, allocation.bandwidth_hz, scenario.gain, cfg.noise_psd_w_per_hz
    )
    t_up = uplink_time(scenario.upload_bits, rates)
    t_cmp = scenario.cycles_per_round / allocation.freq_hz
    return t_cmp, t_up


def evaluate(scenario: Scenario, allocation: Allocation) -> CostBreakdown:
    """Weighted objective w1*E + w2*R_g*max_n(T_cmp + T_up).

    The delay term uses the achieved per-round maximum, not the stored
    deadline. Any zero rate makes the objective infinite.
    """
    cfg = scenario.config
    n = cfg.num_devices
    if (
        len(allocation.power_w) != n
        or len(allocation.bandwidth_hz) != n
        or len(allocation.freq_hz) != n
    ):
        raise ValueError("allocation dimensions do not match scenario")
    t_cmp, t_up = round_times(scenario, allocation)
    e_trans = transmission_energy(allocation.power_w, t_up)
    e_cmp = cfg.kappa * cfg.local_iters * np.array(
        [d.cycles_per_local_iter for d in scenario.devices]
    ) * allocation.freq_hz**2
    total_energy = cfg.global_rounds * float(np.sum(e_trans + e_cmp))
    round_delay = float(np.max(t_cmp + t_up))
    total_delay = cfg.global_rounds * round_delay
    objective = cfg.weight_energy * total_energy + cfg.weight_time * total_delay
    return CostBreakdown(
        energy_trans_j=np.atleast_1d(e_trans),
        energy_cmp_j=np.atleast_1d(e_cmp),
        total_energy_j=total_energy,
        total_delay_s=total_delay,
        objective=objective,
    )


def check_feasibility(scenario: Scenario, allocation: Allocation) -> list[str]:
    """Return a list of constraint violations (empty when feasible).

    Checks the power/frequency boxes, the bandwidth budget and the
    per-device round deadline, each with a small relative tolerance.
    """
    cfg = scenario.config
    violations: list[str] = []
    p = allocation.power_w
    b = allocation.bandwidth_hz
    f = allocation.freq_hz
    if len(p) != cfg.num_devices:
        return [f"allocation has {len(p)} devices, scenario has {cfg.num_devices}"]
    for i, dev in enumerate(scenario.devices):
        if p[i] < dev.p_min_w * (1 - BOX_RTOL) or p[i] > dev.p_max_w * (1 + BOX_RTOL):
            violations.append(
                f"device {i}: power {p[i]:.6g} W outside box "
                f"[{dev.p_min_w:.6g}, {dev.p_max_w:.6g}] (8a)"
            )
        if f[i] < dev.f_min_hz * (1 - BOX_RTOL) or f[i] > dev.f_max_hz * (1 + BOX_RTOL):
            violations.append(
                f"device {i}: frequency {f[i]:.6g} Hz outside box "
                f"[{dev.f_min_hz:.6g}, {dev.f_max_hz:.6g}] (8b)"
            )
        if b[i] < 0:
            violations.append(f"device {i}: negative bandwidth {b[i]:.6g} Hz (8c)")
    total_b = float(np.sum(b))
    if total_b > cfg.total_bandwidth_hz * (1 + BANDWIDTH_SUM_RTOL):
        violations.append(
            f"bandwidth sum {total_b:.6g} Hz exceeds budget {cfg.total_bandwidth_hz:.6g} Hz (8c)"
        )
    t_cmp, t_up = round_times(scenario, allocation)
    totals = t_cmp + t_up
    limit = allocation.round_deadline_s * (1 + DEADLINE_RTOL)
    for i in range(cfg.num_devices):
        if not totals[i] <= limit:
            violations.append(
                f"device {i}: round time {totals[i]:.6g} s exceeds deadline "
                f"{allocation.round_deadline_s:.6g} s (9d)"
            )
    return violations


MIN_DISTANCE_KM = 1e-3  # resample devices closer than 1 m to the base station


def path_loss_db(distance_km):
    """Urban-macro path loss in dB at a distance in km (no shadowing)."""
    return 128.1 + 37.6 * np.log10(distance_km)


def generate_scenario(
    config: SystemConfig,
    *,
    p_max_dbm: float = 12.0,
    p_min_dbm: float = 0.0,
    f_max_ghz: float = 2.0,
    f_min_ghz: float = 0.1,
    upload_kbits: float = 28.1,
    samples_per_device: float = 500.0,
    cycles_low: float = 1e4,
    cycles_high: float = 3e4,
    shadow_std_db: float = 8.0,
) -> Scenario:
    """Seeded scenario: devices uniform in a disk, log-normal shadowed path loss.

    Path loss in dB at distance d km is 128.1 + 37.6*log10(d); shadow fading is
    Normal(0, shadow_std_db) in the dB domain. Deterministic for a fixed
    config.rng_seed (numpy PCG64).
    """
    if config.area_radius_km <= 0:
        raise ValueError("area_radius_km must be > 0")
    rng = np.random.default_rng(config.rng_seed)
    n = config.num_devices
    distances = np.empty(n)
    for i in range(n):
        d = 0.0
        while d < MIN_DISTANCE_KM:
            d = config.area_radius_km * math.sqrt(rng.uniform())
        distances[i] = d
    shadow_db = rng.normal(0.0, shadow_std_db, size=n)
    loss_db = path_loss_db(distances)
    gain = 10.0 ** (-(loss_db + shadow_db) / 10.0)
    cycles = rng.uniform(cycles_low, cycles_high, size=n)

    p_min = dbm_to_watts(p_min_dbm)
    p_max = dbm_to_watts(p_max_dbm)
    devices = tuple(
        Device(
            gain=float(gain[i]),
            cycles_per_sample=float(cycles[i]),
            num_samples=samples_per_device,
            upload_bits=upload_kbits * 1e3,
            p_min_w=p_min,
            p_max_w=p_max,
            f_min_hz=f_min_ghz * 1e9,
            f_max_hz=f_max_ghz * 1e9,
        )
        for i in range(n)
    )
    return Scenario(config=config, devices=devices, distances_km=tuple(distances))


# --- scenario persistence ------------------------------------------------
#
# Plain-text key/value document, one scenario per file; arrays are
# bracketed comma-separated lists. Field names documented in docs/formats.md.

_SCALAR_FIELDS = (
    "total_bandwidth_hz",
    "noise_psd_w_per_hz",
    "kappa",
    "global_rounds",
    "local_iters",
    "weight_energy",
    "weight_time",
    "num_devices",
    "area_radius_km",
    "rng_seed",
)
_ARRAY_FIELDS = (
    "distances_km",
    "gain",
    "cycles_per_sample",
    "num_samples",
    "upload_bits",
    "p_min_w",
    "p_max_w",
    "f_min_hz",
    "f_max_hz",
)


def scenario_to_text(scenario: Scenario) -> str:
    cfg = scenario.config
    lines = ["# fdmafl scenario v1"]
    for name in _SCALAR_FIELDS:
        lines.append(f"{name} = {getattr(cfg, name)!r}")
    arrays = {
        "distances_km": scenario.distances_km,
        "gain": [d.gain for d in scenario.devices],
        "cycles_per_sample": [d.cycles_per_sample for d in scenario.devices],
        "num_samples": [d.num_samples for d in scenario.devices],
        "upload_bits": [d.upload_bits for d in scenario.devices],
        "p_min_w": [d.p_min_w for d in scenario.devices],
        "p_max_w": [d.p_max_w for d in scenario.devices],
        "f_min_hz": [d.f_min_hz for d in scenario.devices],
        "f_max_hz": [d.f_max_hz for d in scenario.devices],
    }
    for name in _ARRAY_FIELDS:
        body = ", ".join(repr(float(v)) for v in arrays[name])
        lines.append(f"{name} = [{body}]")
    return "\n".join(lines) + "\n"


def scenario_from_text(text: str) -> Scenario:
    values: dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if val.startswith("["):
            if not val.endswith("]"):
                raise ValueError(f"line {lineno}: unterminated array for {key!r}")
            body = val[1:-1].strip()
            values[key] = [float(x) for x in body.split(",")] if body else []
        else:
            values[key] = float(val)
    missing = [k for k in _SCALAR_FIELDS + _ARRAY_FIELDS if k not in values]
    if missing:
        raise ValueError(f"scenario document missing fields: {', '.join(missing)}")
    cfg = SystemConfig(
        total_bandwidth_hz=values["total_bandwidth_hz"],
        noise_psd_w_per_hz=values["noise_psd_w_per_hz"],
        kappa=values["kappa"],
        global_rounds=int(values["global_rounds"]),
        local_iters=int(values["local_iters"]),
        weight_energy=values["weight_energy"],
        weight_time=values["weight_time"],
        num_devices=int(values["num_devices"]),
        area_radius_km=values["area_radius_km"],
        rng_seed=int(values["rng_seed"]),
    )
    n = cfg.num_devices
    for name in _ARRAY_FIELDS:
        if len(values[name]) != n:
            raise ValueError(f"array {name!r} has {len(values[name])} entries, expected {n}")
    devices = tuple(
        Device(
            gain=values["gain"][i],
            cycles_per_sample=values["cycles_per_sample"][i],
            num_samples=values["num_samples"][i],
            upload_bits=values["upload_bits"][i],
            p_min_w=values["p_min_w"][i],
            p_max_w=values["p_max_w"][i],
            f_min_hz=values["f_min_hz"][i],
            f_max_hz=values["f_max_hz"][i],
        )
        for i in range(n)
    )
    return Scenario(config=cfg, devices=devices, distances_km=tuple(values["distances_km"]))
