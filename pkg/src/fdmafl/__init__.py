"""Energy/delay-weighted resource allocation for federated learning over an FDMA uplink."""

from fdmafl.model import (
    Allocation,
    CostBreakdown,
    Device,
    Scenario,
    SystemConfig,
    check_feasibility,
    comp_energy_per_global_round,
    comp_time,
    data_rate,
    evaluate,
    generate_scenario,
    transmission_energy,
    uplink_time,
)
from fdmafl.orchestrator import SolveOptions, SolveReport, solve
from fdmafl.sp1 import Sp1Solution, required_frequency, solve_sp1
from fdmafl.sp2 import NewtonParams, Sp2State, solve_sp2, solve_sp2_v2

__all__ = [
    "Allocation",
    "CostBreakdown",
    "Device",
    "NewtonParams",
    "Scenario",
    "SolveOptions",
    "SolveReport",
    "Sp1Solution",
    "Sp2State",
    "SystemConfig",
    "check_feasibility",
    "comp_energy_per_global_round",
    "comp_time",
    "data_rate",
    "evaluate",
    "generate_scenario",
    "required_frequency",
    "solve",
    "solve_sp1",
    "solve_sp2",
    "solve_sp2_v2",
    "transmission_energy",
    "uplink_time",
]

__version__ = "0.1.0"
