"""Movable-antenna relay-aided D2D mobile-edge-computing latency optimizer."""

from .config import SystemConfig, dbm_to_watts, reference_config, tiny_config
from .scenario import ScenarioInstance, build_scenario, init_positions
from .system import (Beamformers, LatencyBreakdown, latency_components,
                     check_feasibility)
from .pdd import SolveOptions, Solution, solve

__all__ = [
    "SystemConfig", "dbm_to_watts", "reference_config", "tiny_config",
    "ScenarioInstance", "build_scenario", "init_positions",
    "Beamformers", "LatencyBreakdown", "latency_components",
    "check_feasibility", "SolveOptions", "Solution", "solve",
]

__version__ = "0.1.0"
