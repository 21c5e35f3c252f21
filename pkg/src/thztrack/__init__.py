"""Cooperative localization-aided beam tracking for THz lens-array base stations."""

from .channel import ArrayConfig, LinkBudget
from .config import Scenario, load_scenario
from .geometry import BaseStationGeometry
from .metrics import Algorithm, TimeslotRecord
from .simulation import RunResult, emit_results, run_scenario

__all__ = [
    "Algorithm",
    "ArrayConfig",
    "BaseStationGeometry",
    "LinkBudget",
    "RunResult",
    "Scenario",
    "TimeslotRecord",
    "emit_results",
    "load_scenario",
    "run_scenario",
]

__version__ = "0.1.0"
