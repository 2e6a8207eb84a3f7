"""Deterministic grid simulation of signalized intersections under attack."""

from .config import (
    APPROACHES,
    AttackEvent,
    AttackMode,
    NetworkConfig,
    Phase,
    load_scenario,
)
from .engine import Simulation, run_scenario
from .network import Network, SignalController, build_network
from .records import (
    FEATURE_COLUMNS,
    FEATURE_NAMES,
    NUM_FEATURES,
    DetectorRecord,
    Label,
    RecordLog,
    load_record_log,
)

__all__ = [
    "APPROACHES",
    "AttackEvent",
    "AttackMode",
    "DetectorRecord",
    "FEATURE_COLUMNS",
    "FEATURE_NAMES",
    "Label",
    "Network",
    "NetworkConfig",
    "NUM_FEATURES",
    "Phase",
    "RecordLog",
    "SignalController",
    "Simulation",
    "build_network",
    "load_record_log",
    "load_scenario",
    "run_scenario",
]
