"""Scenario configuration: network geometry, demand, signal programs, attacks."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from ..errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

APPROACHES = ("N", "E", "S", "W")

# Controllers may switch only on this boundary.
UPDATE_PERIOD = 10

# Detector aggregation window, seconds.
COLLECT_PERIOD = 10


class Phase(str, Enum):
    NS_GREEN = "NS_GREEN"
    EW_GREEN = "EW_GREEN"
    ALL_RED = "ALL_RED"
    ALL_GREEN = "ALL_GREEN"


class AttackMode(str, Enum):
    ALL_GREEN = "ALL_GREEN"
    ALL_RED = "ALL_RED"
    RANDOM_EACH_UPDATE = "RANDOM_EACH_UPDATE"


GREEN_APPROACHES = {
    Phase.NS_GREEN: ("N", "S"),
    Phase.EW_GREEN: ("E", "W"),
    Phase.ALL_RED: (),
    Phase.ALL_GREEN: APPROACHES,
}

DEFAULT_PROGRAM = ((Phase.NS_GREEN, 30), (Phase.EW_GREEN, 30))


@dataclass
class NetworkConfig:
    """Geometry and demand for a rows x cols grid of signalized intersections.

    Arrival rates are Poisson intensities in vehicles/second per approach.
    `arrival_rates` holds per-(intersection, approach) overrides keyed
    "<intersection>:<approach>" (e.g. "0:N"); approaches without an override
    use `default_arrival_rate`.  `approach_lanes` optionally sets distinct
    lane counts for the N/E/S/W approaches of every intersection, which is
    how a monitored intersection gets its 18 detectors (5+4+5+4).
    """

    grid_rows: int = 1
    grid_cols: int = 1
    lanes_per_approach: int = 4
    approach_lanes: tuple[int, int, int, int] | None = None
    lane_length: float = 120.0
    free_flow_speed: float = 13.9
    vehicle_length: float = 5.0
    min_gap: float = 2.5
    saturation_flow: float = 0.5
    default_arrival_rate: float = 0.05
    arrival_rates: dict[str, float] = field(default_factory=dict)
    seed: int = 0
    phase_program: tuple[tuple[Phase, int], ...] = DEFAULT_PROGRAM

    def validate(self) -> None:
        if self.grid_rows < 1 or self.grid_cols < 1:
            raise ConfigError("grid dimensions must be >= 1")
        if self.lanes_per_approach < 1:
            raise ConfigError("lanes_per_approach must be >= 1")
        if self.approach_lanes is not None:
            if len(self.approach_lanes) != 4 or any(n < 1 for n in self.approach_lanes):
                raise ConfigError("approach_lanes needs four counts >= 1")
        if not (self.vehicle_length > 0 and self.min_gap > 0):
            raise ConfigError("vehicle_length and min_gap must be positive")
        if self.lane_length <= self.vehicle_length + self.min_gap:
            raise ConfigError("lane_length must exceed vehicle_length + min_gap")
        if self.free_flow_speed <= 0:
            raise ConfigError("free_flow_speed must be positive")
        if self.saturation_flow <= 0:
            raise ConfigError("saturation_flow must be positive")
        if self.default_arrival_rate < 0:
            raise ConfigError("arrival rates must be >= 0")
        n_inter = self.grid_rows * self.grid_cols
        for key, rate in self.arrival_rates.items():
            if rate < 0:
                raise ConfigError(f"arrival rate for {key!r} must be >= 0")
            self._parse_rate_key(key, n_inter)
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if not self.phase_program:
            raise ConfigError("phase_program must not be empty")
        for phase, duration in self.phase_program:
            if phase not in (Phase.NS_GREEN, Phase.EW_GREEN, Phase.ALL_RED, Phase.ALL_GREEN):
                raise ConfigError(f"unknown phase {phase!r} in program")
            if duration <= 0 or duration % UPDATE_PERIOD != 0:
                raise ConfigError(
                    f"program durations must be positive multiples of {UPDATE_PERIOD} s"
                )

    @staticmethod
    def _parse_rate_key(key: str, n_intersections: int) -> tuple[int, str]:
        try:
            raw_i, approach = key.split(":")
            inter = int(raw_i)
        except ValueError as exc:
            raise ConfigError(f"arrival rate key {key!r} is not '<id>:<approach>'") from exc
        if approach not in APPROACHES:
            raise ConfigError(f"unknown approach {approach!r} in rate key {key!r}")
        if not 0 <= inter < n_intersections:
            raise ConfigError(f"intersection {inter} in rate key {key!r} does not exist")
        return inter, approach

    def rate(self, intersection: int, approach: str) -> float:
        return self.arrival_rates.get(f"{intersection}:{approach}", self.default_arrival_rate)

    def lanes_for(self, approach: str) -> int:
        if self.approach_lanes is None:
            return self.lanes_per_approach
        return self.approach_lanes[APPROACHES.index(approach)]

    def lane_capacity(self) -> int:
        return int(self.lane_length // (self.vehicle_length + self.min_gap))

    def as_dict(self) -> dict:
        return {
            "grid_rows": self.grid_rows,
            "grid_cols": self.grid_cols,
            "lanes_per_approach": self.lanes_per_approach,
            "approach_lanes": list(self.approach_lanes) if self.approach_lanes else None,
            "lane_length": self.lane_length,
            "free_flow_speed": self.free_flow_speed,
            "vehicle_length": self.vehicle_length,
            "min_gap": self.min_gap,
            "saturation_flow": self.saturation_flow,
            "default_arrival_rate": self.default_arrival_rate,
            "arrival_rates": dict(sorted(self.arrival_rates.items())),
            "seed": self.seed,
            "phase_program": [[p.value, d] for p, d in self.phase_program],
        }


@dataclass(frozen=True)
class AttackEvent:
    """Override of one controller's phase during [start, end) seconds.

    `target` is an intersection index, or the string "busiest" which is
    resolved against the network at run time.
    """

    start: float
    end: float
    target: int | str
    mode: AttackMode = AttackMode.RANDOM_EACH_UPDATE

    def validate(self, n_intersections: int) -> None:
        if not (0 <= self.start < self.end):
            raise ConfigError(f"attack needs 0 <= start < end, got [{self.start}, {self.end})")
        if isinstance(self.target, str):
            if self.target != "busiest":
                raise ConfigError(f"unknown attack target {self.target!r}")
        elif not 0 <= self.target < n_intersections:
            raise ConfigError(f"attack target {self.target} does not exist")

    def resolved(self, busiest: int) -> "AttackEvent":
        if self.target == "busiest":
            return AttackEvent(self.start, self.end, busiest, self.mode)
        return self

    def as_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "target": self.target,
            "mode": self.mode.value,
        }


def _parse_program(raw: list[dict]) -> tuple[tuple[Phase, int], ...]:
    program = []
    for entry in raw:
        try:
            program.append((Phase(entry["phase"]), int(entry["duration"])))
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad phase program entry {entry!r}") from exc
    return tuple(program)


def network_config_from_dict(raw: dict) -> NetworkConfig:
    known = {
        "grid_rows",
        "grid_cols",
        "lanes_per_approach",
        "approach_lanes",
        "lane_length",
        "free_flow_speed",
        "vehicle_length",
        "min_gap",
        "saturation_flow",
        "default_arrival_rate",
        "arrival_rates",
        "seed",
    }
    unknown = set(raw) - known - {"phase_program"}
    if unknown:
        raise ConfigError(f"unknown [network] keys: {sorted(unknown)}")
    kwargs = {k: raw[k] for k in known & set(raw)}
    if "approach_lanes" in kwargs and kwargs["approach_lanes"] is not None:
        kwargs["approach_lanes"] = tuple(int(n) for n in kwargs["approach_lanes"])
    if "arrival_rates" in kwargs:
        kwargs["arrival_rates"] = {str(k): float(v) for k, v in kwargs["arrival_rates"].items()}
    config = NetworkConfig(**kwargs)
    if "phase_program" in raw:
        config.phase_program = _parse_program(raw["phase_program"])
    config.validate()
    return config


def attacks_from_list(raw: list[dict]) -> list[AttackEvent]:
    events = []
    for entry in raw:
        try:
            mode = AttackMode(entry.get("mode", AttackMode.RANDOM_EACH_UPDATE.value))
            events.append(
                AttackEvent(
                    start=float(entry["start"]),
                    end=float(entry["end"]),
                    target=entry.get("target", "busiest"),
                    mode=mode,
                )
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad attack entry {entry!r}") from exc
    return events


def load_scenario(path: str | Path) -> tuple[NetworkConfig, list[AttackEvent], int, dict]:
    """Parse a scenario file.

    Returns (network config, attack events, duration seconds, full raw table)
    so downstream stages can read their own sections from the same file.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        raw = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse scenario file {path}: {exc}") from exc

    config = network_config_from_dict(raw.get("network", {}))
    attacks = attacks_from_list(raw.get("attacks", []))
    n_inter = config.grid_rows * config.grid_cols
    for event in attacks:
        event.validate(n_inter)

    sim = raw.get("simulation", {})
    duration = int(sim.get("duration", 3600))
    if duration <= 0 or duration % COLLECT_PERIOD != 0:
        raise ConfigError(f"simulation duration must be a positive multiple of {COLLECT_PERIOD} s")
    return config, attacks, duration, raw
