"""Network structure: intersections, signal controllers, lanes, vehicles."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from ..errors import ConfigError
from .config import (
    APPROACHES,
    DEFAULT_PROGRAM,
    GREEN_APPROACHES,
    UPDATE_PERIOD,
    NetworkConfig,
    Phase,
)

# Direction of travel per approach: a vehicle on approach "N" entered from the
# north neighbor and continues south, i.e. to the intersection one row down.
_STRAIGHT_STEP = {"N": (1, 0), "S": (-1, 0), "E": (0, -1), "W": (0, 1)}


@dataclass
class Vehicle:
    """One simulated vehicle; timestamps are integer simulation seconds."""

    vid: int
    queue_join_time: int
    halt_start: int | None = None
    lifetime_halt: float = 0.0


@dataclass
class Lane:
    """Single incoming lane with a vertical (point) queue at the stop line."""

    intersection: int
    approach: str
    index: int
    capacity: int
    queue: deque[Vehicle] = field(default_factory=deque)
    moving: deque[Vehicle] = field(default_factory=deque)
    credit: float = 0.0

    @property
    def occupants(self) -> int:
        return len(self.queue) + len(self.moving)

    @property
    def full(self) -> bool:
        return self.occupants >= self.capacity

    @property
    def detector_id(self) -> str:
        return f"{self.approach}{self.index}"


class SignalController:
    """Fixed-time controller whose phase may change only every 10 s."""

    def __init__(self, intersection_id: int, program=DEFAULT_PROGRAM):
        self.intersection_id = intersection_id
        self.update_period = UPDATE_PERIOD
        self.program = tuple(program)
        self.cycle = sum(d for _, d in self.program)
        self.phase = self.program_phase(0)

    def program_phase(self, t: int) -> Phase:
        pos = t % self.cycle
        for phase, duration in self.program:
            if pos < duration:
                return phase
            pos -= duration
        return self.program[-1][0]

    def is_green(self, approach: str) -> bool:
        return approach in GREEN_APPROACHES[self.phase]


@dataclass
class Intersection:
    id: int
    row: int
    col: int
    controller: SignalController
    lanes: dict[str, list[Lane]]
    total_arrival_rate: float

    def all_lanes(self):
        for approach in APPROACHES:
            yield from self.lanes[approach]


class Network:
    """Grid of intersections; exposes the busiest one for monitoring."""

    def __init__(self, config: NetworkConfig):
        config.validate()
        self.config = config
        self.rows = config.grid_rows
        self.cols = config.grid_cols
        capacity = config.lane_capacity()
        self.intersections: list[Intersection] = []
        for r in range(self.rows):
            for c in range(self.cols):
                iid = r * self.cols + c
                lanes = {
                    a: [
                        Lane(iid, a, k, capacity)
                        for k in range(config.lanes_for(a))
                    ]
                    for a in APPROACHES
                }
                total = sum(config.rate(iid, a) for a in APPROACHES)
                self.intersections.append(
                    Intersection(iid, r, c, SignalController(iid, config.phase_program), lanes, total)
                )
        # Ties break toward the lowest intersection id (max() keeps the first
        # maximal element, which is the lowest id in construction order).
        self.busiest = max(self.intersections, key=lambda i: i.total_arrival_rate).id

    def intersection(self, iid: int) -> Intersection:
        return self.intersections[iid]

    def downstream(self, iid: int, approach: str) -> int | None:
        """Intersection reached by continuing straight, or None at a boundary."""
        inter = self.intersections[iid]
        dr, dc = _STRAIGHT_STEP[approach]
        r, c = inter.row + dr, inter.col + dc
        if 0 <= r < self.rows and 0 <= c < self.cols:
            return r * self.cols + c
        return None

    def detectors(self, iid: int) -> list[Lane]:
        """Monitored lanes of one intersection, in stable detector order."""
        return list(self.intersections[iid].all_lanes())


def build_network(config: NetworkConfig) -> Network:
    """Construct the grid; raises ConfigError on invalid dimensions/rates."""
    if not isinstance(config, NetworkConfig):
        raise ConfigError("build_network expects a NetworkConfig")
    return Network(config)
