"""Discrete-time (1 s tick) simulation loop with attack injection.

Queue model: each lane is a vertical queue.  A vehicle entering a lane
travels at free-flow speed for `lane_length / free_flow_speed` seconds,
then either passes straight through on green (if the stop line is clear
and departure credit is available) or joins the halted queue.  Green
lanes accumulate departure credit at the saturation flow rate; one unit
of credit releases one queued vehicle, which continues straight to the
next intersection (random target lane) or leaves the network at the
boundary.  A full downstream lane blocks the transfer (spillback).
"""

from __future__ import annotations

import numpy as np

from .._util import canonical_json, sha256_bytes
from ..errors import ConfigError
from .config import (
    APPROACHES,
    COLLECT_PERIOD,
    UPDATE_PERIOD,
    AttackEvent,
    AttackMode,
    NetworkConfig,
    Phase,
)
from .network import Lane, Network, Vehicle, build_network
from .records import NUM_FEATURES, DetectorRecord, Label, RecordLog

# Burst limit on accumulated departure credit while a lane stays green.
_CREDIT_CAP_SECONDS = 2.0


class _LaneStats:
    """Per-detector accumulator over one 10 s collection interval."""

    __slots__ = (
        "entered", "left", "started_halts", "ticks",
        "n_sum", "n_max", "occ_sum", "occ_max", "speed_sum",
        "jam_v_sum", "jam_v_max", "jam_m_sum", "jam_m_max",
        "halt_within", "halt_elapsed", "seen_lifetime",
    )

    def __init__(self):
        self.reset(())

    def reset(self, occupants) -> None:
        self.entered = 0
        self.left = 0
        self.started_halts = 0
        self.ticks = 0
        self.n_sum = 0.0
        self.n_max = 0.0
        self.occ_sum = 0.0
        self.occ_max = 0.0
        self.speed_sum = 0.0
        self.jam_v_sum = 0.0
        self.jam_v_max = 0.0
        self.jam_m_sum = 0.0
        self.jam_m_max = 0.0
        self.halt_within: dict[int, float] = {}
        self.halt_elapsed: dict[int, float] = {}
        self.seen_lifetime: dict[int, float] = {v.vid: v.lifetime_halt for v in occupants}


class Simulation:
    """Mutable simulation state; single-threaded stepping."""

    def __init__(
        self,
        config: NetworkConfig,
        attacks: tuple[AttackEvent, ...] | list[AttackEvent] = (),
        monitor: int | None = None,
    ):
        self.network: Network = build_network(config)
        self.config = config
        self.time = 0
        self._next_vid = 0
        self.vehicles_in_network = 0
        self.entered_total = 0
        self.exited_total = 0
        self.blocked_arrivals = 0
        self.last_step_entered = 0
        self.last_step_exited = 0

        seq = np.random.SeedSequence(config.seed)
        arrivals_seq, routing_seq, attacks_seq = seq.spawn(3)
        self._arrivals_rng = np.random.default_rng(arrivals_seq)
        self._routing_rng = np.random.default_rng(routing_seq)
        self._attacks_rng = np.random.default_rng(attacks_seq)

        self.monitored = self.network.busiest if monitor is None else monitor
        if not 0 <= self.monitored < len(self.network.intersections):
            raise ConfigError(f"monitored intersection {self.monitored} does not exist")
        self._detector_lanes: list[Lane] = self.network.detectors(self.monitored)
        self._stats = {id(lane): _LaneStats() for lane in self._detector_lanes}
        self._travel_ticks = max(1, round(config.lane_length / config.free_flow_speed))
        self._unit_length = config.vehicle_length + config.min_gap

        self.attacks: list[AttackEvent] = []
        if attacks:
            self.apply_attacks(attacks)

    # ------------------------------------------------------------------
    # attack injection

    def apply_attacks(self, events) -> None:
        n = len(self.network.intersections)
        resolved = []
        for event in events:
            event.validate(n)
            resolved.append(event.resolved(self.network.busiest))
        self.attacks = sorted(resolved, key=lambda e: (e.start, e.end, e.target))

    def _active_attack(self, iid: int, t: int) -> AttackEvent | None:
        hit = None
        for event in self.attacks:
            if event.target == iid and event.start <= t < event.end:
                hit = event
        return hit

    # ------------------------------------------------------------------
    # stepping

    def step(self) -> None:
        """Advance the state by exactly one second."""
        t = self.time
        self.last_step_entered = 0
        self.last_step_exited = 0
        if t % UPDATE_PERIOD == 0:
            self._update_phases(t)
        now = t + 1
        self._process_departures(now)
        self._process_arrivals(now)
        self._process_queue_joins(now)
        self._snapshot(now)
        self.time = now

    def _update_phases(self, t: int) -> None:
        for inter in self.network.intersections:
            attack = self._active_attack(inter.id, t)
            if attack is None:
                inter.controller.phase = inter.controller.program_phase(t)
            elif attack.mode == AttackMode.ALL_GREEN:
                inter.controller.phase = Phase.ALL_GREEN
            elif attack.mode == AttackMode.ALL_RED:
                inter.controller.phase = Phase.ALL_RED
            else:  # RANDOM_EACH_UPDATE: fresh uniform draw at every update
                draw = int(self._attacks_rng.integers(0, 2))
                inter.controller.phase = Phase.ALL_GREEN if draw == 0 else Phase.ALL_RED

    def _transfer(self, lane: Lane, vehicle: Vehicle, now: int) -> bool:
        """Move a vehicle across the stop line; False if spillback blocks it."""
        downstream = self.network.downstream(lane.intersection, lane.approach)
        if downstream is None:
            self.exited_total += 1
            self.last_step_exited += 1
            self.vehicles_in_network -= 1
            return True
        candidates = [
            l for l in self.network.intersections[downstream].lanes[lane.approach] if not l.full
        ]
        if not candidates:
            return False
        if len(candidates) == 1:
            target = candidates[0]
        else:
            target = candidates[int(self._routing_rng.integers(0, len(candidates)))]
        vehicle.queue_join_time = now + self._travel_ticks
        target.moving.append(vehicle)
        stats = self._stats.get(id(target))
        if stats is not None:
            stats.entered += 1
            stats.seen_lifetime[vehicle.vid] = vehicle.lifetime_halt
        return True

    def _close_halt(self, vehicle: Vehicle, lane: Lane, now: int) -> None:
        if vehicle.halt_start is None:
            return
        episode = now - vehicle.halt_start
        vehicle.lifetime_halt += episode
        stats = self._stats.get(id(lane))
        if stats is not None:
            prev = stats.halt_elapsed.get(vehicle.vid, 0.0)
            stats.halt_elapsed[vehicle.vid] = max(prev, episode)
            # the final second of the halt is spent inside this interval
            stats.halt_within[vehicle.vid] = stats.halt_within.get(vehicle.vid, 0.0) + 1.0
        vehicle.halt_start = None

    def _record_departure(self, lane: Lane, vehicle: Vehicle) -> None:
        stats = self._stats.get(id(lane))
        if stats is not None:
            stats.left += 1
            stats.seen_lifetime[vehicle.vid] = vehicle.lifetime_halt

    def _process_departures(self, now: int) -> None:
        sat = self.config.saturation_flow
        cap = max(_CREDIT_CAP_SECONDS * sat, 1.0 + sat)
        for inter in self.network.intersections:
            controller = inter.controller
            for approach in APPROACHES:
                green = controller.is_green(approach)
                for lane in inter.lanes[approach]:
                    if not green:
                        lane.credit = 0.0
                        continue
                    lane.credit = min(lane.credit + sat, cap)
                    while lane.credit >= 1.0 and lane.queue:
                        head = lane.queue[0]
                        if not self._transfer(lane, head, now):
                            break  # downstream spillback
                        lane.queue.popleft()
                        lane.credit -= 1.0
                        self._close_halt(head, lane, now)
                        self._record_departure(lane, head)

    def _process_arrivals(self, now: int) -> None:
        rng = self._arrivals_rng
        for inter in self.network.intersections:
            for approach in APPROACHES:
                rate = self.config.rate(inter.id, approach)
                if rate <= 0.0:
                    continue
                count = int(rng.poisson(rate))
                for _ in range(count):
                    candidates = [l for l in inter.lanes[approach] if not l.full]
                    if not candidates:
                        self.blocked_arrivals += 1
                        continue
                    if len(candidates) == 1:
                        lane = candidates[0]
                    else:
                        lane = candidates[int(rng.integers(0, len(candidates)))]
                    vehicle = Vehicle(self._next_vid, queue_join_time=now + self._travel_ticks)
                    self._next_vid += 1
                    lane.moving.append(vehicle)
                    self.vehicles_in_network += 1
                    self.entered_total += 1
                    self.last_step_entered += 1
                    stats = self._stats.get(id(lane))
                    if stats is not None:
                        stats.entered += 1
                        stats.seen_lifetime[vehicle.vid] = vehicle.lifetime_halt

    def _process_queue_joins(self, now: int) -> None:
        for inter in self.network.intersections:
            controller = inter.controller
            for approach in APPROACHES:
                green = controller.is_green(approach)
                for lane in inter.lanes[approach]:
                    while lane.moving and lane.moving[0].queue_join_time <= now:
                        vehicle = lane.moving[0]
                        if green and not lane.queue and lane.credit >= 1.0:
                            if self._transfer(lane, vehicle, now):
                                lane.moving.popleft()
                                lane.credit -= 1.0
                                self._record_departure(lane, vehicle)
                                continue
                        lane.moving.popleft()
                        vehicle.halt_start = now
                        lane.queue.append(vehicle)
                        stats = self._stats.get(id(lane))
                        if stats is not None:
                            stats.started_halts += 1

    def _snapshot(self, now: int) -> None:
        vf = self.config.free_flow_speed
        veh_len = self.config.vehicle_length
        lane_len = self.config.lane_length
        unit = self._unit_length
        for lane in self._detector_lanes:
            stats = self._stats[id(lane)]
            n = lane.occupants
            jam_v = len(lane.queue)
            jam_m = jam_v * unit
            occ = n * veh_len / lane_len * 100.0
            speed = vf if n == 0 else vf * len(lane.moving) / n
            stats.ticks += 1
            stats.n_sum += n
            stats.n_max = max(stats.n_max, n)
            stats.occ_sum += occ
            stats.occ_max = max(stats.occ_max, occ)
            stats.speed_sum += speed
            stats.jam_v_sum += jam_v
            stats.jam_v_max = max(stats.jam_v_max, jam_v)
            stats.jam_m_sum += jam_m
            stats.jam_m_max = max(stats.jam_m_max, jam_m)
            for vehicle in lane.queue:
                stats.seen_lifetime[vehicle.vid] = vehicle.lifetime_halt + (now - vehicle.halt_start)
                if vehicle.halt_start < now:
                    vid = vehicle.vid
                    stats.halt_within[vid] = stats.halt_within.get(vid, 0.0) + 1.0
                    elapsed = float(now - vehicle.halt_start)
                    if elapsed > stats.halt_elapsed.get(vid, 0.0):
                        stats.halt_elapsed[vid] = elapsed
            for vehicle in lane.moving:
                stats.seen_lifetime[vehicle.vid] = vehicle.lifetime_halt

    # ------------------------------------------------------------------
    # detectors

    def _record_label(self, begin: int, end: int) -> Label:
        for event in self.attacks:
            if event.target == self.monitored and event.start < end and begin < event.end:
                return Label.HACKED
        return Label.NORMAL

    def sample_detectors(self) -> list[DetectorRecord]:
        """Emit one record per detector for the just-elapsed 10 s interval."""
        if self.time == 0 or self.time % COLLECT_PERIOD != 0:
            raise ConfigError(f"detectors sample at multiples of {COLLECT_PERIOD} s, not t={self.time}")
        if self._detector_lanes and self._stats[id(self._detector_lanes[0])].ticks != COLLECT_PERIOD:
            raise ConfigError("detector interval has not accumulated 10 ticks since the last sample")
        end = self.time
        begin = end - COLLECT_PERIOD
        label = self._record_label(begin, end)
        records = []
        for lane in self._detector_lanes:
            s = self._stats[id(lane)]
            ticks = float(s.ticks)
            features = np.empty(NUM_FEATURES, dtype=np.float64)
            features[0] = s.n_sum                                   # sampledSeconds
            features[1] = s.entered                                 # nVehEntered
            features[2] = s.left                                    # nVehLeft
            features[3] = len(s.seen_lifetime)                      # nVehSeen
            features[4] = s.speed_sum / ticks                       # meanSpeed
            within = list(s.halt_within.values())
            features[15] = sum(within)                              # interval halt sum
            features[5] = features[15] / features[3] if features[3] else 0.0  # meanTimeLoss
            features[6] = s.occ_sum / ticks                         # meanOccupancy
            features[7] = s.occ_max                                 # maxOccupancy
            features[8] = s.n_sum / ticks                           # meanVehicleNumber
            features[9] = s.n_max                                   # maxVehicleNumber
            elapsed = list(s.halt_elapsed.values())
            features[10] = sum(elapsed) / len(elapsed) if elapsed else 0.0  # meanHaltingDuration
            features[11] = max(elapsed) if elapsed else 0.0         # maxHaltingDuration
            features[12] = sum(s.seen_lifetime.values())            # haltingDurationSum
            features[13] = sum(within) / len(within) if within else 0.0  # interval halt mean
            features[14] = max(within) if within else 0.0           # interval halt max
            features[16] = s.started_halts                          # startedHalts
            features[17] = s.jam_v_sum / ticks                      # meanJamLengthInVehicles
            features[18] = s.jam_m_sum / ticks                      # meanJamLengthInMeters
            features[19] = s.jam_v_max                              # maxJamLengthInVehicles
            features[20] = s.jam_m_max                              # maxJamLengthInMeters
            features[21] = s.jam_v_sum                              # jamLengthInVehiclesSum
            features[22] = s.jam_m_sum                              # jamLengthInMetersSum
            records.append(DetectorRecord(float(begin), float(end), lane.detector_id, label, features))
            s.reset(list(lane.queue) + list(lane.moving))
        return records

    # ------------------------------------------------------------------
    # helpers

    def total_occupants(self) -> int:
        return sum(lane.occupants for inter in self.network.intersections for lane in inter.all_lanes())

    def preload_queue(self, intersection: int, approach: str, lane_index: int, count: int) -> None:
        """Inject halted vehicles at the current time (experiment setup aid)."""
        lane = self.network.intersections[intersection].lanes[approach][lane_index]
        stats = self._stats.get(id(lane))
        for _ in range(count):
            if lane.full:
                raise ConfigError("cannot preload beyond lane capacity")
            vehicle = Vehicle(self._next_vid, queue_join_time=self.time, halt_start=self.time)
            self._next_vid += 1
            lane.queue.append(vehicle)
            self.vehicles_in_network += 1
            self.entered_total += 1
            if stats is not None:
                stats.seen_lifetime[vehicle.vid] = 0.0

    def inject_moving(self, intersection: int, approach: str, lane_index: int, queue_join_time: int) -> None:
        """Place one moving vehicle in a lane, reaching the stop line at the given time."""
        lane = self.network.intersections[intersection].lanes[approach][lane_index]
        if lane.full:
            raise ConfigError("cannot inject into a full lane")
        if queue_join_time < self.time:
            raise ConfigError("queue_join_time lies in the past")
        vehicle = Vehicle(self._next_vid, queue_join_time=queue_join_time)
        self._next_vid += 1
        lane.moving.append(vehicle)
        self.vehicles_in_network += 1
        self.entered_total += 1
        stats = self._stats.get(id(lane))
        if stats is not None:
            stats.entered += 1
            stats.seen_lifetime[vehicle.vid] = 0.0


def config_digest(config: NetworkConfig, attacks, duration: int) -> str:
    payload = {
        "network": config.as_dict(),
        "attacks": [e.as_dict() for e in attacks],
        "duration": duration,
    }
    return sha256_bytes(canonical_json(payload).encode("utf-8"))


def run_scenario(
    config: NetworkConfig,
    attacks: list[AttackEvent] | tuple[AttackEvent, ...] = (),
    duration: int = 3600,
    monitor: int | None = None,
) -> RecordLog:
    """Run the full loop and return the monitored intersection's records."""
    if duration <= 0 or duration % COLLECT_PERIOD != 0:
        raise ConfigError(f"duration must be a positive multiple of {COLLECT_PERIOD} s")
    sim = Simulation(config, attacks=attacks, monitor=monitor)
    records: list[DetectorRecord] = []
    for t in range(duration):
        sim.step()
        if sim.time % COLLECT_PERIOD == 0:
            records.extend(sim.sample_detectors())
    return RecordLog(
        records=records,
        timeline=[e.as_dict() for e in sim.attacks],
        seed=config.seed,
        config_digest=config_digest(config, sim.attacks, duration),
        monitored_intersection=sim.monitored,
        detector_ids=[lane.detector_id for lane in sim._detector_lanes],
        duration=duration,
    )
