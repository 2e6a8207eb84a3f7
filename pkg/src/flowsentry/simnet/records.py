"""Detector records: the 23-feature schema, CSV persistence, manifests."""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .._util import sha256_file, write_json, read_json
from ..errors import ConfigError, DataFormatError

NUM_FEATURES = 23

# Feature schema, index 0..22 == columns F1..F23 in the record CSV.
FEATURE_NAMES = (
    "sampledSeconds",            # F1  sum of vehicle-seconds over the interval
    "nVehEntered",               # F2
    "nVehLeft",                  # F3
    "nVehSeen",                  # F4
    "meanSpeed",                 # F5  space mean over ticks; halted=0, moving=free flow
    "meanTimeLoss",              # F6  halted seconds per vehicle seen
    "meanOccupancy",             # F7  percent of lane length covered by vehicles
    "maxOccupancy",              # F8
    "meanVehicleNumber",         # F9
    "maxVehicleNumber",          # F10
    "meanHaltingDuration",       # F11 mean elapsed continuous halt
    "maxHaltingDuration",        # F12 longest stop duration
    "haltingDurationSum",        # F13 lifetime halts of vehicles seen
    "intervalHaltingDurationMean",  # F14 halted seconds within this interval
    "intervalHaltingDurationMax",   # F15
    "intervalHaltingDurationSum",   # F16
    "startedHalts",              # F17 halt onsets this interval
    "meanJamLengthInVehicles",   # F18
    "meanJamLengthInMeters",     # F19
    "maxJamLengthInVehicles",    # F20
    "maxJamLengthInMeters",      # F21
    "jamLengthInVehiclesSum",    # F22
    "jamLengthInMetersSum",      # F23 total jam distance
)

FEATURE_COLUMNS = tuple(f"F{i + 1}" for i in range(NUM_FEATURES))

CSV_HEADER = ("begin", "end", "id", "target") + FEATURE_COLUMNS


class Label(IntEnum):
    """Binary record label; the CSV `target` column uses these values."""

    HACKED = 0
    NORMAL = 1


@dataclass
class DetectorRecord:
    """One lane-area detector's statistics for one 10-second interval."""

    begin: float
    end: float
    detector_id: str
    label: Label
    features: np.ndarray  # shape (23,), float64

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.shape != (NUM_FEATURES,):
            raise ValueError(f"expected {NUM_FEATURES} features, got {self.features.shape}")


@dataclass
class RecordLog:
    """Ordered detector records for the monitored intersection plus metadata."""

    records: list[DetectorRecord]
    timeline: list[dict]        # resolved attack events as plain dicts
    seed: int
    config_digest: str
    monitored_intersection: int
    detector_ids: list[str]
    duration: int

    def feature_matrix(self) -> np.ndarray:
        return np.array([r.features for r in self.records], dtype=np.float64)

    def labels(self) -> np.ndarray:
        return np.array([int(r.label) for r in self.records], dtype=np.int64)

    def save(self, csv_path: str | Path, manifest_path: str | Path) -> None:
        csv_path, manifest_path = Path(csv_path), Path(manifest_path)
        try:
            with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(",".join(CSV_HEADER) + "\n")
                for rec in self.records:
                    cells = [
                        repr(int(rec.begin)),
                        repr(int(rec.end)),
                        rec.detector_id,
                        str(int(rec.label)),
                    ]
                    cells.extend(repr(float(v)) for v in rec.features)
                    fh.write(",".join(cells) + "\n")
        except OSError as exc:
            raise DataFormatError(f"cannot write record log to {csv_path}: {exc}") from exc
        write_json(
            manifest_path,
            {
                "kind": "record_log",
                "seed": self.seed,
                "config_digest": self.config_digest,
                "attack_timeline": self.timeline,
                "monitored_intersection": self.monitored_intersection,
                "detector_ids": self.detector_ids,
                "duration": self.duration,
                "record_count": len(self.records),
                "csv_digest": sha256_file(csv_path),
            },
        )


def load_record_log(csv_path: str | Path, manifest_path: str | Path) -> RecordLog:
    csv_path, manifest_path = Path(csv_path), Path(manifest_path)
    if not csv_path.exists():
        raise ConfigError(f"record CSV not found: {csv_path}")
    if not manifest_path.exists():
        raise ConfigError(f"record manifest not found: {manifest_path}")
    manifest = read_json(manifest_path)
    if manifest.get("kind") != "record_log":
        raise DataFormatError(f"{manifest_path} is not a record-log manifest")

    records = []
    with open(csv_path, "r", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split(",")
        if tuple(header) != CSV_HEADER:
            raise DataFormatError(f"unexpected record CSV header in {csv_path}")
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(CSV_HEADER):
                raise DataFormatError(f"{csv_path}:{lineno}: expected {len(CSV_HEADER)} columns")
            try:
                records.append(
                    DetectorRecord(
                        begin=float(parts[0]),
                        end=float(parts[1]),
                        detector_id=parts[2],
                        label=Label(int(parts[3])),
                        features=np.array([float(v) for v in parts[4:]], dtype=np.float64),
                    )
                )
            except ValueError as exc:
                raise DataFormatError(f"{csv_path}:{lineno}: {exc}") from exc

    return RecordLog(
        records=records,
        timeline=manifest["attack_timeline"],
        seed=manifest["seed"],
        config_digest=manifest["config_digest"],
        monitored_intersection=manifest["monitored_intersection"],
        detector_ids=manifest["detector_ids"],
        duration=manifest["duration"],
    )
