"""Group detector rows into fixed-size window matrices and layer statistics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, DataFormatError
from ..simnet.records import NUM_FEATURES, DetectorRecord, Label

WINDOW_ROWS = (9, 18, 36)


@dataclass(frozen=True)
class WindowMatrix:
    """R consecutive detector rows plus the majority label for the block."""

    values: np.ndarray          # (R, 23)
    label: Label
    window_begin: float
    window_end: float

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 2 or vals.shape[1] != NUM_FEATURES:
            raise DataFormatError(f"window must be R x {NUM_FEATURES}, got {vals.shape}")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "label", Label(self.label))

    @property
    def rows(self) -> int:
        return self.values.shape[0]


def window_stream(records: list[DetectorRecord], rows: int) -> list[WindowMatrix]:
    """Cut the record stream into consecutive non-overlapping R-row blocks.

    A block is HACKED when at least half of its rows are; the trailing
    partial block is dropped so every window has the same shape.
    """
    if rows not in WINDOW_ROWS:
        raise ConfigError(f"window rows must be one of {WINDOW_ROWS}, got {rows}")
    windows = []
    for start in range(0, len(records) - rows + 1, rows):
        block = records[start : start + rows]
        hacked = sum(1 for r in block if r.label == Label.HACKED)
        label = Label.HACKED if 2 * hacked >= rows else Label.NORMAL
        windows.append(
            WindowMatrix(
                values=np.stack([r.features for r in block]),
                label=label,
                window_begin=block[0].begin,
                window_end=block[-1].end,
            )
        )
    return windows


def control_records(records: list[DetectorRecord]) -> list[DetectorRecord]:
    """Rows collected while no attack touched the monitored intersection."""
    return [r for r in records if r.label == Label.NORMAL]


@dataclass(frozen=True)
class ControlStats:
    """Cell-wise mean/std over R-row batches of normalized control traffic."""

    mean: np.ndarray            # (R, 23)
    std: np.ndarray             # (R, 23), population std, >= 0
    batches: int

    def __post_init__(self):
        m = np.asarray(self.mean, dtype=np.float64)
        s = np.asarray(self.std, dtype=np.float64)
        if m.shape != s.shape or m.ndim != 2 or m.shape[1] != NUM_FEATURES:
            raise DataFormatError(f"control stats must be R x {NUM_FEATURES}")
        if np.any(s < 0):
            raise DataFormatError("negative control standard deviation")
        object.__setattr__(self, "mean", m)
        object.__setattr__(self, "std", s)

    def as_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist(), "batches": self.batches}

    @classmethod
    def from_dict(cls, raw: dict) -> "ControlStats":
        return cls(
            np.asarray(raw["mean"], dtype=np.float64),
            np.asarray(raw["std"], dtype=np.float64),
            int(raw["batches"]),
        )


def fit_control_stats(control: np.ndarray, rows: int) -> ControlStats:
    """Stack normalized control rows into R-row batches and reduce cell-wise."""
    mat = np.asarray(control, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[1] != NUM_FEATURES:
        raise DataFormatError(f"control matrix must be (N, {NUM_FEATURES})")
    n_batches = mat.shape[0] // rows
    if n_batches < 2:
        raise ConfigError(
            f"need at least 2 full control batches of {rows} rows, have {n_batches}"
        )
    batches = mat[: n_batches * rows].reshape(n_batches, rows, NUM_FEATURES)
    return ControlStats(batches.mean(axis=0), batches.std(axis=0), n_batches)


def layered_tensor(window_values: np.ndarray, stats: ControlStats) -> np.ndarray:
    """Return the 3 x R x 23 tensor: raw window, control mean, control std."""
    vals = np.asarray(window_values, dtype=np.float64)
    if vals.shape != stats.mean.shape:
        raise DataFormatError(
            f"window shape {vals.shape} does not match control stats {stats.mean.shape}"
        )
    return np.stack([vals, stats.mean, stats.std])
