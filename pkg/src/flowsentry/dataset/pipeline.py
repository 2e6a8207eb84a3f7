"""End-to-end assembly of training material from a detector record log.

The order of operations matters for leakage hygiene: windows are cut from
the raw stream, the train/test split happens first, and only then are the
normalization statistics fitted (on training rows alone) and the minority
class rebalanced (training portion alone).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..simnet.records import RecordLog
from .normalize import NormalizationStats, apply_minmax, fit_minmax
from .resample import smote
from .splits import SplitDataset, split_indices
from .windows import ControlStats, control_records, fit_control_stats, window_stream


@dataclass
class DatasetBundle:
    """Everything later stages need: tensors, labels, fit statistics, lineage."""

    split: SplitDataset
    stats: NormalizationStats
    control: ControlStats | None
    control_rows: np.ndarray            # (Nc, 23) normalized control observations
    rows: int
    channels: int
    seed: int
    smote_applied: bool
    source_digest: str
    timeline: list
    test_window_begin: np.ndarray
    test_window_end: np.ndarray


def build_dataset(
    log: RecordLog,
    rows: int,
    seed: int = 0,
    layered: bool = False,
    balance: bool = True,
    ratio: float = 0.8,
    k_neighbors: int = 5,
    control_log: RecordLog | None = None,
) -> DatasetBundle:
    windows = window_stream(log.records, rows)
    if len(windows) < 5:
        raise ConfigError(f"only {len(windows)} windows of {rows} rows; need at least 5")
    raw = np.stack([w.values for w in windows])
    labels = np.array([int(w.label) for w in windows], dtype=np.int64)
    begins = np.array([w.window_begin for w in windows])
    ends = np.array([w.window_end for w in windows])

    train_idx, test_idx = split_indices(len(windows), ratio, seed)
    stats = fit_minmax(raw[train_idx].reshape(-1, raw.shape[-1]), fitted_on=log.config_digest)
    train = apply_minmax(raw[train_idx], stats)
    test = apply_minmax(raw[test_idx], stats)

    control_source = control_log.records if control_log is not None else log.records
    control_rows = apply_minmax(
        np.asarray([r.features for r in control_records(control_source)], dtype=np.float64)
        if control_records(control_source)
        else np.empty((0, raw.shape[-1])),
        stats,
    )
    control: ControlStats | None = None
    if control_rows.shape[0] >= 2 * rows:
        control = fit_control_stats(control_rows, rows)

    if layered:
        if control is None:
            raise ConfigError("layered tensors need at least 2 full batches of control rows")
        train = np.stack([train, *_tiled(control, train.shape[0])], axis=1)
        test = np.stack([test, *_tiled(control, test.shape[0])], axis=1)
        channels = 3
    else:
        train = train[:, None]
        test = test[:, None]
        channels = 1

    train_labels = labels[train_idx]
    smote_applied = False
    if balance:
        classes = np.unique(train_labels)
        if classes.size == 2 and np.bincount(train_labels.astype(int)).min() >= 2:
            balanced, balanced_labels = smote(train, train_labels, k=k_neighbors, seed=seed)
            smote_applied = balanced.shape[0] != train.shape[0]
            train, train_labels = balanced, balanced_labels

    return DatasetBundle(
        split=SplitDataset(
            train_inputs=train,
            train_labels=train_labels,
            test_inputs=test,
            test_labels=labels[test_idx],
            ratio=ratio,
            seed=seed,
        ),
        stats=stats,
        control=control,
        control_rows=control_rows,
        rows=rows,
        channels=channels,
        seed=seed,
        smote_applied=smote_applied,
        source_digest=log.config_digest,
        timeline=list(log.timeline),
        test_window_begin=begins[test_idx],
        test_window_end=ends[test_idx],
    )


def _tiled(control: ControlStats, count: int) -> tuple[np.ndarray, np.ndarray]:
    mean = np.broadcast_to(control.mean, (count,) + control.mean.shape)
    std = np.broadcast_to(control.std, (count,) + control.std.shape)
    return mean, std
