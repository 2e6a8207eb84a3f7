"""Dataset assembly: normalization, windowing, balancing, persistence."""
from .normalize import NormalizationStats, apply_minmax, fit_minmax
from .pipeline import DatasetBundle, build_dataset
from .resample import smote
from .splits import SplitDataset, split, split_indices
from .store import export_csv, load_array, load_bundle, save_array, save_bundle
from .windows import (
    WINDOW_ROWS,
    ControlStats,
    WindowMatrix,
    control_records,
    fit_control_stats,
    layered_tensor,
    window_stream,
)

__all__ = [
    "NormalizationStats",
    "apply_minmax",
    "fit_minmax",
    "DatasetBundle",
    "build_dataset",
    "smote",
    "SplitDataset",
    "split",
    "split_indices",
    "export_csv",
    "load_array",
    "load_bundle",
    "save_array",
    "save_bundle",
    "WINDOW_ROWS",
    "ControlStats",
    "WindowMatrix",
    "control_records",
    "fit_control_stats",
    "layered_tensor",
    "window_stream",
]
