"""Min-max rescaling of detector features to the unit interval."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataFormatError
from ..simnet.records import NUM_FEATURES


@dataclass(frozen=True)
class NormalizationStats:
    """Per-feature min/max fitted on training rows.

    Features whose min equals max carry no information at train time; they
    are flagged and always map to 0 so test-time values cannot explode.
    """

    minimum: np.ndarray
    maximum: np.ndarray
    fitted_on: str = ""
    degenerate: np.ndarray = field(init=False)

    def __post_init__(self):
        lo = np.asarray(self.minimum, dtype=np.float64)
        hi = np.asarray(self.maximum, dtype=np.float64)
        if lo.shape != (NUM_FEATURES,) or hi.shape != (NUM_FEATURES,):
            raise DataFormatError(
                f"stats need {NUM_FEATURES}-vectors, got {lo.shape} and {hi.shape}"
            )
        if np.any(hi < lo):
            raise DataFormatError("per-feature max below min")
        object.__setattr__(self, "minimum", lo)
        object.__setattr__(self, "maximum", hi)
        object.__setattr__(self, "degenerate", hi == lo)

    def as_dict(self) -> dict:
        return {
            "minimum": self.minimum.tolist(),
            "maximum": self.maximum.tolist(),
            "fitted_on": self.fitted_on,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "NormalizationStats":
        return cls(
            np.asarray(raw["minimum"], dtype=np.float64),
            np.asarray(raw["maximum"], dtype=np.float64),
            str(raw.get("fitted_on", "")),
        )


def _as_feature_matrix(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        mat = np.asarray(rows, dtype=np.float64)
    else:
        mat = np.asarray([r.features for r in rows], dtype=np.float64)
    if mat.ndim == 1:
        mat = mat[None, :]
    if mat.ndim != 2 or mat.shape[1] != NUM_FEATURES:
        raise DataFormatError(f"expected rows of {NUM_FEATURES} features, got shape {mat.shape}")
    return mat


def fit_minmax(rows, fitted_on: str = "") -> NormalizationStats:
    """Fit per-feature min/max over detector records or an (N, 23) matrix."""
    mat = _as_feature_matrix(rows)
    if mat.shape[0] == 0:
        raise ConfigError("cannot fit normalization on zero rows")
    return NormalizationStats(mat.min(axis=0), mat.max(axis=0), fitted_on)


def apply_minmax(values: np.ndarray, stats: NormalizationStats) -> np.ndarray:
    """Rescale to [0, 1] along the last axis; clamps out-of-range inputs.

    Accepts any array whose trailing dimension is the feature axis, so a
    single 23-vector, an (N, 23) matrix, and an (N, R, 23) window stack all
    work unchanged.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.shape[-1] != NUM_FEATURES:
        raise DataFormatError(f"trailing axis must have {NUM_FEATURES} features")
    span = stats.maximum - stats.minimum
    safe = np.where(stats.degenerate, 1.0, span)
    scaled = (arr - stats.minimum) / safe
    scaled = np.where(stats.degenerate, 0.0, scaled)
    return np.clip(scaled, 0.0, 1.0)
