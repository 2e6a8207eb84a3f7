"""Principal component projection for dataset visualization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray                        # (F,)
    components: np.ndarray                  # (K, F), orthonormal rows
    explained_variance_ratio: np.ndarray    # (K,), non-increasing, sums to 1

    def as_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "components": self.components.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }


def pca_fit(data: np.ndarray) -> PcaModel:
    """Principal axes via singular value decomposition of the centered data."""
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ConfigError(f"need an (N >= 2, F) matrix, got shape {data.shape}")
    mean = data.mean(axis=0)
    centered = data - mean
    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(1.0, float(np.abs(centered).max()))
    if singular.max(initial=0.0) <= 1e-12 * scale:
        raise ConfigError("data has zero variance; nothing to project")
    power = singular**2
    ratios = power / power.sum()
    # deterministic orientation: largest-magnitude entry of each axis positive
    for row in vt:
        peak = np.argmax(np.abs(row))
        if row[peak] < 0:
            row *= -1.0
    return PcaModel(mean=mean, components=vt, explained_variance_ratio=ratios)


def select_components(model: PcaModel, variance_target: float) -> int:
    """Smallest k whose cumulative explained-variance ratio meets the target."""
    if not 0.0 < variance_target <= 1.0:
        raise ConfigError(f"variance target must lie in (0, 1], got {variance_target}")
    cumulative = np.cumsum(model.explained_variance_ratio)
    hits = np.nonzero(cumulative >= variance_target - 1e-12)[0]
    if hits.size == 0:
        raise ConfigError(f"components explain only {cumulative[-1]:.6f} of variance")
    return int(hits[0]) + 1


def pca_project(
    model: PcaModel,
    data: np.ndarray,
    k: int | None = None,
    variance_target: float | None = None,
) -> np.ndarray:
    """Coordinates in the leading-k component basis (k from the variance
    target when not given explicitly; target defaults to 0.90)."""
    data = np.asarray(data, dtype=np.float64)
    if k is None:
        k = select_components(model, 0.90 if variance_target is None else variance_target)
    if not 1 <= k <= model.components.shape[0]:
        raise ConfigError(f"k={k} outside 1..{model.components.shape[0]}")
    return (data - model.mean) @ model.components[:k].T
