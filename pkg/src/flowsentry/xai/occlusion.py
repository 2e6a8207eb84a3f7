"""Occlusion sensitivity: mask patches, measure the probability shift."""
from __future__ import annotations

from enum import Enum

import numpy as np

from ..errors import ConfigError
from .attribution import Attribution, Granularity, Method, as_predict_fn, batched_predict


class BaselinePolicy(str, Enum):
    ZERO = "ZERO"
    CONTROL_MEAN = "CONTROL_MEAN"


def control_baseline(mean: np.ndarray, std: np.ndarray, channels: int) -> np.ndarray:
    """Masking tensor for control-mean occlusion.

    Layer 0 is replaced by the control mean; the statistical layers are
    replaced by themselves, so occluding them is deliberately a no-op.
    """
    if channels == 3:
        return np.stack([mean, mean, std])
    return np.asarray(mean)[None]


def occlusion_map(
    model,
    x: np.ndarray,
    patch: tuple = (1, 1),
    stride: int = 1,
    policy: BaselinePolicy = BaselinePolicy.ZERO,
    baseline: np.ndarray | None = None,
) -> Attribution:
    """Score each cell by the largest |delta P| of any patch covering it."""
    predict = as_predict_fn(model)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 3:
        raise ConfigError(f"occlusion expects one (C, R, W) sample, got shape {x.shape}")
    c, rows, cols = x.shape
    ph, pw = patch
    if ph < 1 or pw < 1 or ph > rows or pw > cols:
        raise ConfigError(f"patch {patch} does not fit a {rows}x{cols} window")
    if stride < 1:
        raise ConfigError("stride must be positive")
    policy = BaselinePolicy(policy)
    if policy == BaselinePolicy.ZERO:
        mask = np.zeros_like(x)
    else:
        if baseline is None:
            raise ConfigError("CONTROL_MEAN policy needs a baseline tensor")
        mask = np.asarray(baseline, dtype=np.float64)
        if mask.shape != x.shape:
            raise ConfigError(f"baseline shape {mask.shape} does not match input {x.shape}")

    positions = [
        (r0, c0)
        for r0 in range(0, rows - ph + 1, stride)
        for c0 in range(0, cols - pw + 1, stride)
    ]
    occluded = np.repeat(x[None], len(positions), axis=0)
    for i, (r0, c0) in enumerate(positions):
        occluded[i, :, r0 : r0 + ph, c0 : c0 + pw] = mask[:, r0 : r0 + ph, c0 : c0 + pw]

    p_full = float(batched_predict(predict, x[None])[0])
    deltas = np.abs(p_full - batched_predict(predict, occluded))

    cell = np.zeros((rows, cols))
    covered = np.zeros((rows, cols), dtype=bool)
    for (r0, c0), delta in zip(positions, deltas):
        region = cell[r0 : r0 + ph, c0 : c0 + pw]
        np.maximum(region, delta, out=region)
        covered[r0 : r0 + ph, c0 : c0 + pw] = True
    scores = {
        (r, cc): float(cell[r, cc])
        for r in range(rows)
        for cc in range(cols)
        if covered[r, cc]
    }
    return Attribution(
        method=Method.OCCLUSION,
        granularity=Granularity.CELL,
        scores=scores,
        metadata={
            "patch": [ph, pw],
            "stride": stride,
            "baseline": policy.value,
            "n_samples": len(positions),
            "p_full": p_full,
        },
    )
