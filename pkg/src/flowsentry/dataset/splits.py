"""Deterministic train/test partitioning."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


@dataclass
class SplitDataset:
    train_inputs: np.ndarray
    train_labels: np.ndarray
    test_inputs: np.ndarray
    test_labels: np.ndarray
    ratio: float
    seed: int


def split_indices(n: int, ratio: float = 0.8, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Permute range(n) by seed and cut at floor(ratio * n)."""
    if n < 5:
        raise ConfigError(f"need at least 5 samples to split, have {n}")
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must lie in (0, 1), got {ratio}")
    order = np.random.default_rng(seed).permutation(n)
    cut = int(ratio * n)
    return order[:cut], order[cut:]


def split(inputs: np.ndarray, labels: np.ndarray, ratio: float = 0.8, seed: int = 0) -> SplitDataset:
    inputs = np.asarray(inputs)
    labels = np.asarray(labels)
    if labels.shape[0] != inputs.shape[0]:
        raise ConfigError(f"{inputs.shape[0]} inputs but {labels.shape[0]} labels")
    train, test = split_indices(inputs.shape[0], ratio, seed)
    return SplitDataset(
        train_inputs=inputs[train],
        train_labels=labels[train],
        test_inputs=inputs[test],
        test_labels=labels[test],
        ratio=ratio,
        seed=seed,
    )
