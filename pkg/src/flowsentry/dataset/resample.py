"""Minority oversampling by interpolation between nearest neighbors."""
from __future__ import annotations

import numpy as np

from ..errors import ConfigError


def smote(
    inputs: np.ndarray,
    labels: np.ndarray,
    k: int = 5,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """Grow the minority class to match the majority.

    Every synthetic sample is x + u * (z - x) for a minority sample x, one
    of its k nearest minority neighbors z (Euclidean on the flattened
    sample) and u ~ Uniform(0, 1), so new points lie on segments between
    existing minority pairs. Balanced input comes back untouched.
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if inputs.shape[0] != labels.shape[0]:
        raise ConfigError("inputs and labels disagree on sample count")
    classes, counts = np.unique(labels, return_counts=True)
    if classes.size != 2:
        raise ConfigError(f"resampling needs exactly 2 classes, found {classes.size}")
    if counts[0] == counts[1]:
        return inputs, labels
    minority_label = classes[np.argmin(counts)]
    minority_count = counts.min()
    if minority_count < 2:
        raise ConfigError("minority class has a single sample; no neighbor to interpolate")

    sample_shape = inputs.shape[1:]
    flat = inputs.reshape(inputs.shape[0], -1)
    minority = flat[labels == minority_label]
    k_eff = min(k, minority_count - 1)

    # Pairwise distances within the minority; self excluded via the diagonal.
    diff = minority[:, None, :] - minority[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    np.fill_diagonal(dist, np.inf)
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]

    rng = np.random.default_rng(seed)
    need = int(counts.max() - minority_count)
    synthetic = np.empty((need, flat.shape[1]), dtype=np.float64)
    for row in range(need):
        i = int(rng.integers(minority_count))
        z = minority[neighbors[i, int(rng.integers(k_eff))]]
        u = rng.random()
        synthetic[row] = minority[i] + u * (z - minority[i])

    grown = np.concatenate([flat, synthetic])
    grown_labels = np.concatenate([labels, np.full(need, minority_label, dtype=np.int64)])
    order = rng.permutation(grown.shape[0])
    return grown[order].reshape((-1,) + sample_shape), grown_labels[order]
