"""KernelSHAP over the 23 detector-feature columns."""
from __future__ import annotations

import itertools
import math
import warnings

import numpy as np

from ..errors import ConfigError
from .attribution import Attribution, Granularity, Method, as_predict_fn, batched_predict


def _mask_columns(x: np.ndarray, baseline: np.ndarray, masks: np.ndarray) -> np.ndarray:
    keep = masks.astype(bool)[:, None, None, :]
    return np.where(keep, x[None], baseline[None])


def _size_weights(m: int) -> np.ndarray:
    """Total Shapley-kernel mass per coalition size, normalized to sum 1."""
    w = np.array([(m - 1) / (s * (m - s)) for s in range(1, m)])
    return w / w.sum()


def _exact_rows(m: int) -> tuple[np.ndarray, np.ndarray]:
    masks = []
    weights = []
    for s in range(1, m):
        pi = (m - 1) / (math.comb(m, s) * s * (m - s))
        for combo in itertools.combinations(range(m), s):
            row = np.zeros(m)
            row[list(combo)] = 1.0
            masks.append(row)
            weights.append(pi)
    return np.array(masks), np.array(weights)


def _sampled_rows(m: int, budget: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate small/large coalition sizes fully, sample the middle.

    Fully enumerated sizes get their analytic kernel weight; sampled rows
    share the leftover kernel mass in proportion to how often they were
    drawn, the kernel itself acting as the sampling distribution.
    """
    size_mass = _size_weights(m)
    masks: list[np.ndarray] = []
    weights: list[float] = []
    enumerated: set[int] = set()
    left = budget
    for low in range(1, m // 2 + 1):
        pair = {low, m - low}
        needed = sum(math.comb(m, s) for s in pair)
        if needed > left:
            break
        for s in sorted(pair):
            per_row = size_mass[s - 1] / math.comb(m, s)
            for combo in itertools.combinations(range(m), s):
                row = np.zeros(m)
                row[list(combo)] = 1.0
                masks.append(row)
                weights.append(per_row)
            enumerated.add(s)
        left -= needed

    remaining_sizes = [s for s in range(1, m) if s not in enumerated]
    if remaining_sizes and left > 0:
        probs = np.array([size_mass[s - 1] for s in remaining_sizes])
        probs /= probs.sum()
        remaining_mass = float(sum(size_mass[s - 1] for s in remaining_sizes))
        tally: dict[tuple, int] = {}
        for _ in range(left):
            s = remaining_sizes[int(rng.choice(len(remaining_sizes), p=probs))]
            combo = tuple(sorted(rng.permutation(m)[:s].tolist()))
            tally[combo] = tally.get(combo, 0) + 1
        for combo, count in sorted(tally.items()):
            row = np.zeros(m)
            row[list(combo)] = 1.0
            masks.append(row)
            weights.append(remaining_mass * count / left)
    return np.array(masks), np.array(weights)


EXACT_LIMIT = 12


def kernel_shap(
    model,
    x: np.ndarray,
    baseline: np.ndarray,
    n_coalitions: int = 2048,
    seed: int = 0,
) -> Attribution:
    """Column attributions from the Shapley-kernel weighted regression.

    Masking a column swaps it for the baseline column across all channels
    and rows. With 12 or fewer columns every coalition is enumerated and
    the result equals exact Shapley values; the efficiency identity
    sum(phi) + base = f(x) is enforced by construction either way.
    """
    predict = as_predict_fn(model)
    x = np.asarray(x, dtype=np.float64)
    baseline = np.asarray(baseline, dtype=np.float64)
    if x.ndim != 3:
        raise ConfigError(f"expected one (C, R, W) sample, got shape {x.shape}")
    if baseline.shape != x.shape:
        raise ConfigError(f"baseline shape {baseline.shape} does not match input {x.shape}")
    m = x.shape[-1]
    if m < 2:
        raise ConfigError("need at least 2 columns to attribute")

    f0 = float(batched_predict(predict, baseline[None])[0])
    fx = float(batched_predict(predict, x[None])[0])
    exact = m <= EXACT_LIMIT

    attempt_seed = seed
    for attempt in range(4):
        rng = np.random.default_rng(attempt_seed)
        if exact:
            masks, weights = _exact_rows(m)
        else:
            masks, weights = _sampled_rows(m, n_coalitions, rng)
        values = batched_predict(predict, _mask_columns(x, baseline, masks))

        adjusted = values - f0 - masks[:, -1] * (fx - f0)
        design = masks[:, :-1] - masks[:, [-1]]
        weighted = design * weights[:, None]
        gram = design.T @ weighted
        rhs = weighted.T @ adjusted
        try:
            head = np.linalg.solve(gram, rhs)
            break
        except np.linalg.LinAlgError:
            if attempt == 3 or exact:
                warnings.warn("singular attribution system; falling back to least squares")
                head = np.linalg.lstsq(gram, rhs, rcond=None)[0]
                break
            attempt_seed += 1
            warnings.warn(f"singular attribution system; resampling with seed {attempt_seed}")

    phi = np.empty(m)
    phi[:-1] = head
    phi[-1] = (fx - f0) - head.sum()
    return Attribution(
        method=Method.SHAP,
        granularity=Granularity.COLUMN,
        scores={j: float(phi[j]) for j in range(m)},
        base_value=f0,
        metadata={
            "mode": "exact" if exact else "sampled",
            "n_samples": int(masks.shape[0]),
            "seed": seed,
            "baseline": "control_mean",
            "f_x": fx,
        },
    )
