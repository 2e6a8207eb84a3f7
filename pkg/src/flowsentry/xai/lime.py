"""Local surrogate explanation on the flattened input."""
from __future__ import annotations

import warnings

import numpy as np

from ..errors import ConfigError
from .attribution import Attribution, Granularity, Method, as_predict_fn, batched_predict


def lime_explain(
    model,
    x: np.ndarray,
    n_samples: int = 1000,
    kernel_width: float | None = None,
    ridge_lambda: float = 1e-3,
    top_k: int = 10,
    seed: int = 0,
    baseline: np.ndarray | None = None,
) -> Attribution:
    """Weighted ridge fit of the model on Bernoulli(0.5) mask neighbors.

    Masked entries fall back to the baseline (zero by default, the min-max
    floor). Positive coefficients push the prediction toward normal.
    """
    predict = as_predict_fn(model)
    x = np.asarray(x, dtype=np.float64)
    if n_samples < 50:
        raise ConfigError(f"need at least 50 perturbation samples, got {n_samples}")
    shape = x.shape
    flat = x.reshape(-1)
    m = flat.size
    base = np.zeros(m) if baseline is None else np.asarray(baseline, dtype=np.float64).reshape(-1)
    if base.size != m:
        raise ConfigError(f"baseline has {base.size} entries, input has {m}")

    rng = np.random.default_rng(seed)
    masks = rng.integers(0, 2, size=(n_samples, m)).astype(np.float64)
    perturbed = base + masks * (flat - base)
    outputs = batched_predict(predict, perturbed.reshape((n_samples,) + shape))

    sigma = 0.75 * np.sqrt(m) if kernel_width is None else float(kernel_width)
    masked_counts = m - masks.sum(axis=1)
    weights = np.exp(-masked_counts / sigma**2)        # d(z)^2 = masked count

    if float(np.ptp(outputs)) < 1e-12:
        warnings.warn("model output is constant over the neighborhood; zero attribution")
        coefs = np.zeros(m)
        r2 = 0.0
    else:
        design = np.concatenate([np.ones((n_samples, 1)), masks], axis=1)
        wd = design * weights[:, None]
        gram = design.T @ wd
        penalty = np.full(m + 1, ridge_lambda)
        penalty[0] = 0.0                               # intercept unpenalized
        gram[np.diag_indices_from(gram)] += penalty
        beta = np.linalg.solve(gram, wd.T @ outputs)
        coefs = beta[1:]
        fitted = design @ beta
        w_mean = float(np.sum(weights * outputs) / np.sum(weights))
        ss_res = float(np.sum(weights * (outputs - fitted) ** 2))
        ss_tot = float(np.sum(weights * (outputs - w_mean) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0

    order = np.argsort(-np.abs(coefs), kind="stable")[:top_k]
    return Attribution(
        method=Method.LIME,
        granularity=Granularity.FLAT_FEATURE,
        scores={int(i): float(coefs[i]) for i in order},
        metadata={
            "n_samples": n_samples,
            "kernel_width": sigma,
            "ridge_lambda": ridge_lambda,
            "seed": seed,
            "baseline": "zero" if baseline is None else "custom",
            "weighted_r2": r2,
            "top_k": top_k,
        },
    )
