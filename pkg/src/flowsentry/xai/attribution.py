"""Shared attribution container for the explanation methods."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..simnet.records import FEATURE_NAMES


class Method(str, Enum):
    OCCLUSION = "OCCLUSION"
    LIME = "LIME"
    SHAP = "SHAP"


class Granularity(str, Enum):
    CELL = "CELL"
    COLUMN = "COLUMN"
    FLAT_FEATURE = "FLAT_FEATURE"


def as_predict_fn(model):
    """Accept either a model object with .predict or a bare callable."""
    return model.predict if hasattr(model, "predict") else model


def batched_predict(predict, inputs: np.ndarray, batch_size: int = 256) -> np.ndarray:
    parts = [
        np.asarray(predict(inputs[i : i + batch_size]), dtype=np.float64)
        for i in range(0, inputs.shape[0], batch_size)
    ]
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass
class Attribution:
    """Scores keyed by cell (row, col), column index, or flat index."""

    method: Method
    granularity: Granularity
    scores: dict
    base_value: float | None = None
    metadata: dict = field(default_factory=dict)

    def ranked(self, top_k: int | None = None) -> list[dict]:
        """Entries ordered by |score| descending, ties by index."""
        items = sorted(self.scores.items(), key=lambda kv: (-abs(kv[1]), str(kv[0])))
        if top_k is not None:
            items = items[:top_k]
        out = []
        for key, score in items:
            if self.granularity == Granularity.COLUMN:
                label = FEATURE_NAMES[key]
            elif self.granularity == Granularity.CELL:
                label = f"{key[0]},{key[1]}"
            else:
                label = str(key)
            direction = "normal" if score > 0 else ("hacked" if score < 0 else "neutral")
            out.append({"feature": label, "score": float(score), "direction": direction})
        return out

    def grid(self, shape: tuple) -> np.ndarray:
        """Dense (rows, cols) array for CELL scores; uncovered cells are 0."""
        out = np.zeros(shape, dtype=np.float64)
        for (r, c), score in self.scores.items():
            out[r, c] = score
        return out

    def as_dict(self) -> dict:
        if self.granularity == Granularity.CELL:
            scores = {f"{r},{c}": float(v) for (r, c), v in sorted(self.scores.items())}
        else:
            scores = {str(k): float(v) for k, v in sorted(self.scores.items())}
        return {
            "method": self.method.value,
            "granularity": self.granularity.value,
            "scores": scores,
            "base_value": self.base_value,
            "metadata": self.metadata,
            "ranked": self.ranked(),
        }
