"""Training loop, evaluation metrics, and their report formats."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .model import CnnModel
from .optim import AdamState, adam_step


def train(
    model: CnnModel,
    inputs: np.ndarray,
    labels: np.ndarray,
    epochs: int = 10,
    batch_size: int = 32,
    seed: int = 0,
    lr: float = 0.001,
):
    """Adam/BCE loop: fresh shuffle each epoch, final partial batch kept.

    The model is updated in place; returns (model, per-epoch mean loss).
    """
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    n = inputs.shape[0]
    if n == 0:
        raise ConfigError("cannot train on an empty dataset")
    if inputs.shape[1:] != model.input_shape:
        raise ConfigError(
            f"dataset samples {inputs.shape[1:]} do not match model {model.input_shape}"
        )
    state = AdamState.for_params(model.params, lr=lr)
    rng = np.random.default_rng(seed)
    history = []
    for _ in range(epochs):
        order = rng.permutation(n)
        running = 0.0
        for start in range(0, n, batch_size):
            batch = order[start : start + batch_size]
            loss, grads = model.loss_and_grads(inputs[batch], labels[batch])
            adam_step(model.params, grads, state)
            running += loss * batch.size
        history.append(running / n)
    return model, history


def predict_in_batches(predict, inputs: np.ndarray, batch_size: int = 256) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    parts = [
        np.asarray(predict(inputs[start : start + batch_size]), dtype=np.float64)
        for start in range(0, inputs.shape[0], batch_size)
    ]
    return np.concatenate(parts) if parts else np.empty(0)


@dataclass(frozen=True)
class ClassReport:
    """One-vs-rest confusion counts for a chosen positive class."""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def as_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
        }


@dataclass(frozen=True)
class Metrics:
    """Accuracy plus per-class reports under both positive-class readings.

    The hacked-positive row is the headline; the normal-positive row is
    emitted alongside so either convention can be compared directly.
    """

    accuracy: float
    hacked: ClassReport
    normal: ClassReport
    n: int

    @property
    def macro_precision(self) -> float:
        return (self.hacked.precision + self.normal.precision) / 2

    @property
    def macro_recall(self) -> float:
        return (self.hacked.recall + self.normal.recall) / 2

    @property
    def macro_f1(self) -> float:
        return (self.hacked.f1 + self.normal.f1) / 2

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "n": self.n,
            "hacked_positive": self.hacked.as_dict(),
            "normal_positive": self.normal.as_dict(),
            "macro": {
                "precision": self.macro_precision,
                "recall": self.macro_recall,
                "f1": self.macro_f1,
            },
        }

    def format_table(self) -> str:
        rows = [
            ("hacked-positive", self.hacked.precision, self.hacked.recall, self.hacked.f1),
            ("normal-positive", self.normal.precision, self.normal.recall, self.normal.f1),
            ("macro", self.macro_precision, self.macro_recall, self.macro_f1),
        ]
        lines = [
            f"{'Positive class':<16} {'Accuracy (%)':>12} {'Precision':>10} {'Recall':>8} {'F1-Score':>9}",
        ]
        for name, precision, recall, f1 in rows:
            lines.append(
                f"{name:<16} {100 * self.accuracy:>12.2f} {precision:>10.2f} "
                f"{recall:>8.2f} {f1:>9.2f}"
            )
        return "\n".join(lines)


def metrics_from_predictions(true_labels: np.ndarray, predicted: np.ndarray) -> Metrics:
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    n = true_labels.shape[0]
    if n == 0:
        raise ConfigError("cannot score an empty test set")

    def report(positive: int) -> ClassReport:
        return ClassReport(
            tp=int(((true_labels == positive) & (predicted == positive)).sum()),
            fp=int(((true_labels != positive) & (predicted == positive)).sum()),
            tn=int(((true_labels != positive) & (predicted != positive)).sum()),
            fn=int(((true_labels == positive) & (predicted != positive)).sum()),
        )

    return Metrics(
        accuracy=float((true_labels == predicted).sum() / n),
        hacked=report(0),
        normal=report(1),
        n=n,
    )


def evaluate(model, inputs: np.ndarray, labels: np.ndarray, threshold: float = 0.5) -> Metrics:
    """Score a predictor on a labeled set; prediction is 1 when p >= threshold."""
    predict = model.predict if hasattr(model, "predict") else model
    probs = predict_in_batches(predict, inputs)
    predicted = (probs >= threshold).astype(np.int64)
    return metrics_from_predictions(labels, predicted)
