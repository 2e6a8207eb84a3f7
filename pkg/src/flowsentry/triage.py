"""Error triage: collect misclassified windows, attribute, categorize.

Two failure modes get named categories. A false alarm right after an
attack ends is usually residual congestion still draining (the window is
labeled normal but looks hacked). A missed attack under very light
traffic has no congestion signature for the model to see.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError
from .simnet.records import Label
from .xai.attribution import Attribution, batched_predict
from .xai.shap import kernel_shap

F9_COLUMN = 8          # meanVehicleNumber


class Category(str, Enum):
    TRANSITIONAL_DATA = "TRANSITIONAL_DATA"
    MODEL_LIMITATION = "MODEL_LIMITATION"
    UNCATEGORIZED = "UNCATEGORIZED"


@dataclass(frozen=True)
class TriageThresholds:
    recover_seconds: float = 120.0
    low_traffic_percentile: float = 25.0

    def as_dict(self) -> dict:
        return {
            "recover_seconds": self.recover_seconds,
            "low_traffic_percentile": self.low_traffic_percentile,
        }


@dataclass
class ErrorCase:
    index: int
    window_begin: float
    window_end: float
    true_label: Label
    predicted_label: Label
    probability: float
    shap: Attribution | None
    seconds_since_attack_end: float       # inf when no attack ended earlier
    window_mean_f9: float
    control_f9_threshold: float
    category: Category = Category.UNCATEGORIZED

    def as_dict(self) -> dict:
        since = self.seconds_since_attack_end
        return {
            "index": self.index,
            "window_begin": self.window_begin,
            "window_end": self.window_end,
            "true_label": int(self.true_label),
            "predicted_label": int(self.predicted_label),
            "probability": self.probability,
            "category": self.category.value,
            "seconds_since_attack_end": None if math.isinf(since) else since,
            "window_mean_f9": self.window_mean_f9,
            "control_f9_threshold": self.control_f9_threshold,
            "shap_top5": [] if self.shap is None else self.shap.ranked(5),
        }


def seconds_since_attack_end(window_begin: float, timeline: list[dict]) -> float:
    """Time from the most recent attack end at or before the window start."""
    ends = [float(e["end"]) for e in timeline if float(e["end"]) <= window_begin]
    return window_begin - max(ends) if ends else math.inf


def categorize(case: ErrorCase, thresholds: TriageThresholds) -> Category:
    """Pure rule on (true, predicted, context); SHAP is evidence, not input."""
    if case.true_label == Label.NORMAL and case.predicted_label == Label.HACKED:
        if 0.0 <= case.seconds_since_attack_end <= thresholds.recover_seconds:
            return Category.TRANSITIONAL_DATA
    if case.true_label == Label.HACKED and case.predicted_label == Label.NORMAL:
        if case.window_mean_f9 < case.control_f9_threshold:
            return Category.MODEL_LIMITATION
    return Category.UNCATEGORIZED


def collect_errors(
    model,
    inputs: np.ndarray,
    labels: np.ndarray,
    window_begin: np.ndarray,
    window_end: np.ndarray,
    timeline: list[dict],
    control_rows: np.ndarray,
    shap_baseline: np.ndarray | None = None,
    thresholds: TriageThresholds = TriageThresholds(),
    threshold: float = 0.5,
    n_coalitions: int = 2048,
    seed: int = 0,
    attach_shap: bool = True,
) -> list[ErrorCase]:
    """One case per misclassified window, ordered by window time."""
    if timeline is None:
        raise ConfigError("triage needs the attack timeline")
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    control_rows = np.asarray(control_rows, dtype=np.float64)
    if control_rows.shape[0] == 0:
        raise ConfigError("triage needs control rows for the low-traffic threshold")
    predict = model.predict if hasattr(model, "predict") else model
    probs = batched_predict(predict, inputs)
    predicted = (probs >= threshold).astype(np.int64)
    f9_threshold = float(
        np.percentile(control_rows[:, F9_COLUMN], thresholds.low_traffic_percentile)
    )
    if shap_baseline is None:
        column_means = control_rows.mean(axis=0)
        shap_baseline = np.broadcast_to(column_means, inputs.shape[1:]).copy()

    cases = []
    for i in np.nonzero(predicted != labels)[0]:
        attribution = None
        if attach_shap:
            attribution = kernel_shap(
                predict, inputs[i], shap_baseline, n_coalitions=n_coalitions, seed=seed
            )
        case = ErrorCase(
            index=int(i),
            window_begin=float(window_begin[i]),
            window_end=float(window_end[i]),
            true_label=Label(int(labels[i])),
            predicted_label=Label(int(predicted[i])),
            probability=float(probs[i]),
            shap=attribution,
            seconds_since_attack_end=seconds_since_attack_end(
                float(window_begin[i]), timeline
            ),
            window_mean_f9=float(inputs[i, 0, :, F9_COLUMN].mean()),
            control_f9_threshold=f9_threshold,
        )
        case.category = categorize(case, thresholds)
        cases.append(case)
    cases.sort(key=lambda c: (c.window_begin, c.index))
    return cases


@dataclass
class TriageReport:
    cases: list[ErrorCase]
    thresholds: TriageThresholds
    test_count: int
    counts: dict = field(init=False)

    def __post_init__(self):
        self.counts = {category.value: 0 for category in Category}
        for case in self.cases:
            self.counts[case.category.value] += 1

    def as_dict(self) -> dict:
        return {
            "kind": "triage_report",
            "schema_version": 1,
            "test_count": self.test_count,
            "error_count": len(self.cases),
            "counts": self.counts,
            "thresholds": self.thresholds.as_dict(),
            "cases": [case.as_dict() for case in self.cases],
        }

    def narrative(self) -> str:
        lines = [
            f"{len(self.cases)} misclassified windows out of {self.test_count} test windows.",
        ]
        for category in Category:
            lines.append(f"  {category.value}: {self.counts[category.value]}")
        for case in self.cases:
            true = Label(case.true_label).name
            pred = Label(case.predicted_label).name
            detail = f"window [{case.window_begin:g}, {case.window_end:g}) {true}->{pred}"
            if case.category == Category.TRANSITIONAL_DATA:
                detail += f", {case.seconds_since_attack_end:g}s after attack end"
            elif case.category == Category.MODEL_LIMITATION:
                detail += (
                    f", mean vehicle level {case.window_mean_f9:.4f} below control"
                    f" threshold {case.control_f9_threshold:.4f}"
                )
            if case.shap is not None and case.shap.ranked(1):
                top = case.shap.ranked(1)[0]
                detail += f", top factor {top['feature']} ({top['score']:+.4f})"
            lines.append(f"  [{case.category.value}] {detail}")
        return "\n".join(lines)


def build_report(cases, thresholds, test_count) -> TriageReport:
    return TriageReport(cases=list(cases), thresholds=thresholds, test_count=test_count)
