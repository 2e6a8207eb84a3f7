"""From-scratch CNN: ops, model, optimizer, training loop, metrics."""
from .model import (
    CONV1_FILTERS,
    CONV2_FILTERS,
    HIDDEN_UNITS,
    PARAM_NAMES,
    CnnModel,
    flatten_dim,
    load_model,
    save_model,
)
from .ops import (
    BCE_CLAMP,
    bce_loss,
    conv2d,
    conv2d_backward,
    maxpool2,
    maxpool2_backward,
    relu,
    sigmoid,
)
from .optim import AdamState, adam_step
from .training import (
    ClassReport,
    Metrics,
    evaluate,
    metrics_from_predictions,
    predict_in_batches,
    train,
)

__all__ = [
    "CONV1_FILTERS",
    "CONV2_FILTERS",
    "HIDDEN_UNITS",
    "PARAM_NAMES",
    "CnnModel",
    "flatten_dim",
    "load_model",
    "save_model",
    "BCE_CLAMP",
    "bce_loss",
    "conv2d",
    "conv2d_backward",
    "maxpool2",
    "maxpool2_backward",
    "relu",
    "sigmoid",
    "AdamState",
    "adam_step",
    "ClassReport",
    "Metrics",
    "evaluate",
    "metrics_from_predictions",
    "predict_in_batches",
    "train",
]
