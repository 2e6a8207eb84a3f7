"""Model-agnostic explanations plus PCA projection."""
from .attribution import (
    Attribution,
    Granularity,
    Method,
    as_predict_fn,
    batched_predict,
)
from .lime import lime_explain
from .occlusion import BaselinePolicy, control_baseline, occlusion_map
from .pca import PcaModel, pca_fit, pca_project, select_components
from .shap import EXACT_LIMIT, kernel_shap

__all__ = [
    "Attribution",
    "Granularity",
    "Method",
    "as_predict_fn",
    "batched_predict",
    "lime_explain",
    "BaselinePolicy",
    "control_baseline",
    "occlusion_map",
    "PcaModel",
    "pca_fit",
    "pca_project",
    "select_components",
    "EXACT_LIMIT",
    "kernel_shap",
]
