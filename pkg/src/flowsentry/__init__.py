"""Traffic-signal tampering workbench: simulation, detection, explanation.

The package is organized around one pipeline:

    simnet   -- deterministic grid simulation with an attack injector and
                lane-area detectors emitting 23-feature records every 10 s
    dataset  -- normalization, windowing, class rebalancing, train/test split
    neuralnet-- small from-scratch CNN (conv/pool/fc) with Adam + BCE
    xai      -- occlusion maps, LIME, KernelSHAP, PCA projections
    triage   -- misclassification collection and categorization
    cli      -- `flowsentry` command tying the stages together
"""

__version__ = "0.1.0"

from .errors import ConfigError, DataFormatError, DigestMismatchError, FlowSentryError

__all__ = [
    "ConfigError",
    "DataFormatError",
    "DigestMismatchError",
    "FlowSentryError",
    "__version__",
]
