"""Simulation and verification engine for skew Brownian motion with
countably many concentric permeable membranes.

The C++ core does the work; this package re-exports its surface. Build a
Model from JSON config text, then simulate, verify, or analyze:

    import json, skewsim
    cfg = {"dim": 3, "membranes": {"m0": 1.0, "inner": [[0.5, 2.0]]}}
    model = skewsim.Model(json.dumps(cfg))
    model.coefficients()["alpha"]
"""

from ._core import (
    EvaluationError,
    HypothesisError,
    Model,
    UsageError,
    ValidationError,
    skew_alpha,
)

__version__ = "1.0.0"

__all__ = [
    "EvaluationError",
    "HypothesisError",
    "Model",
    "UsageError",
    "ValidationError",
    "skew_alpha",
    "__version__",
]
