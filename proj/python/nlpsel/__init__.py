"""Bayesian variable selection for logistic regression with hyper-pMOM priors.

Covariate indices are 0-based throughout the Python API.
"""

from ._nlpsel import (
    NumericalFailure,
    default_lambda2,
    default_model_size_cap,
    fit,
    log_marginal,
    selection_metrics,
    simulate,
)

__all__ = [
    "NumericalFailure",
    "default_lambda2",
    "default_model_size_cap",
    "fit",
    "log_marginal",
    "selection_metrics",
    "simulate",
]
__version__ = "0.1.0"
