"""Nonlinear exponential Kantorovich sampling operators."""

import json as _json

from ._core import (
    EvaluationError,
    KantorovichOperator,
    KernelProfile,
    PreconditionError,
    ResponseFamily,
    SamplingScheme,
    Signal,
    ValidationError,
    discrete_moment,
    fit_rate,
    log_modulus,
    make_profile,
    make_response,
    make_signal,
    mellin_derivative,
    modular,
    set_worker_count,
)
from ._core import run_experiment as _run_experiment

__version__ = "0.1.0"


def run_experiment(config):
    """Run an experiment from a dict (or JSON string); returns (passed, report)."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_experiment(config)


__all__ = [
    "EvaluationError",
    "KantorovichOperator",
    "KernelProfile",
    "PreconditionError",
    "ResponseFamily",
    "SamplingScheme",
    "Signal",
    "ValidationError",
    "discrete_moment",
    "fit_rate",
    "log_modulus",
    "make_profile",
    "make_response",
    "make_signal",
    "mellin_derivative",
    "modular",
    "run_experiment",
    "set_worker_count",
]
