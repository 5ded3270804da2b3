"""Amortized Bayesian inference for compartmental epidemic models."""

from ._core import (
    Posterior,
    __version__,
    param_names,
    sample_prior,
    simulate,
    train,
)

__all__ = [
    "Posterior",
    "__version__",
    "param_names",
    "sample_prior",
    "simulate",
    "train",
]
