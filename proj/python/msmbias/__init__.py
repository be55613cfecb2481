"""Bias from a misclassified binary confounder in conditional models and
IPW-estimated marginal structural models."""

from ._core import (
    BiasPair,
    DomainError,
    InvertedParams,
    LatentParams,
    ObservedSummary,
    bias_conditional,
    bias_curve,
    bias_msm,
    bias_pair,
    implied_observables,
    invert_observables,
    sensitivity,
    simulate,
)

__all__ = [
    "BiasPair",
    "DomainError",
    "InvertedParams",
    "LatentParams",
    "ObservedSummary",
    "bias_conditional",
    "bias_curve",
    "bias_msm",
    "bias_pair",
    "implied_observables",
    "invert_observables",
    "sensitivity",
    "simulate",
]
