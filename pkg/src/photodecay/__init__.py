"""Exponential decay-time modelling and estimation for single-photon emission data."""

__version__ = "0.1.0"

from .errors import (
    DegenerateDataError,
    DomainError,
    EmptyInputError,
    FormatError,
    ParseError,
    RangeError,
)
from .dist import ExpParam, FockProbs, HypoexpParams
from .sample import ArrivalSample, CensoredView, SeededRng, sample_exp, sample_hypoexp, type2_censor
from .estimate import Method, RateEstimate, ScaleEstimate, estimate_censored, estimate_complete

__all__ = [
    "__version__",
    "ArrivalSample",
    "CensoredView",
    "DegenerateDataError",
    "DomainError",
    "EmptyInputError",
    "ExpParam",
    "FockProbs",
    "FormatError",
    "HypoexpParams",
    "Method",
    "ParseError",
    "RangeError",
    "RateEstimate",
    "ScaleEstimate",
    "SeededRng",
    "estimate_censored",
    "estimate_complete",
    "sample_exp",
    "sample_hypoexp",
    "type2_censor",
]
