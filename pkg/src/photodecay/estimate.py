"""
Point estimators and uncertainties for the exponential rate and scale.

Complete data use the sample mean; Type II censored data use the total
time on test ``T_r = sum(X_(1..r)) + (n - r) X_(r)``. Reported variances
are plug-in values: the unknown true parameter in each variance law is
replaced by its estimate.

========  ======================  ====================  ==================
method    rate                    scale                 variance (scale)
========  ======================  ====================  ==================
ME, MLE   n / sum(X)              sum(X) / n            beta**2 / n
BLUE      same as MLE             same as MLE           same as MLE
MVUE      (n - 1) / sum(X)        1 / rate              beta**2 / (n - 2)
========  ======================  ====================  ==================

For censored data replace ``n`` by ``r`` and ``sum(X)`` by ``T_r``. The
method of moments is defined only for complete data.

Sums are evaluated with :func:`math.fsum`, which is correctly rounded and
therefore independent of summation order; this is what makes the
censored estimator at ``r = n`` bit-identical to the complete-data one.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .errors import DegenerateDataError, DomainError
from .sample import ArrivalSample, CensoredView


class Method(str, enum.Enum):
    ME = "ME"
    MLE = "MLE"
    MVUE = "MVUE"
    BLUE = "BLUE"

    @classmethod
    def parse(cls, value: "str | Method") -> "Method":
        if isinstance(value, Method):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise DomainError(f"unknown method {value!r}; expected one of me, mle, mvue, blue") from None

    @property
    def min_count(self) -> int:
        """Smallest ``n`` (or ``r``) for which the estimate and its variance exist."""
        return 3 if self is Method.MVUE else 1


@dataclass(frozen=True)
class RateEstimate:
    lambda_hat: float
    variance: float
    stderr: float
    method: Method
    n: int
    r: int


@dataclass(frozen=True)
class ScaleEstimate:
    beta_hat: float
    variance: float
    stderr: float
    method: Method
    n: int
    r: int

    @property
    def recommended(self) -> bool:
        """False for the MVUE scale, whose variance exceeds the efficient MLE's."""
        return self.method is not Method.MVUE


def _variance_divisor(count: int, method: Method) -> int:
    return count - 2 if method is Method.MVUE else count


def scale_variance(beta: float, count: int, method: "Method | str" = Method.MLE) -> float:
    """Variance law of the scale estimator: ``beta**2/count`` (MVUE: ``count - 2``)."""
    method = Method.parse(method)
    d = _variance_divisor(int(count), method)
    if d < 1:
        raise DomainError(f"{method.value} variance needs count >= {method.min_count}, got {count}")
    return beta * beta / d


def rate_variance(lam: float, count: int, method: "Method | str" = Method.MLE) -> float:
    """Variance law of the rate estimator: ``lam**2/count`` (MVUE: ``count - 2``)."""
    method = Method.parse(method)
    d = _variance_divisor(int(count), method)
    if d < 1:
        raise DomainError(f"{method.value} variance needs count >= {method.min_count}, got {count}")
    return lam * lam / d


def _pair(total: float, count: int, n: int, r: int, method: Method) -> tuple[RateEstimate, ScaleEstimate]:
    if method is Method.MVUE:
        lam = (count - 1) / total
        beta = 1.0 / lam
    else:
        beta = total / count
        lam = 1.0 / beta
    rv = rate_variance(lam, count, method)
    sv = scale_variance(beta, count, method)
    return (
        RateEstimate(lam, rv, math.sqrt(rv), method, n, r),
        ScaleEstimate(beta, sv, math.sqrt(sv), method, n, r),
    )


def _check_count(count: int, method: Method, what: str) -> None:
    if count < method.min_count:
        raise DomainError(
            f"{method.value} needs {what} >= {method.min_count} (variance undefined below), got {count}"
        )


def estimate_complete(
    sample: ArrivalSample | ArrayLike, method: "Method | str" = Method.MLE
) -> tuple[RateEstimate, ScaleEstimate]:
    """Estimate rate and scale from a fully observed sample.

    ME, MLE and BLUE all reduce to the sample mean and return identical
    numbers; only the method tag differs.
    """
    method = Method.parse(method)
    if not isinstance(sample, ArrivalSample):
        sample = ArrivalSample(sample)
    n = sample.n
    _check_count(n, method, "n")
    total = math.fsum(sample.times.tolist())
    if total <= 0.0:
        raise DegenerateDataError("all decay times are zero; the scale is not identifiable")
    return _pair(total, n, n, n, method)


def t_statistic(view: CensoredView) -> float:
    """Total time on test: observed order statistics plus ``n - r`` copies of the largest."""
    ordered = view.ordered_times.tolist()
    return math.fsum(ordered + [(view.n - view.r) * ordered[-1]])


def estimate_censored(
    view: CensoredView, method: "Method | str" = Method.MLE
) -> tuple[RateEstimate, ScaleEstimate]:
    """Estimate rate and scale from the first ``r`` order statistics of ``n``.

    Raises
    ------
    DomainError
        For ME (undefined on censored data) or ``r`` below the method minimum.
    DegenerateDataError
        If ``T_r`` is zero.
    """
    method = Method.parse(method)
    if method is Method.ME:
        raise DomainError("the method of moments is defined only for complete data")
    _check_count(view.r, method, "r")
    total = t_statistic(view)
    if total <= 0.0:
        raise DegenerateDataError("T_r is zero; the scale is not identifiable")
    return _pair(total, view.r, view.n, view.r, method)


def estimate_weighted(times: ArrayLike, weights: ArrayLike) -> tuple[RateEstimate, ScaleEstimate]:
    """MLE from binned data: the weight-averaged time.

    Each time stands for ``weight`` identical observations, so the
    effective sample size is ``sum(weights)`` (rounded for the record).
    """
    t = np.asarray(times, dtype=float)
    w = np.asarray(weights, dtype=float)
    if t.shape != w.shape or t.ndim != 1:
        raise DomainError("times and weights must be 1-d arrays of equal length")
    if np.any(w < 0.0) or np.any(t < 0.0):
        raise DomainError("times and weights must be non-negative")
    wsum = math.fsum(w.tolist())
    if wsum <= 0.0:
        raise DegenerateDataError("total weight is zero")
    total = math.fsum((w * t).tolist())
    if total <= 0.0:
        raise DegenerateDataError("weighted time total is zero")
    beta = total / wsum
    lam = 1.0 / beta
    n = int(round(wsum))
    rv = lam * lam / wsum
    sv = beta * beta / wsum
    return (
        RateEstimate(lam, rv, math.sqrt(rv), Method.MLE, n, n),
        ScaleEstimate(beta, sv, math.sqrt(sv), Method.MLE, n, n),
    )


def fisher_info(beta: float, n: int) -> float:
    """Fisher information about the scale carried by ``n`` observations, ``n / beta**2``."""
    beta, n = _check_beta_n(beta, n)
    return n / (beta * beta)


def crlb(beta: float, n: int) -> float:
    """Cramér–Rao lower bound ``beta**2 / n`` for unbiased scale estimators."""
    beta, n = _check_beta_n(beta, n)
    return beta * beta / n


def efficiency(est_variance: float, beta: float, n: int) -> float:
    """Ratio of the Cramér–Rao bound to an estimator's variance (1 means efficient)."""
    est_variance = float(est_variance)
    if not math.isfinite(est_variance) or est_variance <= 0.0:
        raise DomainError(f"variance must be positive, got {est_variance!r}")
    return crlb(beta, n) / est_variance


def _check_beta_n(beta: float, n: int) -> tuple[float, int]:
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be positive and finite, got {beta!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return beta, int(n)
