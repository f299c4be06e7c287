"""
Analytic functions of the exponential and two-stage hypoexponential laws.

Times are in nanoseconds and rates in 1/ns throughout. Every function
accepts a scalar or an array of times and returns a value of the same
shape (a Python float for scalar input).

The two-stage model describes a fast non-radiative step with rate
``rate_n`` followed by radiative emission with rate ``rate_r``; the
observed decay time is the sum of the two exponential stage times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike

from .errors import DomainError, RangeError

# relative gap below which the two hypoexponential rates are treated as equal
EPS_EQUAL = 1e-9
# factorial(171) overflows a double
MAX_MOMENT_ORDER = 170
# survival probabilities below eps**2 are treated as underflowed when conditioning
SURVIVAL_FLOOR = np.finfo(float).eps ** 2
# grid used by hypoexp_limit_gap, in units of 1/rate_r
LIMIT_GRID_STEP = 0.01
LIMIT_GRID_HORIZON = 30.0


def _check_rate(value: float, name: str) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ExpParam:
    """Rate of an exponential law; ``beta`` is the matching scale (mean time)."""

    rate: float

    def __post_init__(self):
        object.__setattr__(self, "rate", _check_rate(self.rate, "rate"))

    @classmethod
    def from_beta(cls, beta: float) -> "ExpParam":
        return cls(1.0 / _check_rate(beta, "beta"))

    @property
    def beta(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class HypoexpParams:
    """Non-radiative (``rate_n``) and radiative (``rate_r``) stage rates, 1/ns."""

    rate_n: float
    rate_r: float
    degenerate: bool = field(init=False)

    def __post_init__(self):
        a = _check_rate(self.rate_n, "rate_n")
        b = _check_rate(self.rate_r, "rate_r")
        object.__setattr__(self, "rate_n", a)
        object.__setattr__(self, "rate_r", b)
        object.__setattr__(self, "degenerate", abs(a - b) <= EPS_EQUAL * max(a, b))

    @classmethod
    def from_times(cls, tau_n: float, tau_r: float) -> "HypoexpParams":
        return cls(1.0 / _check_rate(tau_n, "tau_n"), 1.0 / _check_rate(tau_r, "tau_r"))

    @property
    def tau_n(self) -> float:
        return 1.0 / self.rate_n

    @property
    def tau_r(self) -> float:
        return 1.0 / self.rate_r


@dataclass(frozen=True)
class FockProbs:
    """Weights of the vacuum and single-photon projectors at a given time."""

    p_no_emission: float
    p_emission: float


def _as_times(x: ArrayLike) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("times must be finite")
    return arr, arr.ndim == 0


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def exp_pdf(x: ArrayLike, p: ExpParam):
    """Density ``rate * exp(-rate * x)`` for x >= 0, zero for negative x."""
    t, scalar = _as_times(x)
    out = np.where(t >= 0.0, p.rate * np.exp(-p.rate * np.maximum(t, 0.0)), 0.0)
    return _out(out, scalar)


def exp_cdf(x: ArrayLike, p: ExpParam):
    """Distribution function ``1 - exp(-rate * x)``, zero for negative x."""
    t, scalar = _as_times(x)
    out = np.where(t >= 0.0, -np.expm1(-p.rate * np.maximum(t, 0.0)), 0.0)
    return _out(out, scalar)


def exp_survival(x: ArrayLike, p: ExpParam):
    """Tail probability P(X > x) = exp(-rate * x) for x >= 0."""
    t, scalar = _as_times(x)
    if np.any(t < 0.0):
        raise DomainError("survival is defined for x >= 0")
    return _out(np.exp(-p.rate * t), scalar)


def exp_mgf(t: float, p: ExpParam) -> float:
    """Moment generating function ``rate / (rate - t)``; diverges for t >= rate."""
    t = float(t)
    if not math.isfinite(t):
        raise DomainError("t must be finite")
    if t >= p.rate:
        raise DomainError(f"MGF diverges for t >= rate ({t} >= {p.rate})")
    return p.rate / (p.rate - t)


def raw_moment(k: int, p: ExpParam) -> float:
    """k-th raw moment ``k! / rate**k``."""
    if int(k) != k or k < 0:
        raise DomainError(f"moment order must be a non-negative integer, got {k!r}")
    k = int(k)
    if k > MAX_MOMENT_ORDER:
        raise RangeError(f"moment order {k} overflows (maximum {MAX_MOMENT_ORDER})")
    # beta**k rather than 1/rate**k keeps large k finite when rate < 1
    return math.factorial(k) * p.beta**k


def memoryless_residual(x1: float, x2: float, p: ExpParam) -> float:
    """Return ``P(X > x1 + x2 | X > x1) - P(X > x2)``.

    Zero up to rounding for an exponential law. Raises
    :class:`RangeError` when ``P(X > x1)`` falls below ``SURVIVAL_FLOOR``,
    where the conditional probability is no longer numerically resolved.
    """
    x1, x2 = float(x1), float(x2)
    if x1 < 0.0 or x2 < 0.0:
        raise DomainError("x1 and x2 must be non-negative")
    denom = exp_survival(x1, p)
    if denom < SURVIVAL_FLOOR:
        raise RangeError(f"P(X > {x1}) = {denom:.3g} underflows; conditional undefined")
    return exp_survival(x1 + x2, p) / denom - exp_survival(x2, p)


def fock_probs(t: float, p: ExpParam) -> FockProbs:
    """Vacuum / single-photon weights at time ``t`` after excitation."""
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError("t must be finite and non-negative")
    stay = math.exp(-p.rate * t)
    return FockProbs(p_no_emission=stay, p_emission=1.0 - stay)


def _ordered_rates(p: HypoexpParams) -> tuple[float, float]:
    # the convolution is symmetric; fixing the order makes results bit-identical under swap
    return min(p.rate_n, p.rate_r), max(p.rate_n, p.rate_r)


def hypoexp_pdf(t: ArrayLike, p: HypoexpParams):
    """Density of the sum of two independent exponential stage times.

    When the rates coincide within ``EPS_EQUAL`` (relative) the gamma(2)
    density ``m**2 t exp(-m t)`` is used, with ``m`` the mean of the two
    rates.
    """
    x, scalar = _as_times(t)
    s = np.maximum(x, 0.0)
    a, b = _ordered_rates(p)
    if p.degenerate:
        m = 0.5 * (a + b)
        dens = m * m * s * np.exp(-m * s)
    else:
        # a < b, so exp(-a s) >= exp(-b s) and the density is non-negative
        dens = a * b / (b - a) * (np.exp(-a * s) - np.exp(-b * s))
    out = np.where(x >= 0.0, np.maximum(dens, 0.0), 0.0)
    return _out(out, scalar)


def hypoexp_cdf(t: ArrayLike, p: HypoexpParams):
    """Distribution function of the two-stage model (closed-form integral of the density)."""
    x, scalar = _as_times(t)
    s = np.maximum(x, 0.0)
    a, b = _ordered_rates(p)
    if p.degenerate:
        m = 0.5 * (a + b)
        cdf = -np.expm1(-m * s) - m * s * np.exp(-m * s)
    else:
        cdf = 1.0 - (b * np.exp(-a * s) - a * np.exp(-b * s)) / (b - a)
    out = np.where(x >= 0.0, np.clip(cdf, 0.0, 1.0), 0.0)
    return _out(out, scalar)


def hypoexp_limit_gap(p: HypoexpParams) -> float:
    """Sup-distance between the two-stage CDF and the radiative-only exponential CDF.

    Evaluated on the fixed grid ``t = 0, d, 2d, ..., 30/rate_r`` with
    ``d = 0.01/rate_r``. The gap shrinks to zero as ``rate_n/rate_r``
    grows, which is what justifies fitting a single exponential when the
    non-radiative step is fast.
    """
    if p.degenerate or p.rate_n <= p.rate_r:
        raise DomainError("limit regime requires rate_n > rate_r (fast non-radiative step)")
    steps = int(round(LIMIT_GRID_HORIZON / LIMIT_GRID_STEP))
    grid = np.arange(steps + 1) * (LIMIT_GRID_STEP / p.rate_r)
    gap = hypoexp_cdf(grid, p) - exp_cdf(grid, ExpParam(p.rate_r))
    return float(np.max(np.abs(gap)))
