"""
Seeded generation of decay times and Type II censoring.

All random draws go through :class:`SeededRng`, which pins the bit
generator (PCG64) in one place. Decay times are produced by inverse-CDF
sampling, ``x = -beta * log(U)`` with ``U`` uniform on (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .dist import HypoexpParams
from .errors import DomainError


class SeededRng:
    """Reproducible uniform stream on (0, 1].

    Not safe for concurrent use; give each worker its own instance via
    :meth:`spawn`.
    """

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self._gen = np.random.Generator(np.random.PCG64(seed))

    def uniforms(self, size: int) -> np.ndarray:
        # random() is on [0, 1); reflecting maps 0 -> 1 and excludes 0
        return 1.0 - self._gen.random(size)

    def spawn(self, index: int) -> "SeededRng":
        """Independent child stream number ``index``, derived from this seed."""
        child = SeededRng.__new__(SeededRng)
        child.seed = self.seed
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(int(index),))
        child._gen = np.random.Generator(np.random.PCG64(ss))
        return child


@dataclass(frozen=True, eq=False)
class ArrivalSample:
    """Unordered collection of non-negative, finite decay times (ns)."""

    times: np.ndarray

    def __post_init__(self):
        arr = np.array(self.times, dtype=float).reshape(-1)
        if arr.size == 0:
            raise DomainError("an arrival sample needs at least one time")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise DomainError("arrival times must be finite and non-negative")
        arr.flags.writeable = False
        object.__setattr__(self, "times", arr)

    def __len__(self) -> int:
        return self.times.size

    @property
    def n(self) -> int:
        return self.times.size


@dataclass(frozen=True, eq=False)
class CensoredView:
    """The ``r`` smallest order statistics of a sample of size ``n``."""

    ordered_times: np.ndarray
    n: int
    r: int

    def __post_init__(self):
        arr = np.array(self.ordered_times, dtype=float).reshape(-1)
        n, r = int(self.n), int(self.r)
        if not 1 <= r <= n:
            raise DomainError(f"need 1 <= r <= n, got r={r}, n={n}")
        if arr.size != r:
            raise DomainError(f"expected {r} ordered times, got {arr.size}")
        if np.any(np.diff(arr) < 0.0):
            raise DomainError("ordered_times must be non-decreasing")
        arr.flags.writeable = False
        object.__setattr__(self, "ordered_times", arr)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)

    def truncate(self, r: int) -> "CensoredView":
        """View keeping only the first ``r`` of the observed order statistics."""
        if not 1 <= r <= self.r:
            raise DomainError(f"cannot truncate a view of r={self.r} to r={r}")
        return CensoredView(self.ordered_times[:r], self.n, r)


def _check_count(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"sample size must be a positive integer, got {n!r}")
    return int(n)


def sample_exp(n: int, beta: float, rng: SeededRng) -> ArrivalSample:
    """Draw ``n`` i.i.d. exponential decay times with mean ``beta`` (ns)."""
    n = _check_count(n)
    beta = float(beta)
    if not math.isfinite(beta) or beta <= 0.0:
        raise DomainError(f"beta must be positive and finite, got {beta!r}")
    u = rng.uniforms(n)
    return ArrivalSample(-beta * np.log(u))


def sample_hypoexp(n: int, p: HypoexpParams, rng: SeededRng) -> ArrivalSample:
    """Draw ``n`` two-stage decay times ``E_N + E_R``.

    The non-radiative uniforms are drawn first (all ``n``), then the
    radiative ones, so a given seed fixes both stages.
    """
    n = _check_count(n)
    u_n = rng.uniforms(n)
    u_r = rng.uniforms(n)
    return ArrivalSample(-np.log(u_n) / p.rate_n - np.log(u_r) / p.rate_r)


def type2_censor(sample: ArrivalSample | ArrayLike, r: int) -> CensoredView:
    """Keep the ``r`` smallest times of ``sample`` in non-decreasing order."""
    if not isinstance(sample, ArrivalSample):
        sample = ArrivalSample(sample)
    n = sample.n
    if int(r) != r or not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n={n}, got r={r!r}")
    ordered = np.sort(sample.times, kind="stable")[: int(r)]
    return CensoredView(ordered, n, int(r))
