"""
Censoring sweeps, relative error against a reference decay time, and
seeded Monte Carlo checks of the estimator laws.
"""

from __future__ import annotations

import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from . import __version__
from .dist import ExpParam, HypoexpParams, exp_cdf, hypoexp_limit_gap, memoryless_residual
from .errors import DegenerateDataError, DomainError
from .estimate import Method, estimate_censored, scale_variance
from .sample import ArrivalSample, SeededRng, sample_exp, sample_hypoexp, type2_censor

SCHEMA_VERSION = 1
# the fifteen censoring ratios of the NV-centre decay study
STANDARD_RATIOS = (1.0, 0.99, 0.95, 0.9, 0.85, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05, 0.01)
MIN_REPLICATES = 100
# variance ratios are only judged with at least this many replicates
VARIANCE_CHECK_REPLICATES = 5000
VARIANCE_RTOL = 0.1


class StderrConvention(str, enum.Enum):
    """How the stderr column of a sweep is computed.

    ``PLUG_IN`` uses each row's own estimate, ``beta_hat(r)/sqrt(r)``.
    ``REFERENCE`` uses one scale for every row, by default the full-sample
    estimate, giving ``beta_hat(n)/sqrt(r)``.
    """

    PLUG_IN = "plug-in-at-r"
    REFERENCE = "reference-beta"

    @classmethod
    def parse(cls, value: "str | StderrConvention") -> "StderrConvention":
        if isinstance(value, StderrConvention):
            return value
        aliases = {"plug-in": cls.PLUG_IN, "reference": cls.REFERENCE}
        try:
            return aliases.get(value) or cls(value)
        except ValueError:
            raise DomainError(f"unknown stderr convention {value!r}") from None


def relative_error(beta_hat: float, beta_ref: float) -> float:
    """Percent deviation ``100 |beta_hat - beta_ref| / beta_ref``."""
    if not beta_ref > 0.0:
        raise DomainError(f"reference must be positive, got {beta_ref!r}")
    return 100.0 * abs(beta_hat - beta_ref) / beta_ref


def count_for_ratio(ratio: float, n: int) -> int:
    """``round(ratio * n)``, halves rounded away from zero."""
    return int(math.floor(ratio * n + 0.5))


def format_with_stderr(value: float, stderr: float) -> str:
    """Compact ``value(stderr)`` notation, e.g. ``9.65(54)``.

    At least two decimals are shown, more when needed to give the stderr
    one significant digit.
    """
    if not (stderr > 0.0 and math.isfinite(stderr)):
        return f"{value:.2f}"
    decimals = max(2, -math.floor(math.log10(stderr)))
    units = int(round(stderr * 10**decimals))
    return f"{value:.{decimals}f}({units})"


def _two_significant(x: float) -> str:
    return f"{x:.0f}" if x >= 10.0 else f"{x:.2g}"


@dataclass(frozen=True)
class SweepRow:
    ratio: float
    r: int
    beta_hat: Optional[float] = None
    stderr: Optional[float] = None
    rel_error_pct: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    n: int
    method: Method
    stderr_convention: StderrConvention
    beta_ref: Optional[float] = None
    stderr_beta: Optional[float] = None
    provenance: dict = field(default_factory=dict)

    @property
    def all_failed(self) -> bool:
        return all(not row.ok for row in self.rows)

    def to_dict(self) -> dict[str, Any]:
        warnings = []
        if self.method is Method.MVUE:
            warnings.append("MVUE scale estimates are not recommended for the decay time; prefer MLE")
        return {
            "schema_version": SCHEMA_VERSION,
            "n": self.n,
            "method": self.method.value,
            "stderr_convention": self.stderr_convention.value,
            "beta_ref": self.beta_ref,
            "stderr_beta": self.stderr_beta,
            "rows": [
                {
                    "ratio": row.ratio,
                    "r": row.r,
                    "beta_hat_ns": row.beta_hat,
                    "stderr_ns": row.stderr,
                    "rel_error_pct": row.rel_error_pct,
                    "error": row.error,
                }
                for row in self.rows
            ],
            "warnings": warnings,
            "provenance": dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render_table(self) -> str:
        """Aligned text in the column order Ratio r/n | Result (ns) | Relative error (%)."""
        header = ["Ratio r/n", "Result (ns)"]
        if self.beta_ref is not None:
            header.append("Relative error (%)")
        lines = [header]
        for row in self.rows:
            cells = [f"{row.ratio:g}"]
            if row.ok:
                cells.append(format_with_stderr(row.beta_hat, row.stderr))
                if self.beta_ref is not None:
                    cells.append(_two_significant(row.rel_error_pct))
            else:
                cells.append(f"error: {row.error}")
                if self.beta_ref is not None:
                    cells.append("-")
            lines.append(cells)
        widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
        out = io.StringIO()
        for line in lines:
            out.write("  ".join(c.ljust(w) for c, w in zip(line, widths)).rstrip() + "\n")
        return out.getvalue()

    def to_csv(self) -> str:
        """Plot-ready CSV, one row per ratio; failed rows have empty numeric fields."""
        out = io.StringIO()
        out.write("ratio,r,beta_hat_ns,stderr_ns,rel_error_pct\n")
        for row in self.rows:
            vals = [row.beta_hat, row.stderr, row.rel_error_pct]
            out.write(f"{row.ratio!r},{row.r}," + ",".join("" if v is None else repr(v) for v in vals) + "\n")
        return out.getvalue()


def censor_sweep(
    sample: ArrivalSample,
    ratios: Sequence[float],
    method: "Method | str" = Method.MLE,
    beta_ref: Optional[float] = None,
    convention: "StderrConvention | str" = StderrConvention.PLUG_IN,
    stderr_beta: Optional[float] = None,
    provenance: Optional[dict] = None,
    threads: int = 1,
) -> SweepReport:
    """Estimate the decay time at each censoring ratio ``r/n``.

    Parameters
    ----------
    sample : ArrivalSample
        Complete data; rows censor it at ``r = round(ratio * n)``.
    ratios : sequence of float
        Each in (0, 1]. Rows come back in this order.
    beta_ref : float, optional
        External reference decay time; adds the relative-error column.
    convention : StderrConvention or str
        ``plug-in`` (per-row estimate) or ``reference`` (one scale for all rows).
    stderr_beta : float, optional
        Scale used under the reference convention. Defaults to the
        full-sample estimate of the same method.
    threads : int
        Rows are independent; more than one thread evaluates them
        concurrently without changing the result.

    Rows whose ``r`` is below the method minimum carry an ``error``
    message instead of aborting the sweep.
    """
    method = Method.parse(method)
    convention = StderrConvention.parse(convention)
    if beta_ref is not None and not beta_ref > 0.0:
        raise DomainError(f"reference must be positive, got {beta_ref!r}")
    ratios = [float(x) for x in ratios]
    if not ratios:
        raise DomainError("at least one ratio is required")
    for x in ratios:
        if not 0.0 < x <= 1.0:
            raise DomainError(f"ratio must lie in (0, 1], got {x}")
    n = sample.n
    full = type2_censor(sample, n)

    if convention is StderrConvention.REFERENCE and stderr_beta is None:
        try:
            stderr_beta = estimate_censored(full, method)[1].beta_hat
        except (DomainError, DegenerateDataError) as exc:
            raise DegenerateDataError(f"cannot form the full-sample reference scale: {exc}") from exc

    def one(ratio: float) -> SweepRow:
        r = count_for_ratio(ratio, n)
        if r < method.min_count:
            return SweepRow(ratio, r, error=f"r={r} below the {method.value} minimum of {method.min_count}")
        try:
            _, scale = estimate_censored(full.truncate(r), method)
        except (DomainError, DegenerateDataError) as exc:
            return SweepRow(ratio, r, error=str(exc))
        if convention is StderrConvention.REFERENCE:
            stderr = math.sqrt(scale_variance(stderr_beta, r, method))
        else:
            stderr = scale.stderr
        rel = relative_error(scale.beta_hat, beta_ref) if beta_ref is not None else None
        return SweepRow(ratio, r, scale.beta_hat, stderr, rel)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(one, ratios))
    else:
        rows = tuple(one(x) for x in ratios)
    prov = {"tool_version": __version__}
    prov.update(provenance or {})
    return SweepReport(rows, n, method, convention, beta_ref, stderr_beta, prov)


# ---------------------------------------------------------------------------
# Monte Carlo validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonteCarloConfig:
    """Replicated sampling experiment for one estimator.

    ``r`` defaults to ``n`` (complete data). ``stream`` selects an
    independent substream of ``seed``.
    """

    beta: float
    n: int
    replicates: int
    seed: int
    method: Method = Method.MLE
    r: Optional[int] = None
    stream: int = 0


@dataclass(frozen=True)
class ValidationSummary:
    config: MonteCarloConfig
    parameter: str  # "scale" or "rate"
    true_value: float
    empirical_mean: float
    empirical_variance: float
    theoretical_variance: float
    mean_band: float
    mean_ok: bool
    variance_ratio: float
    variance_ok: Optional[bool]

    @property
    def mean_ratio(self) -> float:
        return self.empirical_mean / self.true_value

    @property
    def passed(self) -> bool:
        return self.mean_ok and self.variance_ok is not False


def monte_carlo_validate(config: MonteCarloConfig) -> ValidationSummary:
    """Compare replicated estimates with their theoretical mean and variance.

    MVUE is judged on the rate (where it is unbiased); the other methods
    on the scale. The mean must fall within three standard errors of the
    true value; the variance ratio must lie in [0.9, 1.1] when at least
    5000 replicates are run (otherwise it is reported but not judged).
    """
    method = Method.parse(config.method)
    if method is Method.ME:
        method_for_censor = Method.MLE
    else:
        method_for_censor = method
    n = int(config.n)
    r = n if config.r is None else int(config.r)
    if config.replicates < MIN_REPLICATES:
        raise DomainError(f"need at least {MIN_REPLICATES} replicates, got {config.replicates}")
    if not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n, got r={r}, n={n}")
    if r < method.min_count:
        raise DomainError(f"{method.value} needs r >= {method.min_count}, got {r}")
    if r < n and method is Method.ME:
        raise DomainError("the method of moments is defined only for complete data")
    if not config.beta > 0.0:
        raise DomainError("beta must be positive")

    rng = SeededRng(config.seed).spawn(config.stream)
    values = np.empty(config.replicates)
    use_rate = method is Method.MVUE
    for i in range(config.replicates):
        view = type2_censor(sample_exp(n, config.beta, rng), r)
        rate, scale = estimate_censored(view, method_for_censor)
        values[i] = rate.lambda_hat if use_rate else scale.beta_hat

    if use_rate:
        truth = 1.0 / config.beta
        theo_var = truth * truth / (r - 2)
    else:
        truth = config.beta
        theo_var = scale_variance(truth, r, method)
    mean = float(np.mean(values))
    var = float(np.var(values, ddof=1))
    band = 3.0 * math.sqrt(theo_var / config.replicates)
    ratio = var / theo_var
    var_ok = abs(ratio - 1.0) <= VARIANCE_RTOL if config.replicates >= VARIANCE_CHECK_REPLICATES else None
    return ValidationSummary(
        config=config,
        parameter="rate" if use_rate else "scale",
        true_value=truth,
        empirical_mean=mean,
        empirical_variance=var,
        theoretical_variance=theo_var,
        mean_band=band,
        mean_ok=abs(mean - truth) <= band,
        variance_ratio=ratio,
        variance_ok=var_ok,
    )


# ---------------------------------------------------------------------------
# Named validation suites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    expected: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: measured={self.measured:.6g} expected={self.expected:.6g} {self.detail}".rstrip()


def _variance_check(name: str, cfg: MonteCarloConfig) -> CheckResult:
    s = monte_carlo_validate(cfg)
    return CheckResult(
        name,
        bool(s.variance_ok),
        s.empirical_variance,
        s.theoretical_variance,
        f"ratio={s.variance_ratio:.4f} (tolerance +/-{VARIANCE_RTOL:g})",
    )


def _mean_check(name: str, cfg: MonteCarloConfig) -> CheckResult:
    s = monte_carlo_validate(cfg)
    return CheckResult(name, s.mean_ok, s.empirical_mean, s.true_value, f"band=+/-{s.mean_band:.3g}")


def suite_variance(seed: int) -> list[CheckResult]:
    return [
        _variance_check(
            "variance: MLE scale, n=100", MonteCarloConfig(7.17, 100, 5000, seed, Method.MLE, stream=1)
        ),
        _variance_check(
            "variance: censored MLE scale, n=1000 r=300",
            MonteCarloConfig(7.17, 1000, 5000, seed, Method.MLE, r=300, stream=2),
        ),
    ]


def suite_unbiasedness(seed: int) -> list[CheckResult]:
    return [
        _mean_check(
            "unbiasedness: MVUE rate, n=50", MonteCarloConfig(1.0, 50, 10000, seed, Method.MVUE, stream=3)
        ),
        _mean_check(
            "unbiasedness: censored MLE scale, n=1000 r=300",
            MonteCarloConfig(7.17, 1000, 2000, seed, Method.MLE, r=300, stream=4),
        ),
    ]


def ks_distance(times: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """Kolmogorov-Smirnov sup-distance between the empirical CDF and ``cdf``."""
    x = np.sort(np.asarray(times, dtype=float))
    m = x.size
    f = cdf(x)
    upper = np.arange(1, m + 1) / m - f
    lower = f - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


def suite_limit(seed: int) -> list[CheckResult]:
    gaps = [hypoexp_limit_gap(HypoexpParams(rn, 1.0)) for rn in (10.0, 100.0, 1000.0)]
    n = 100_000
    p = HypoexpParams(1000.0, 1.0)
    draws = sample_hypoexp(n, p, SeededRng(seed).spawn(5))
    ks = ks_distance(draws.times, lambda t: exp_cdf(t, ExpParam(1.0)))
    ks_bound = gaps[2] + 1.36 / math.sqrt(n) * 1.5
    return [
        CheckResult("limit: CDF gap at rate_n/rate_r=1000", gaps[2] < 1e-3, gaps[2], 1e-3, "(must be below)"),
        CheckResult(
            "limit: gap decreases over rate_n/rate_r in {10,100,1000}",
            gaps[0] > gaps[1] > gaps[2],
            gaps[1] - gaps[2],
            0.0,
            "gaps=" + ",".join(f"{g:.3g}" for g in gaps),
        ),
        CheckResult("limit: sampled KS distance, n=1e5", ks < ks_bound, ks, ks_bound, "(must be below)"),
    ]


def suite_memoryless(seed: int) -> list[CheckResult]:
    rng = SeededRng(seed).spawn(6)
    worst = 0.0
    count = 0
    while count < 1000:
        u = rng.uniforms(3)
        rate = 0.01 + 10.0 * u[0]
        # keep rate*(x1 + x2) <= 30
        x1 = u[1] * 30.0 / rate
        x2 = u[2] * (30.0 / rate - x1)
        worst = max(worst, abs(memoryless_residual(x1, x2, ExpParam(rate))))
        count += 1
    draws = sample_exp(1_000_000, 1.0, SeededRng(seed).spawn(7)).times
    past1 = draws > 1.0
    survivors = int(past1.sum())
    frac = float((draws[past1] > 2.0).sum()) / survivors
    expected = math.exp(-1.0)
    sigma = math.sqrt(expected * (1.0 - expected) / survivors)
    return [
        CheckResult("memoryless: analytic residual over 1000 triples", worst <= 1e-12, worst, 1e-12, "(must be below)"),
        CheckResult(
            "memoryless: empirical P(X>2 | X>1) vs exp(-1), 1e6 draws",
            abs(frac - expected) <= 3.0 * sigma,
            frac,
            expected,
            f"3 sigma={3.0 * sigma:.3g}",
        ),
    ]


SUITES: dict[str, Callable[[int], list[CheckResult]]] = {
    "variance": suite_variance,
    "unbiasedness": suite_unbiasedness,
    "limit": suite_limit,
    "memoryless": suite_memoryless,
}


def run_suite(name: str, seed: int) -> list[CheckResult]:
    """Run one named suite, or every suite for ``"all"``."""
    if name == "all":
        return [check for fn in SUITES.values() for check in fn(seed)]
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; expected one of {', '.join([*SUITES, 'all'])}")
    return SUITES[name](seed)
