"""Command-line front end: ``photodecay {simulate,estimate,sweep,validate,dist}``.

Exit codes: 0 ok, 1 validation failure, 2 usage / invalid arguments,
3 I/O or input-format problems, 4 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import SUITES, StderrConvention, censor_sweep, count_for_ratio, run_suite
from .dist import (
    ExpParam,
    HypoexpParams,
    exp_cdf,
    exp_pdf,
    exp_survival,
    fock_probs,
    hypoexp_cdf,
    hypoexp_limit_gap,
    hypoexp_pdf,
)
from .errors import DegenerateDataError, DomainError, FormatError, RangeError
from .estimate import Method, estimate_censored, estimate_complete
from .ingest import DEFAULT_TAIL_FRACTION, expand_weighted, histogram_to_weighted, read_histogram, read_times, subtract_baseline, write_times
from .sample import ArrivalSample, SeededRng, sample_exp, sample_hypoexp, type2_censor

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _ratio(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"ratio must lie in (0, 1], got {text}")
    return value


def _ratio_list(text: str) -> list[float]:
    items = [x.strip() for x in text.split(",") if x.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty ratio list")
    return [_ratio(x) for x in items]


def _tail_fraction(text: str) -> float:
    value = _positive_float(text)
    if value > 0.5:
        raise argparse.ArgumentTypeError(f"tail fraction must lie in (0, 0.5], got {text}")
    return value


def _float_list(text: str) -> list[float]:
    try:
        values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None
    if not values or not all(math.isfinite(v) for v in values):
        raise argparse.ArgumentTypeError("need at least one finite number")
    return values


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, metavar="PATH", help="arrival-time file (one time in ns per line)")
    p.add_argument("--histogram", action="store_true", help="treat --input as a 'time_ns,count' histogram CSV")
    p.add_argument(
        "--tail-fraction",
        type=_tail_fraction,
        default=DEFAULT_TAIL_FRACTION,
        help="fraction of trailing bins averaged as the dark-count floor (default %(default)s)",
    )
    p.add_argument("--no-baseline", action="store_true", help="skip dark-count subtraction for histograms")
    p.add_argument(
        "--method",
        type=str.lower,
        choices=["me", "mle", "mvue", "blue"],
        default="mle",
        help="estimator (default %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="photodecay",
        description="Exponential decay-time estimation for single-photon emission data. All times are in ns.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="write seeded synthetic decay times")
    sim.add_argument("--beta", type=_positive_float, required=True, help="decay time (radiative tau_R), ns")
    sim.add_argument("--n", type=_positive_int, required=True, help="number of decay times")
    sim.add_argument("--seed", type=_seed, required=True, help="unsigned 64-bit seed")
    sim.add_argument("--out", required=True, metavar="PATH", help="output arrival-time file")
    sim.add_argument("--hypoexp", action="store_true", help="two-stage model: non-radiative then radiative (tau_R = beta)")
    sim.add_argument("--tau-n", type=_positive_float, help="non-radiative time, ns (with --hypoexp)")

    est = sub.add_parser("estimate", help="estimate the decay time from one dataset")
    _add_input_flags(est)
    est.add_argument("--censor-ratio", type=_ratio, help="keep the first round(ratio*n) order statistics")
    est.add_argument("--json", action="store_true", help="print a JSON object instead of text")

    sw = sub.add_parser("sweep", help="estimate at a list of censoring ratios")
    _add_input_flags(sw)
    sw.add_argument("--ratios", type=_ratio_list, required=True, help="comma-separated r/n values in (0, 1]")
    sw.add_argument("--reference", type=_positive_float, help="reference decay time, ns (adds relative error)")
    sw.add_argument(
        "--stderr-convention",
        choices=["plug-in", "reference"],
        default="plug-in",
        help="plug-in: beta_hat(r)/sqrt(r); reference: beta_hat(n)/sqrt(r) (default %(default)s)",
    )
    sw.add_argument("--stderr-beta", type=_positive_float, help="scale in ns for the reference convention (default: full-sample estimate)")
    sw.add_argument("--out", required=True, metavar="PATH", help="report file")
    sw.add_argument("--format", choices=["json", "table", "csv"], default="json")
    sw.add_argument("--threads", type=_positive_int, default=1, help="rows evaluated concurrently")

    val = sub.add_parser("validate", help="run seeded self-validation suites")
    val.add_argument("--suite", choices=[*SUITES, "all"], required=True)
    val.add_argument("--seed", type=_seed, required=True, help="unsigned 64-bit seed")

    dist = sub.add_parser("dist", help="evaluate distribution functions")
    dist.add_argument("--beta", type=_positive_float, required=True, help="radiative decay time, ns")
    dist.add_argument("--t", type=_float_list, required=True, help="comma-separated times, ns")
    dist.add_argument("--tau-n", type=_positive_float, help="non-radiative time, ns (adds two-stage columns)")
    return parser


def _load(args: argparse.Namespace) -> ArrivalSample:
    if not args.histogram:
        return read_times(args.input)
    h = read_histogram(args.input)
    if not args.no_baseline:
        h = subtract_baseline(h, args.tail_fraction)
    return expand_weighted(histogram_to_weighted(h))


def cmd_simulate(args: argparse.Namespace) -> int:
    rng = SeededRng(args.seed)
    if args.hypoexp:
        if args.tau_n is None:
            raise DomainError("--hypoexp requires --tau-n")
        params = HypoexpParams.from_times(args.tau_n, args.beta)
        sample = sample_hypoexp(args.n, params, rng)
        desc = f"hypoexp tau_n={args.tau_n:g} ns tau_r={args.beta:g} ns"
    else:
        if args.tau_n is not None:
            raise DomainError("--tau-n is only meaningful with --hypoexp")
        sample = sample_exp(args.n, args.beta, rng)
        desc = f"exp beta={args.beta:g} ns"
    write_times(args.out, sample)
    print(f"n={sample.n} model={desc} seed={args.seed} out={args.out}")
    return EXIT_OK


def cmd_estimate(args: argparse.Namespace) -> int:
    method = Method.parse(args.method)
    sample = _load(args)
    n = sample.n
    r = n if args.censor_ratio is None else count_for_ratio(args.censor_ratio, n)
    if r < 1:
        raise DomainError(f"censor ratio {args.censor_ratio} keeps no observations of n={n}")
    if r == n:
        rate, scale = estimate_complete(sample, method)
    else:
        rate, scale = estimate_censored(type2_censor(sample, r), method)
    if args.json:
        print(
            json.dumps(
                {
                    "method": method.value,
                    "n": scale.n,
                    "r": scale.r,
                    "beta_hat_ns": scale.beta_hat,
                    "beta_stderr_ns": scale.stderr,
                    "lambda_hat_per_ns": rate.lambda_hat,
                    "lambda_stderr_per_ns": rate.stderr,
                    "recommended": scale.recommended,
                },
                indent=2,
                sort_keys=True,
            )
        )
    else:
        print(f"method: {method.value}")
        print(f"n: {scale.n}  r: {scale.r}")
        print(f"beta_hat: {scale.beta_hat:.6g} ns  stderr: {scale.stderr:.3g} ns")
        print(f"lambda_hat: {rate.lambda_hat:.6g} 1/ns  stderr: {rate.stderr:.3g} 1/ns")
        if not scale.recommended:
            print("warning: MVUE scale estimates are not recommended for the decay time; prefer MLE")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    sample = _load(args)
    report = censor_sweep(
        sample,
        args.ratios,
        method=args.method,
        beta_ref=args.reference,
        convention=StderrConvention.parse(args.stderr_convention),
        stderr_beta=args.stderr_beta,
        provenance={"input": str(args.input), "histogram": bool(args.histogram)},
        threads=args.threads,
    )
    text = {"json": report.to_json, "table": report.render_table, "csv": report.to_csv}[args.format]()
    Path(args.out).write_text(text, encoding="utf-8")
    failed = sum(1 for row in report.rows if not row.ok)
    print(f"wrote {len(report.rows)} rows ({failed} failed) to {args.out}")
    return EXIT_DEGENERATE if report.all_failed else EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    results = run_suite(args.suite, args.seed)
    for check in results:
        print(check.line())
    ok = all(c.passed for c in results)
    print(f"{sum(c.passed for c in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_VALIDATION


def cmd_dist(args: argparse.Namespace) -> int:
    p = ExpParam.from_beta(args.beta)
    hp = HypoexpParams.from_times(args.tau_n, args.beta) if args.tau_n is not None else None
    cols = ["t_ns", "pdf", "cdf", "survival", "p_no_emission", "p_emission"]
    if hp is not None:
        cols += ["hypoexp_pdf", "hypoexp_cdf"]
    print(",".join(cols))
    for t in args.t:
        row = [t, exp_pdf(t, p), exp_cdf(t, p)]
        if t >= 0.0:
            fp = fock_probs(t, p)
            row += [exp_survival(t, p), fp.p_no_emission, fp.p_emission]
        else:
            row += [1.0, float("nan"), float("nan")]
        if hp is not None:
            row += [hypoexp_pdf(t, hp), hypoexp_cdf(t, hp)]
        print(",".join(f"{v:.10g}" for v in row))
    if hp is not None and hp.rate_n > hp.rate_r and not hp.degenerate:
        print(f"# single-exponential CDF gap: {hypoexp_limit_gap(hp):.3g}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "sweep": cmd_sweep,
    "validate": cmd_validate,
    "dist": cmd_dist,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (DomainError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateDataError as exc:
        print(f"error: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (OSError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
