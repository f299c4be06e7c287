import json
import math

import numpy as np
import pytest

from photodecay.analysis import (
    STANDARD_RATIOS,
    MonteCarloConfig,
    StderrConvention,
    censor_sweep,
    count_for_ratio,
    format_with_stderr,
    monte_carlo_validate,
    relative_error,
    run_suite,
)
from photodecay.errors import DomainError
from photodecay.estimate import Method, estimate_complete
from photodecay.sample import ArrivalSample, SeededRng, sample_exp


@pytest.fixture(scope="module")
def synthetic():
    return sample_exp(17900, 7.17, SeededRng(42))


class TestRelativeError:
    def test_values(self):
        assert relative_error(7.17, 7.17) == 0.0
        assert relative_error(7.21, 7.17) == pytest.approx(0.558, abs=1e-3)
        assert relative_error(9.65, 7.17) == pytest.approx(34.6, abs=0.05)

    def test_bad_reference(self):
        with pytest.raises(DomainError):
            relative_error(1.0, 0.0)


class TestCountForRatio:
    def test_table_ratios_are_integral(self):
        for ratio in STANDARD_RATIOS:
            r = count_for_ratio(ratio, 17900)
            assert r == pytest.approx(ratio * 17900, abs=1e-6)

    def test_half_rounds_up(self):
        assert count_for_ratio(0.5, 5) == 3
        assert count_for_ratio(0.25, 10) == 3


class TestSweep:
    def test_full_ratio_matches_complete(self, synthetic):
        rep = censor_sweep(synthetic, [1.0])
        _, scale = estimate_complete(synthetic)
        assert rep.rows[0].beta_hat == scale.beta_hat and rep.rows[0].stderr == scale.stderr

    def test_reference_convention(self, synthetic):
        rep = censor_sweep(synthetic, STANDARD_RATIOS, beta_ref=7.17, convention="reference")
        full = estimate_complete(synthetic)[1].beta_hat
        assert rep.stderr_beta == full
        last = rep.rows[-1]
        assert last.r == 179
        assert last.stderr == pytest.approx(full / math.sqrt(179), rel=1e-15)
        se = [row.stderr for row in rep.rows]
        assert all(a < b for a, b in zip(se, se[1:]))

    def test_explicit_stderr_beta(self, synthetic):
        rep = censor_sweep(synthetic, [0.01], convention="reference", stderr_beta=7.21)
        assert rep.rows[0].stderr == pytest.approx(0.539, abs=5e-4)

    def test_plug_in_monotone(self, synthetic):
        rep = censor_sweep(synthetic, STANDARD_RATIOS, convention=StderrConvention.PLUG_IN)
        se = [row.stderr for row in rep.rows]
        assert all(a < b for a, b in zip(se, se[1:]))

    def test_rel_error(self, synthetic):
        rep = censor_sweep(synthetic, STANDARD_RATIOS, beta_ref=7.17)
        for row in rep.rows:
            assert row.rel_error_pct == relative_error(row.beta_hat, 7.17) >= 0.0

    def test_rows_in_input_order(self, synthetic):
        ratios = [0.3, 1.0, 0.05]
        rep = censor_sweep(synthetic, ratios)
        assert [row.ratio for row in rep.rows] == ratios

    def test_per_row_error(self):
        s = ArrivalSample([1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0])
        rep = censor_sweep(s, [1.0, 0.2], method=Method.MVUE)
        assert rep.rows[0].ok and not rep.rows[1].ok
        assert "minimum" in rep.rows[1].error
        assert not rep.all_failed

    @pytest.mark.parametrize("bad", [[0.0], [1.5], [-0.2], []])
    def test_bad_ratio(self, synthetic, bad):
        with pytest.raises(DomainError):
            censor_sweep(synthetic, bad)

    def test_threads_do_not_change_output(self, synthetic):
        a = censor_sweep(synthetic, STANDARD_RATIOS, beta_ref=7.17, threads=1).to_json()
        b = censor_sweep(synthetic, STANDARD_RATIOS, beta_ref=7.17, threads=4).to_json()
        assert a == b

    def test_json_schema(self, synthetic):
        doc = json.loads(censor_sweep(synthetic, [1.0, 0.5], beta_ref=7.17, provenance={"seed": 42}).to_json())
        assert set(doc) >= {"schema_version", "n", "method", "stderr_convention", "beta_ref", "rows", "provenance"}
        assert set(doc["rows"][0]) >= {"ratio", "r", "beta_hat_ns", "stderr_ns", "rel_error_pct"}
        assert doc["provenance"]["seed"] == 42 and "tool_version" in doc["provenance"]
        assert doc["stderr_convention"] == "plug-in-at-r"

    def test_mvue_warning(self, synthetic):
        doc = censor_sweep(synthetic, [1.0], method="mvue").to_dict()
        assert doc["warnings"]

    def test_table_text(self, synthetic):
        text = censor_sweep(synthetic, STANDARD_RATIOS, beta_ref=7.17).render_table()
        lines = text.splitlines()
        assert lines[0].split("  ")[0].strip() == "Ratio r/n"
        assert "Result (ns)" in lines[0] and "Relative error (%)" in lines[0]
        assert len(lines) == 16

    def test_csv(self, synthetic):
        lines = censor_sweep(synthetic, [1.0, 0.5]).to_csv().splitlines()
        assert lines[0] == "ratio,r,beta_hat_ns,stderr_ns,rel_error_pct" and len(lines) == 3


def test_format_with_stderr():
    assert format_with_stderr(9.6543, 0.539) == "9.65(54)"
    assert format_with_stderr(7.42, 0.1205) == "7.42(12)"
    assert format_with_stderr(7.21, 0.00539) == "7.210(5)"


def test_no_trend_on_synthetic_data():
    # 500 replications of the full sweep; mean estimate at each ratio >= 0.05 centred on beta
    beta, n, reps = 7.17, 17900, 500
    ratios = [x for x in STANDARD_RATIOS if x >= 0.05]
    root = SeededRng(42)
    acc = np.zeros(len(ratios))
    for i in range(reps):
        rep = censor_sweep(sample_exp(n, beta, root.spawn(i)), ratios)
        acc += [row.beta_hat for row in rep.rows]
    means = acc / reps
    for ratio, m in zip(ratios, means):
        r = count_for_ratio(ratio, n)
        assert abs(m - beta) <= 3.0 * beta / math.sqrt(r * reps), ratio


class TestMonteCarlo:
    def test_mle_variance_law(self):
        s = monte_carlo_validate(MonteCarloConfig(7.17, 100, 5000, 7, Method.MLE))
        assert 0.9 <= s.variance_ratio <= 1.1 and s.passed
        assert s.theoretical_variance == pytest.approx(7.17**2 / 100)

    def test_mvue_unbiased(self):
        s = monte_carlo_validate(MonteCarloConfig(1.0, 50, 10000, 7, Method.MVUE))
        assert s.parameter == "rate"
        assert abs(s.empirical_mean - 1.0) <= 3 * (1 / math.sqrt(48)) / math.sqrt(10000)
        assert s.passed

    def test_censored_mle_unbiased(self):
        s = monte_carlo_validate(MonteCarloConfig(7.17, 1000, 2000, 7, Method.MLE, r=300))
        assert s.mean_ok and s.variance_ok is None

    def test_replicate_floor(self):
        with pytest.raises(DomainError):
            monte_carlo_validate(MonteCarloConfig(1.0, 10, 10, 7))

    def test_method_minimum(self):
        with pytest.raises(DomainError):
            monte_carlo_validate(MonteCarloConfig(1.0, 10, 200, 7, Method.MVUE, r=2))

    def test_deterministic(self):
        cfg = MonteCarloConfig(2.0, 20, 200, 3)
        assert monte_carlo_validate(cfg) == monte_carlo_validate(cfg)


@pytest.mark.parametrize("suite", ["variance", "unbiasedness", "limit", "memoryless"])
def test_suites_pass(suite):
    results = run_suite(suite, 7)
    assert results and all(c.passed for c in results), [c.line() for c in results]


def test_unknown_suite():
    with pytest.raises(DomainError):
        run_suite("bogus", 7)
