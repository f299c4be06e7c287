import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from photodecay.errors import DegenerateDataError, DomainError, EmptyInputError, FormatError, ParseError
from photodecay.estimate import estimate_complete, estimate_weighted
from photodecay.ingest import (
    HistogramData,
    WeightedSample,
    expand_weighted,
    histogram_to_weighted,
    read_histogram,
    read_times,
    subtract_baseline,
    write_times,
)
from photodecay.sample import SeededRng, sample_exp


def _write(tmp_path, text, name="f.csv"):
    p = tmp_path / name
    p.write_bytes(text.encode("utf-8"))
    return p


class TestReadTimes:
    def test_plain(self, tmp_path):
        assert read_times(_write(tmp_path, "1.0\n2.5\n0.0\n")).times.tolist() == [1.0, 2.5, 0.0]

    def test_header_and_crlf(self, tmp_path):
        assert read_times(_write(tmp_path, "time_ns\r\n1.0\r\n2.0\r\n")).times.tolist() == [1.0, 2.0]

    def test_negative_line_number(self, tmp_path):
        with pytest.raises(ParseError) as info:
            read_times(_write(tmp_path, "1.0\n-1.0\n"))
        assert info.value.lineno == 2

    def test_garbage_after_header(self, tmp_path):
        with pytest.raises(ParseError) as info:
            read_times(_write(tmp_path, "time_ns\n1.0\nabc\n"))
        assert info.value.lineno == 3

    def test_nonfinite(self, tmp_path):
        with pytest.raises(ParseError):
            read_times(_write(tmp_path, "1.0\ninf\n"))

    def test_empty(self, tmp_path):
        with pytest.raises(EmptyInputError):
            read_times(_write(tmp_path, ""))
        with pytest.raises(EmptyInputError):
            read_times(_write(tmp_path, "time_ns\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_times(tmp_path / "absent.txt")

    def test_round_trip_bit_exact(self, tmp_path):
        s = sample_exp(2000, 7.17, SeededRng(8))
        write_times(tmp_path / "t.csv", s)
        assert read_times(tmp_path / "t.csv").times.tobytes() == s.times.tobytes()

    @settings(max_examples=50)
    @given(st.lists(st.floats(0.0, 1e12, allow_subnormal=True), min_size=1, max_size=20))
    def test_round_trip_property(self, tmp_path_factory, values):
        from photodecay.sample import ArrivalSample

        path = tmp_path_factory.mktemp("rt") / "t.csv"
        write_times(path, ArrivalSample(values))
        assert read_times(path).times.tolist() == values


class TestReadHistogram:
    def test_plain(self, tmp_path):
        h = read_histogram(_write(tmp_path, "0.5,100\n1.5,50\n2.5,25\n"))
        assert h.bin_centers.tolist() == [0.5, 1.5, 2.5]
        assert h.counts.tolist() == [100, 50, 25]
        assert h.bin_width == 1.0

    def test_header(self, tmp_path):
        h = read_histogram(_write(tmp_path, "time_ns,count\n0.5,1\n1.5,2\n"))
        assert h.counts.tolist() == [1, 2]

    def test_irregular(self, tmp_path):
        with pytest.raises(FormatError):
            read_histogram(_write(tmp_path, "0,10\n1,5\n5,2"))

    def test_single_bin(self, tmp_path):
        with pytest.raises(FormatError):
            read_histogram(_write(tmp_path, "0.5,10\n"))

    def test_negative_count(self, tmp_path):
        with pytest.raises(FormatError):
            read_histogram(_write(tmp_path, "0.5,10\n1.5,-2\n"))

    def test_fractional_count(self, tmp_path):
        with pytest.raises(FormatError):
            read_histogram(_write(tmp_path, "0.5,10\n1.5,2.5\n"))

    def test_decreasing(self, tmp_path):
        with pytest.raises(FormatError):
            read_histogram(_write(tmp_path, "1.5,10\n0.5,2\n"))


def _hist(counts, width=1.0):
    counts = np.asarray(counts, dtype=np.int64)
    return HistogramData(np.arange(counts.size) * width + width / 2, counts, width)


class TestBaseline:
    def test_hand_example(self):
        h = subtract_baseline(_hist([100, 50, 10, 10]), 0.5)
        assert h.counts.tolist() == [90, 40, 0, 0]
        assert h.baseline == 10.0

    def test_already_zero(self):
        h = subtract_baseline(_hist([100, 50, 3, 0, 0, 0, 0, 0, 0, 0]), 0.1)
        assert h.counts.tolist() == [100, 50, 3, 0, 0, 0, 0, 0, 0, 0] and h.baseline == 0.0

    def test_idempotent(self):
        once = subtract_baseline(_hist([100, 60, 30, 14, 9, 7, 6, 5, 5, 5]), 0.3)
        twice = subtract_baseline(once, 0.3)
        assert once.counts.tolist() == twice.counts.tolist()

    def test_rounding(self):
        # tail mean 2.5 -> 7.5 rounds to 8, 1.5 to 2
        assert subtract_baseline(_hist([10, 4, 2, 3]), 0.5).counts.tolist() == [8, 2, 0, 1]

    @pytest.mark.parametrize("f", [0.0, 0.6, -0.1])
    def test_fraction_domain(self, f):
        with pytest.raises(DomainError):
            subtract_baseline(_hist([5, 4, 3]), f)

    def test_all_removed(self):
        with pytest.raises(DegenerateDataError):
            subtract_baseline(_hist([5, 5, 5, 5]), 0.5)


class TestWeighted:
    def test_adapter(self):
        ws = histogram_to_weighted(_hist([2, 2], width=2.0))
        assert ws.times.tolist() == [1.0, 3.0] and ws.weights.tolist() == [2.0, 2.0]
        assert estimate_weighted(ws.times, ws.weights)[1].beta_hat == 2.0

    @settings(max_examples=200)
    @given(st.lists(st.integers(0, 400), min_size=2, max_size=60).filter(lambda c: sum(c) > 0), st.floats(0.01, 5.0))
    def test_expanded_matches_weighted(self, counts, width):
        ws = histogram_to_weighted(_hist(counts, width))
        weighted = estimate_weighted(ws.times, ws.weights)[1].beta_hat
        expanded = estimate_complete(expand_weighted(ws))[1].beta_hat
        assert expanded == pytest.approx(weighted, rel=1e-12)

    def test_expand_empty(self):
        with pytest.raises(DegenerateDataError):
            expand_weighted(WeightedSample(np.array([1.0]), np.array([0.0])))
