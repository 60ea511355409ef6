"""
Tests for the numeric helpers: horizons, random streams and compensated summation.
"""
import math

import numpy as np
import pytest

from pysocerr.exceptions import InvalidInputError, ParseError
from pysocerr.helpers import (STREAM_CAPACITY, STREAM_CURRENT, compensated_cumsum, compensated_sum, neumaier_add,
                              parse_horizon, percent, rng_stream)


class TestParseHorizon:

    @pytest.mark.parametrize('horizon, seconds', [('1h', 3600.0), ('24h', 86400.0), ('1y', 31_536_000.0),
                                                  ('30d', 2_592_000.0), ('1.5m', 90.0), ('90', 90.0), (90, 90.0)])
    def test_units(self, horizon, seconds):
        assert parse_horizon(horizon) == seconds

    @pytest.mark.parametrize('horizon', ['abc', '1w', '', '0h', -5])
    def test_invalid(self, horizon):
        with pytest.raises(InvalidInputError):
            parse_horizon(horizon)


class TestRngStream:

    def test_reproducible(self):
        first = rng_stream(7, 12, STREAM_CURRENT).standard_normal(100)
        again = rng_stream(7, 12, STREAM_CURRENT).standard_normal(100)
        np.testing.assert_array_equal(first, again)

    def test_streams_are_distinct(self):
        current = rng_stream(7, 12, STREAM_CURRENT).standard_normal(100)
        assert not np.array_equal(current, rng_stream(7, 12, STREAM_CAPACITY).standard_normal(100))
        assert not np.array_equal(current, rng_stream(7, 13, STREAM_CURRENT).standard_normal(100))
        assert not np.array_equal(current, rng_stream(8, 12, STREAM_CURRENT).standard_normal(100))

    def test_order_independent(self):
        forward = [rng_stream(3, run).standard_normal() for run in range(20)]
        backward = [rng_stream(3, run).standard_normal() for run in reversed(range(20))]
        assert forward == backward[::-1]

    def test_rejects_negative(self):
        with pytest.raises(InvalidInputError):
            rng_stream(-1)


class TestCompensatedSummation:

    def test_short_input_is_cumsum(self):
        values = np.linspace(-1.0, 1.0, 101)
        np.testing.assert_array_equal(compensated_cumsum(values), np.cumsum(values))

    def test_long_input_matches_exact_prefix_sums(self):
        values = rng_stream(1).uniform(-1e-4, 1e-4, size=300_000) + 1e-6
        running = compensated_cumsum(values, block_size=1000)
        assert running.size == values.size
        for k in (999, 123_456, 299_999):
            assert running[k] == pytest.approx(math.fsum(values[:k + 1]), rel=0, abs=1e-13)

    def test_compensated_sum(self):
        assert compensated_sum([1e16, 1.0, -1e16]) == 1.0
        assert compensated_sum(np.full(10, 0.1)) == 1.0

    def test_neumaier_add(self):
        total, compensation = np.zeros(2), np.zeros(2)
        for values in ([1e16, 1.0], [1.0, 1e16], [-1e16, -1e16]):
            total, compensation = neumaier_add(total, compensation, np.array(values))
        np.testing.assert_array_equal(total + compensation, [1.0, 1.0])


def test_percent():
    assert float(percent(0.0123)) == pytest.approx(1.23)


def test_parse_error_carries_line_number():
    error = ParseError("bad value", line_number=4)
    assert error.line_number == 4
    assert str(error) == "line 4: bad value"
    assert isinstance(error, ValueError)
