import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from lrdest.core import (DataError, DomainError, LengthError, TimeSeries, difference, digamma, integrate,
                         read_series, rng_stream, trigamma, write_series)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_difference_known_values():
    x = np.array([1.0, 4.0, 9.0, 16.0, 25.0])
    assert difference(x, 1).tolist() == [3.0, 5.0, 7.0, 9.0]
    assert difference(x, 2).tolist() == [2.0, 2.0, 2.0]
    assert difference(x, 0).tolist() == x.tolist()


def test_difference_errors():
    with pytest.raises(LengthError):
        difference([1.0, 2.0], 2)
    with pytest.raises(DomainError):
        difference([1.0, 2.0], -1)


def test_integrate_keeps_length():
    x = np.arange(6.0)
    assert integrate(x, 2).size == 6
    assert integrate(x, 1, 10.0)[0] == 10.0


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(5, 60), elements=finite), st.integers(0, 4))
def test_difference_integrate_round_trip(x, k):
    back = difference(integrate(x, k), k)
    np.testing.assert_allclose(back, x[k:], atol=1e-10 * max(1.0, np.abs(x).max()) * 10 ** k)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(2, 40), elements=finite))
def test_cumsum_inverts_first_difference(x):
    y = integrate(difference(x, 1), 1, initial=x[0])
    np.testing.assert_allclose(y, x[1:], atol=1e-10 * max(1.0, np.abs(x).max()) * x.size)


def test_special_functions():
    assert trigamma(1.0) == pytest.approx(math.pi ** 2 / 6, abs=1e-14)
    assert 3 * trigamma(3.0) == pytest.approx(1.1848, abs=5e-5)
    assert digamma(1.0) == pytest.approx(-0.5772156649015329, abs=1e-14)
    with pytest.raises(DomainError):
        trigamma(0.0)


def test_rng_streams_are_independent_of_order():
    a1 = rng_stream(7, 1).standard_normal(5)
    rng_stream(7, 0).standard_normal(100)
    a2 = rng_stream(7, 1).standard_normal(5)
    b = rng_stream(7, 2).standard_normal(5)
    assert np.array_equal(a1, a2)
    assert not np.array_equal(a1, b)
    assert not np.array_equal(rng_stream(8, 1).standard_normal(5), a1)


def test_series_io_round_trip(tmp_path):
    x = np.random.default_rng(0).standard_normal(17)
    p = tmp_path / "s.txt"
    write_series(x, p)
    assert np.array_equal(np.asarray(read_series(p)), x)


def test_read_series_skips_comments_and_rejects_junk(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("# header\n1.5\n\n2\n")
    assert np.asarray(read_series(p)).tolist() == [1.5, 2.0]
    p.write_text("1\nabc\n")
    with pytest.raises(DataError, match=":2:"):
        read_series(p)
    p.write_text("1\nnan\n")
    with pytest.raises(DataError):
        read_series(p)
    with pytest.raises(DataError):
        read_series(tmp_path / "missing.txt")


def test_timeseries_wraps_values():
    ts = TimeSeries([1, 2, 3])
    assert len(ts) == 3 and ts.n == 3
    assert np.asarray(ts).dtype == np.float64
