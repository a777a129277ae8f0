import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volclust.ingest import (
    PriceSeries,
    ReturnSeries,
    compute_returns,
    load_prices,
    standardize,
)


def test_load_minimal_csv():
    series = load_prices(b"timestamp,price\n1,100.0\n2,101.0\n")
    assert len(series) == 2
    assert series.timestamps == (1, 2)
    assert np.allclose(series.prices, [100.0, 101.0])


def test_load_accepts_path_and_file_object(tmp_path):
    path = tmp_path / "ticks.csv"
    path.write_text("timestamp,price\n1,10.0\n2,11.0\n")
    from_path = load_prices(path)
    with open(path, "rb") as fh:
        from_file = load_prices(fh)
    from_text = load_prices(io.StringIO(path.read_text()))
    assert np.array_equal(from_path.prices, from_file.prices)
    assert np.array_equal(from_path.prices, from_text.prices)


def test_load_rejects_negative_price_with_line_number():
    with pytest.raises(ValueError, match="line 3"):
        load_prices(b"timestamp,price\n1,100.0\n2,-5.0\n")


def test_load_rejects_zero_price():
    with pytest.raises(ValueError, match="line 2.*positive"):
        load_prices(b"timestamp,price\n1,0.0\n2,100.0\n")


def test_load_rejects_nan_price():
    with pytest.raises(ValueError, match="line 2.*finite"):
        load_prices(b"timestamp,price\n1,nan\n2,100.0\n")


def test_load_rejects_malformed_row():
    with pytest.raises(ValueError, match="line 3.*2 fields"):
        load_prices(b"timestamp,price\n1,100.0\n2,100.0,junk\n")
    with pytest.raises(ValueError, match="line 2.*unparseable"):
        load_prices(b"timestamp,price\n1,abc\n2,100.0\n")


def test_load_rejects_non_increasing_timestamps():
    with pytest.raises(ValueError, match="line 3.*increase"):
        load_prices(b"timestamp,price\n5,100.0\n5,101.0\n")
    with pytest.raises(ValueError, match="line 4"):
        load_prices(b"timestamp,price\n1,100.0\n2,101.0\n2,102.0\n")


def test_load_integer_timestamps_ordered_numerically():
    # "9" < "10" holds numerically even though it fails lexically
    series = load_prices(b"timestamp,price\n9,100.0\n10,101.0\n")
    assert series.timestamps == (9, 10)


def test_load_string_timestamps_ordered_lexically():
    load_prices(b"timestamp,price\n2024-01-01T00:00,1.0\n2024-01-01T00:05,2.0\n")
    with pytest.raises(ValueError, match="increase"):
        load_prices(b"timestamp,price\na9,1.0\na10,2.0\n")


def test_load_requires_two_rows():
    with pytest.raises(ValueError, match="at least 2"):
        load_prices(b"timestamp,price\n1,100.0\n")


def test_load_requires_header():
    with pytest.raises(ValueError, match="line 1.*header"):
        load_prices(b"time,price\n1,100.0\n2,101.0\n")
    with pytest.raises(ValueError, match="empty"):
        load_prices(b"")


def test_large_file_roundtrips_through_export(tmp_path):
    rng = np.random.default_rng(20240917)
    prices = np.exp(rng.normal(0.0, 0.2, size=1001).cumsum()) * 50.0
    original = PriceSeries(timestamps=tuple(range(1001)), prices=prices)
    path = tmp_path / "big.csv"
    original.write_csv(path)
    parsed = load_prices(path)
    assert len(parsed) == 1001
    assert parsed.timestamps == original.timestamps
    # full-precision export: every price survives the round trip bit-for-bit
    assert np.array_equal(parsed.prices, original.prices)


def test_price_series_validation():
    with pytest.raises(ValueError, match="positive"):
        PriceSeries(timestamps=(1, 2), prices=np.array([1.0, -1.0]))
    with pytest.raises(ValueError, match="increasing"):
        PriceSeries(timestamps=(2, 1), prices=np.array([1.0, 1.0]))
    with pytest.raises(ValueError, match="at least 2"):
        PriceSeries(timestamps=(1,), prices=np.array([1.0]))
    with pytest.raises(ValueError, match="lengths"):
        PriceSeries(timestamps=(1, 2, 3), prices=np.array([1.0, 1.0]))


def test_compute_returns_log_difference():
    prices = PriceSeries(timestamps=(1, 2, 3), prices=np.array([1.0, math.e, math.e]))
    returns = compute_returns(prices)
    assert len(returns) == 2
    assert np.allclose(returns.values, [1.0, 0.0], atol=1e-15)


def test_compute_returns_constant_prices():
    prices = PriceSeries(timestamps=tuple(range(5)), prices=np.full(5, 42.0))
    assert np.all(compute_returns(prices).values == 0.0)


def test_compute_returns_inverts_exponentiated_cumsum():
    rng = np.random.default_rng(7)
    known = rng.normal(0.0, 0.05, size=2000)
    prices = PriceSeries(
        timestamps=tuple(range(2001)),
        prices=np.exp(np.concatenate([[0.0], np.cumsum(known)])),
    )
    recovered = compute_returns(prices)
    assert np.max(np.abs(recovered.values - known)) < 1e-12


def test_return_series_caches_match_recomputation():
    values = np.array([0.1, -0.2, 0.3])
    series = ReturnSeries.from_values(values)
    assert math.isclose(series.mean, sum(values) / 3, abs_tol=1e-15)
    with pytest.raises(ValueError, match="cached mean"):
        ReturnSeries(values=values, mean=series.mean + 1e-6, stdev=series.stdev)
    with pytest.raises(ValueError, match="cached stdev"):
        ReturnSeries(values=values, mean=series.mean, stdev=series.stdev + 1e-6)


def test_return_series_rejects_nonfinite():
    with pytest.raises(ValueError, match="finite"):
        ReturnSeries.from_values([0.1, np.nan])


def test_standardize_two_point_series():
    out = standardize(ReturnSeries.from_values([-1.0, 1.0]))
    assert out.values[0] == -out.values[1]
    assert math.isclose(out.stdev, 1.0, abs_tol=1e-12)
    assert math.isclose(out.mean, 0.0, abs_tol=1e-12)


def test_standardize_moments_against_fsum_oracle():
    rng = np.random.default_rng(11)
    out = standardize(ReturnSeries.from_values(rng.normal(3.0, 2.5, size=5000)))
    # independent moment computation via exact summation
    vals = [float(v) for v in out.values]
    mean = math.fsum(vals) / len(vals)
    var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    assert abs(mean) < 1e-10
    assert abs(math.sqrt(var) - 1.0) < 1e-10


def test_standardize_is_idempotent():
    rng = np.random.default_rng(13)
    once = standardize(ReturnSeries.from_values(rng.normal(0.4, 1.7, size=1000)))
    twice = standardize(once)
    assert np.max(np.abs(twice.values - once.values)) < 1e-10


def test_standardize_preserves_affine_order():
    series = ReturnSeries.from_values([0.3, -0.1, 0.9, 0.2])
    out = standardize(series)
    assert np.array_equal(np.argsort(out.values), np.argsort(series.values))


def test_standardize_zero_variance_error():
    with pytest.raises(ValueError, match="zero-variance"):
        standardize(ReturnSeries.from_values([0.5, 0.5, 0.5]))


def test_returns_csv_export(tmp_path):
    series = ReturnSeries.from_values([0.25, -0.125, 1.0 / 3.0])
    path = tmp_path / "returns.csv"
    series.write_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,return"
    parsed = [float(line.split(",")[1]) for line in lines[1:]]
    assert np.array_equal(parsed, series.values)


@st.composite
def _valid_csv(draw):
    n = draw(st.integers(min_value=2, max_value=30))
    steps = draw(
        st.lists(st.integers(min_value=1, max_value=1000), min_size=n, max_size=n)
    )
    timestamps = np.cumsum(steps)
    prices = draw(
        st.lists(
            st.floats(min_value=1e-6, max_value=1e9, allow_nan=False),
            min_size=n,
            max_size=n,
        )
    )
    body = "".join(f"{t},{p!r}\n" for t, p in zip(timestamps, prices))
    return "timestamp,price\n" + body, list(timestamps), prices


@given(_valid_csv())
@settings(max_examples=60)
def test_load_accepts_every_valid_csv(case):
    text, timestamps, prices = case
    series = load_prices(text.encode())
    assert list(series.timestamps) == timestamps
    assert np.array_equal(series.prices, np.array(prices))


@given(
    _valid_csv(),
    st.sampled_from(["negative", "zero", "nan", "dup_ts", "truncate"]),
    st.data(),
)
@settings(max_examples=60)
def test_load_rejects_every_invalid_mutation(case, kind, data):
    text, timestamps, prices = case
    lines = text.splitlines()
    if kind == "truncate":
        lines = lines[:2]
    else:
        row = data.draw(st.integers(min_value=1, max_value=len(lines) - 1))
        ts, _ = lines[row].split(",", 1)
        if kind == "negative":
            lines[row] = f"{ts},-1.0"
        elif kind == "zero":
            lines[row] = f"{ts},0.0"
        elif kind == "nan":
            lines[row] = f"{ts},nan"
        elif kind == "dup_ts":
            lines.insert(row, lines[row])
    with pytest.raises(ValueError):
        load_prices("\n".join(lines).encode())
