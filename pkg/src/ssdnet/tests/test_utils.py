# Licensed under a 3-clause BSD style license - see LICENSE.rst
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from ..errors import ConfigurationError, ContractError, IngestionError
from ..ssm import ForecastPath
from ..utils import (
    PROFILES,
    DatasetProfile,
    NormalizationStats,
    SynthConfig,
    add_calendar_covariates,
    calendar_features,
    chrono_split,
    compute_stats,
    concat_tables,
    denormalize_components,
    get_profile,
    last_value_forecast,
    load_csv,
    make_windows,
    normalize,
    persistence_forecast,
    synth_generate,
    write_csv,
)
from .fixtures import toy_table

HEADER = "timestamp,series_id,value,temperature\n"


def write_text(tmpdir, text, name="data.csv"):
    filename = os.path.join(str(tmpdir), name)
    with open(filename, "w") as fh:
        fh.write(text)
    return filename


def hourly_rows(series_id, n, start_hour=0, value=1.0):
    return [
        "2021-03-01T{0:02d}:00:00,{1},{2},{3}\n".format(
            start_hour + i, series_id, value + i, 0.5 * i
        )
        for i in range(n)
    ]


def test_synth_is_seeded():
    config = SynthConfig(n_series=3, length=200, seed=7)
    first = synth_generate(config)
    second = synth_generate(SynthConfig(n_series=3, length=200, seed=7))
    assert first.ids == ["0", "1", "2"]
    for a, b in zip(first.series, second.series):
        assert_array_equal(a.values, b.values)
        truth = a.truth
        assert np.all(
            a.values == truth["trend"] + truth["seasonal"] + truth["noise"]
        )
    other = synth_generate(SynthConfig(n_series=3, length=200, seed=8))
    assert not np.array_equal(first.series[0].values, other.series[0].values)


def test_synth_components():
    table = synth_generate(
        SynthConfig(length=96, period=24, trend="none", noise=0.0)
    )
    s = table.series[0]
    assert np.all(s.truth["trend"] == 0.0)
    assert_allclose(s.values[24:], s.values[:-24], atol=1e-12)
    assert_allclose(np.abs(s.values).max(), 1.0, atol=0.02)
    assert np.all(np.diff(s.timestamps) == np.timedelta64(3600, "s"))
    with pytest.raises(ConfigurationError):
        SynthConfig(trend="quadratic")


def test_csv_roundtrip(tmpdir):
    table = toy_table(n_series=2, length=50)
    filename = os.path.join(str(tmpdir), "synth.csv")
    write_csv(table, filename)
    read = load_csv(filename)
    assert read.granularity == "1h"
    assert read.ids == table.ids
    assert read.covariate_names == []
    for a, b in zip(table.series, read.series):
        assert_array_equal(a.timestamps, b.timestamps)
        assert_array_equal(a.values, b.values)
        assert list(b.truth) == ["trend", "seasonal", "noise"]
        assert_array_equal(a.truth["seasonal"], b.truth["seasonal"])


def test_load_csv_sorts_and_splits(tmpdir):
    rows = hourly_rows("b", 4) + hourly_rows("a", 3)[::-1]
    filename = write_text(tmpdir, HEADER + "".join(rows))
    table = load_csv(filename, granularity="1h")
    assert table.ids == ["b", "a"]
    assert table.covariate_names == ["temperature"]
    a = table.series[table.index_of("a")]
    assert_array_equal(a.values, [1.0, 2.0, 3.0])
    assert_array_equal(a.covariates[:, 0], [0.0, 0.5, 1.0])
    with pytest.raises(ContractError):
        table.index_of("c")


@pytest.mark.parametrize(
    "rows,message",
    [
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T00:00:00,a,2,0\n",
            "duplicate",
        ),
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T01:00:00,a,2,0\n"
            "2021-03-01T03:00:00,a,3,0\n",
            "gap",
        ),
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T01:00:00,a,x,0\n",
            "non-numeric",
        ),
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T01:00:00,a,,0\n",
            "missing",
        ),
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T00:10:00,a,2,0\n",
            "spacing",
        ),
        (
            "2021-03-01T00:00:00,a,1,0\n2021-03-01T01:00:00,a,2,nan\n",
            "series a: non-finite covariate temperature at "
            "2021-03-01T01:00:00",
        ),
        (
            "2021-03-01T00:00:00,b,1,inf\n2021-03-01T01:00:00,b,2,0\n",
            "series b: non-finite covariate temperature at "
            "2021-03-01T00:00:00",
        ),
    ],
)
def test_load_csv_errors(tmpdir, rows, message):
    filename = write_text(tmpdir, HEADER + rows)
    with pytest.raises(IngestionError) as excinfo:
        load_csv(filename)
    assert message in str(excinfo.value)


def test_load_csv_granularity_mismatch(tmpdir):
    filename = write_text(tmpdir, HEADER + "".join(hourly_rows("a", 3)))
    with pytest.raises(IngestionError):
        load_csv(filename, granularity="30min")
    filename = write_text(tmpdir, "timestamp,value\n2021-03-01,1\n", "bad.csv")
    with pytest.raises(IngestionError):
        load_csv(filename)


def test_normalization():
    table = toy_table(n_series=2, length=60)
    normalized, stats = normalize(table)
    for s in normalized.series:
        assert_allclose(s.values.mean(), 0.0, atol=1e-12)
        assert_allclose(s.values.std(), 1.0, rtol=1e-12)
        assert_allclose(
            stats[s.series_id].denormalize(s.values),
            table.series[table.index_of(s.series_id)].values,
            rtol=1e-12,
        )
    assert normalized.stats is stats

    flat = table.replace([table.series[0].slice(0, 10)])
    flat.series[0].values = np.full(10, 3.0)
    with pytest.raises(IngestionError):
        compute_stats(flat)


def test_denormalize_components():
    path = ForecastPath(
        [0.5, -1.0], [1.0, 0.25], [0.25, 0.0], [0.25, -1.0], series_id="a"
    )
    out = denormalize_components(path, NormalizationStats(10.0, 2.0))
    assert_allclose(out.trend, [10.5, 10.0])
    assert_allclose(out.seasonality, [0.5, -2.0])
    assert_allclose(out.mean, [11.0, 8.0])
    assert_allclose(out.variance, [4.0, 1.0])
    assert_allclose(out.mean - out.trend - out.seasonality, 0.0, atol=1e-12)
    assert out.series_id == "a"


def test_calendar_features():
    stamps = np.array(
        ["2020-01-06T00:00:00", "2020-12-13T23:59:00"], dtype="datetime64[s]"
    )
    features = calendar_features(
        stamps, ["month", "day_of_week", "hour", "minute", "age"]
    )
    # 2020-01-06 is a Monday, 2020-12-13 a Sunday
    assert_allclose(features[0], [-0.5, -0.5, -0.5, -0.5, -0.5])
    assert_allclose(features[1], [0.5, 0.5, 0.5, 0.5, 0.5])
    assert calendar_features(stamps, []).shape == (2, 0)
    with pytest.raises(ConfigurationError):
        calendar_features(stamps, ["season"])


def test_add_calendar_covariates():
    table = add_calendar_covariates(toy_table(length=30), get_profile("solar"))
    assert table.covariate_names == ["month", "hour", "age"]
    s = table.series[0]
    assert s.covariates.shape == (30, 3)
    assert s.covariates[0, 2] == -0.5 and s.covariates[-1, 2] == 0.5
    assert np.all(np.abs(s.covariates) <= 0.5)


def test_make_windows():
    table = toy_table(n_series=2, length=30)
    windows = make_windows(table, 6, 3, stride=2)
    # starts 1, 3, ..., 21 for each series
    assert len(windows) == 2 * 11
    w = windows[1]
    s = table.series[0]
    assert w.series_id == "0" and w.series_index == 0 and w.start == 3
    assert_array_equal(w.inputs, s.values[3:9])
    assert_array_equal(w.targets, s.values[9:12])
    assert_array_equal(w.lagged, s.values[2:11])
    assert_array_equal(w.horizon_timestamps, s.timestamps[9:12])
    assert_array_equal(w.truth["trend"], s.truth["trend"][9:12])
    assert w.input_length == 6 and w.horizon == 3
    assert windows[-1].series_index == 1


def test_make_windows_short_series():
    table = toy_table(n_series=2, length=30)
    table = table.replace([table.series[0].slice(0, 5), table.series[1]])
    windows = make_windows(table, 6, 3, series_ids=["0", "1"])
    assert {w.series_id for w in windows} == {"1"}
    assert windows[0].series_index == 1
    with pytest.raises(IngestionError):
        make_windows(table.replace(table.series[:1]), 6, 3)


def test_chrono_split():
    table = toy_table(n_series=2, length=100)
    train, val, test = chrono_split(table, 20, 10, context=7)
    s = table.series[0]
    assert len(train.series[0]) == 70
    assert len(val.series[0]) == 27 and val.series[0].history == 7
    assert len(test.series[0]) == 17 and test.series[0].history == 7
    assert_array_equal(test.series[0].values, s.values[83:])

    # evaluation windows only forecast steps of their own segment
    windows = make_windows(val, 6, 3)
    assert windows[0].start == 1
    assert_array_equal(windows[0].targets, s.values[70:73])
    assert_array_equal(windows[-1].targets, s.values[87:90])

    merged = concat_tables([train, val, test])
    assert_array_equal(merged.series[1].values, table.series[1].values)
    assert_array_equal(
        merged.series[1].truth["noise"], table.series[1].truth["noise"]
    )

    with pytest.raises(ConfigurationError):
        chrono_split(table, 60, 40)


def test_baselines():
    table = toy_table(length=40)
    w = make_windows(table, 6, 3)[0]
    assert_array_equal(persistence_forecast(w, 3), w.inputs[-3:])
    assert_array_equal(
        persistence_forecast(w, 2), np.resize(w.inputs[-2:], 3)
    )
    assert_array_equal(last_value_forecast(w), np.full(3, w.inputs[-1]))
    assert_array_equal(
        persistence_forecast(w, 1, daily_span=4), w.inputs[-4:-1]
    )
    with pytest.raises(ContractError):
        persistence_forecast(w, 24)
    short = make_windows(table, 2, 3)[0]
    with pytest.raises(ContractError):
        persistence_forecast(short, 1, daily_span=1)


def test_profiles():
    assert list(PROFILES) == [
        "sanyo",
        "hanergy",
        "solar",
        "electricity",
        "exchange",
    ]
    electricity = get_profile("electricity")
    assert electricity.input_length == 168
    assert electricity.calendar == ("month", "day_of_week", "hour", "age")
    assert electricity.use_id_embedding
    assert get_profile("sanyo").granularity == "30min"
    assert get_profile("exchange").persistence_span == 20
    with pytest.raises(ConfigurationError):
        get_profile("traffic")
    with pytest.raises(ConfigurationError):
        DatasetProfile("x", "1h", 24, 24, 24, 1)
