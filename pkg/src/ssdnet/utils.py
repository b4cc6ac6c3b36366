# Licensed under a 3-clause BSD style license - see LICENSE.rst
import copy
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np
from astropy import log
from astropy.io import ascii
from astropy.table import Table

from .errors import ConfigurationError, ContractError, IngestionError
from .ssm import ForecastPath
from .validator import (
    validate_array,
    validate_choice,
    validate_integer,
    validate_scalar,
)

__all__ = [
    "GRANULARITIES",
    "CALENDAR_FEATURES",
    "PROFILES",
    "DatasetProfile",
    "SeriesData",
    "TimeSeriesTable",
    "NormalizationStats",
    "WindowSample",
    "WindowBatch",
    "SynthConfig",
    "get_profile",
    "load_csv",
    "write_csv",
    "compute_stats",
    "normalize",
    "denormalize_components",
    "calendar_features",
    "add_calendar_covariates",
    "make_windows",
    "stack_windows",
    "chrono_split",
    "concat_tables",
    "synth_generate",
    "persistence_forecast",
    "last_value_forecast",
]

# seconds between observations
GRANULARITIES = OrderedDict([("30min", 1800), ("1h", 3600), ("1day", 86400)])

CALENDAR_FEATURES = ("month", "day_of_week", "hour", "minute", "age")

TRUTH_PREFIX = "truth_"


# Dataset profiles


@dataclass
class DatasetProfile:
    """
    Window geometry, calendar features and tuned hyperparameters of a dataset.

    ``persistence_span`` overrides the number of trailing input steps repeated
    by the persistence baseline (daily data has no "previous day" to repeat).
    """

    name: str
    granularity: str
    steps_per_day: int
    input_length: int
    horizon: int
    season: int
    calendar: tuple = ()
    learning_rate: float = 0.005
    dropout: float = 0.0
    d_hid: int = 16
    n_layers: int = 2
    d_kv: int = 6
    n_heads: int = 2
    use_id_embedding: bool = False
    persistence_span: int = None

    def __post_init__(self):
        validate_choice("granularity", self.granularity, list(GRANULARITIES))
        for name in ["steps_per_day", "input_length", "horizon"]:
            setattr(self, name, validate_integer(name, getattr(self, name), 1))
        self.season = validate_integer("season", self.season, 2)
        self.calendar = tuple(self.calendar)
        for feature in self.calendar:
            validate_choice("calendar feature", feature, CALENDAR_FEATURES)


# fmt: off
PROFILES = OrderedDict(
    (profile.name, profile)
    for profile in [
        DatasetProfile(
            "sanyo", "30min", 20, 20, 20, 20, ("month", "hour", "minute"),
            0.005, 0.0, 12, 2, 6, 2,
        ),
        DatasetProfile(
            "hanergy", "30min", 20, 20, 20, 20, ("month", "hour", "minute"),
            0.005, 0.0, 16, 3, 6, 3,
        ),
        DatasetProfile(
            "solar", "1h", 24, 24, 24, 24, ("month", "hour", "age"),
            0.005, 0.1, 16, 3, 6, 3, True,
        ),
        DatasetProfile(
            "electricity", "1h", 24, 168, 24, 24,
            ("month", "day_of_week", "hour", "age"),
            0.001, 0.1, 24, 3, 8, 2, True,
        ),
        DatasetProfile(
            "exchange", "1day", 1, 30, 20, 20,
            ("month", "day_of_week", "age"),
            0.005, 0.0, 12, 2, 4, 3, True, 20,
        ),
    ]
)
# fmt: on


def get_profile(name):
    validate_choice("profile", name, list(PROFILES))
    return PROFILES[name]


# Tables


@dataclass
class NormalizationStats:
    mean: float
    std: float

    def normalize(self, values):
        return (np.asarray(values, dtype=np.float64) - self.mean) / self.std

    def denormalize(self, values):
        return np.asarray(values, dtype=np.float64) * self.std + self.mean


@dataclass
class SeriesData:
    """
    One univariate series.

    ``history`` counts leading steps that belong to an earlier segment and are
    only there to condition windows (see `chrono_split`).
    """

    series_id: str
    timestamps: np.ndarray
    values: np.ndarray
    covariates: np.ndarray = None
    truth: dict = field(default_factory=OrderedDict)
    history: int = 0

    def __post_init__(self):
        self.series_id = str(self.series_id)
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        self.values = validate_array(
            "values of series {0}".format(self.series_id),
            np.asarray(self.values, dtype=np.float64),
            error=IngestionError,
        )
        if self.covariates is None:
            self.covariates = np.zeros((len(self.values), 0))
        self.covariates = np.asarray(self.covariates, dtype=np.float64)
        if self.covariates.ndim == 1:
            self.covariates = self.covariates[:, None]
        if not (
            len(self.timestamps) == len(self.values) == len(self.covariates)
        ):
            raise IngestionError(
                "series {0}: timestamps, values and covariates differ in "
                "length".format(self.series_id)
            )

    def __len__(self):
        return len(self.values)

    def slice(self, start, stop, history=0):
        truth = OrderedDict(
            (key, col[start:stop]) for key, col in self.truth.items()
        )
        return SeriesData(
            self.series_id,
            self.timestamps[start:stop],
            self.values[start:stop],
            self.covariates[start:stop],
            truth,
            history,
        )


@dataclass
class TimeSeriesTable:
    """
    ``N`` series sharing a sampling interval and covariate schema.

    ``stats`` maps series id to the `NormalizationStats` used to produce the
    values in this table (None if the table is in original units).
    """

    series: list
    covariate_names: list = field(default_factory=list)
    granularity: str = "1h"
    stats: dict = None

    def __post_init__(self):
        self.covariate_names = list(self.covariate_names)
        for s in self.series:
            if s.covariates.shape[1] != len(self.covariate_names):
                raise IngestionError(
                    "series {0} has {1} covariates, the table schema has "
                    "{2}".format(
                        s.series_id,
                        s.covariates.shape[1],
                        len(self.covariate_names),
                    )
                )

    def __len__(self):
        return len(self.series)

    @property
    def ids(self):
        return [s.series_id for s in self.series]

    @property
    def spacing(self):
        return np.timedelta64(GRANULARITIES[self.granularity], "s")

    def index_of(self, series_id):
        try:
            return self.ids.index(str(series_id))
        except ValueError:
            raise ContractError("unknown series {0}".format(series_id))

    def replace(self, series, **kwargs):
        new = copy.copy(self)
        new.series = series
        for key, value in kwargs.items():
            setattr(new, key, value)
        return new


def _infer_granularity(spacing, series_id):
    for name, seconds in GRANULARITIES.items():
        if spacing == seconds:
            return name
    raise IngestionError(
        "series {0}: unsupported spacing of {1} s "
        "(expected one of {2})".format(
            series_id,
            spacing,
            ", ".join(GRANULARITIES),
        )
    )


def _numeric_column(data, name):
    column = data[name]
    if np.ma.is_masked(column):
        row = int(np.flatnonzero(np.ma.getmaskarray(column))[0])
        raise IngestionError(
            "row {0}: missing value in column {1}".format(row + 1, name)
        )
    if not np.issubdtype(column.dtype, np.number):
        for row, cell in enumerate(column):
            try:
                float(cell)
            except (TypeError, ValueError):
                raise IngestionError(
                    "row {0}: non-numeric value {1!r} in column {2}".format(
                        row + 1, str(cell), name
                    )
                )
    return np.asarray(column, dtype=np.float64)


def load_csv(filename, granularity=None):
    """
    Read a long-format CSV dataset.

    Columns are ``timestamp`` (ISO-8601), ``series_id`` and ``value``,
    followed by zero or more numeric covariates. Columns named ``truth_*``
    (written by `synth_generate`) are kept as ground truth rather than
    covariates.

    Parameters
    ----------
    filename : str
    granularity : str, optional
        Expected spacing (``30min``, ``1h`` or ``1day``); inferred if not
        given.

    Returns
    -------
    table : `TimeSeriesTable`
        Rows sorted by time within each series.

    Raises
    ------
    IngestionError
        On gaps, duplicate timestamps, uneven spacing, non-numeric cells or
        non-finite covariates.
    """
    try:
        data = ascii.read(filename, format="csv")
    except OSError as exc:
        raise OSError("cannot read {0}: {1}".format(filename, exc)) from exc

    for required in ["timestamp", "series_id", "value"]:
        if required not in data.colnames:
            raise IngestionError(
                "{0} has no column {1!r}".format(filename, required)
            )

    extra = [c for c in data.colnames if c not in ("timestamp", "series_id")]
    columns = OrderedDict(
        (name, _numeric_column(data, name)) for name in extra
    )
    truth_names = [c for c in extra if c.startswith(TRUTH_PREFIX)]
    covariate_names = [
        c for c in extra if c != "value" and c not in truth_names
    ]

    try:
        timestamps = np.array(
            [str(t) for t in data["timestamp"]], dtype="datetime64[s]"
        )
    except ValueError as exc:
        raise IngestionError(
            "{0}: unparseable timestamp ({1})".format(filename, exc)
        )
    ids = np.array([str(i) for i in data["series_id"]])

    series = []
    spacings = set()
    for series_id in OrderedDict.fromkeys(ids):
        rows = np.flatnonzero(ids == series_id)
        rows = rows[np.argsort(timestamps[rows], kind="stable")]
        stamps = timestamps[rows]
        steps = np.diff(stamps).astype(np.int64)
        if np.any(steps == 0):
            dup = stamps[1:][steps == 0][0]
            raise IngestionError(
                "series {0}: duplicate timestamp {1}".format(series_id, dup)
            )
        for name in covariate_names:
            bad = np.flatnonzero(~np.isfinite(columns[name][rows]))
            if len(bad):
                raise IngestionError(
                    "series {0}: non-finite covariate {1} at {2}".format(
                        series_id, name, stamps[bad[0]]
                    )
                )
        if len(steps):
            spacing = int(steps.min())
            uneven = np.flatnonzero(steps != spacing)
            if len(uneven):
                raise IngestionError(
                    "series {0}: gap after {1} (next timestamp {2})".format(
                        series_id, stamps[uneven[0]], stamps[uneven[0] + 1]
                    )
                )
            spacings.add(spacing)
        series.append(
            SeriesData(
                series_id,
                stamps,
                columns["value"][rows],
                np.column_stack(
                    [columns[c][rows] for c in covariate_names]
                    or [np.zeros((len(rows), 0))]
                ),
                OrderedDict(
                    (c[len(TRUTH_PREFIX) :], columns[c][rows])
                    for c in truth_names
                ),
            )
        )

    if len(spacings) > 1:
        raise IngestionError(
            "{0}: series have different spacings {1}".format(
                filename, sorted(spacings)
            )
        )
    if spacings:
        inferred = _infer_granularity(spacings.pop(), series[0].series_id)
        if granularity is not None and granularity != inferred:
            raise IngestionError(
                "{0}: expected {1} spacing, found {2}".format(
                    filename, granularity, inferred
                )
            )
        granularity = inferred
    elif granularity is None:
        raise IngestionError(
            "{0}: cannot infer spacing from single-row series".format(filename)
        )

    log.info(
        "Read {0} series ({1} rows, {2}) from {3}".format(
            len(series), len(data), granularity, filename
        )
    )
    return TimeSeriesTable(series, covariate_names, granularity)


def write_csv(table, filename, overwrite=True):
    """Write ``table`` in the long format read by `load_csv`."""
    out = Table()
    out["timestamp"] = np.concatenate(
        [np.datetime_as_string(s.timestamps, unit="s") for s in table.series]
    )
    out["series_id"] = np.concatenate(
        [[s.series_id] * len(s) for s in table.series]
    )
    out["value"] = np.concatenate([s.values for s in table.series])
    for idx, name in enumerate(table.covariate_names):
        out[name] = np.concatenate(
            [s.covariates[:, idx] for s in table.series]
        )
    truth_names = list(table.series[0].truth) if table.series else []
    for name in truth_names:
        out[TRUTH_PREFIX + name] = np.concatenate(
            [s.truth[name] for s in table.series]
        )
    try:
        out.write(filename, format="ascii.csv", overwrite=overwrite)
    except OSError as exc:
        raise OSError("cannot write {0}: {1}".format(filename, exc)) from exc
    log.info("Wrote {0} rows to {1}".format(len(out), filename))
    return filename


# Normalization


def compute_stats(table):
    """
    Per-series mean and population standard deviation of ``table`` (which
    should be the training segment).
    """
    stats = OrderedDict()
    for s in table.series:
        values = s.values[s.history :]
        std = float(np.std(values))
        if not std > 0.0:
            raise IngestionError(
                "series {0} is constant over the training segment".format(
                    s.series_id
                )
            )
        stats[s.series_id] = NormalizationStats(float(np.mean(values)), std)
    return stats


def normalize(table, stats=None):
    """
    Z-score every series.

    Parameters
    ----------
    table : `TimeSeriesTable`
    stats : dict, optional
        Series id to `NormalizationStats`; computed from ``table`` if not
        given.

    Returns
    -------
    normalized : `TimeSeriesTable`
    stats : dict
    """
    if stats is None:
        stats = compute_stats(table)
    series = []
    for s in table.series:
        if s.series_id not in stats:
            raise ContractError(
                "no normalization statistics for series {0}".format(
                    s.series_id
                )
            )
        new = copy.copy(s)
        new.values = stats[s.series_id].normalize(s.values)
        series.append(new)
    return table.replace(series, stats=stats), stats


def denormalize_components(path, stats):
    """
    Map a normalized-unit forecast back to original units.

    The trend absorbs the series mean; trend and seasonality are scaled by the
    standard deviation and the variance by its square. The mean is rebuilt as
    ``trend + seasonality`` so the decomposition stays exact.
    """
    trend = path.trend * stats.std + stats.mean
    seasonality = path.seasonality * stats.std
    return ForecastPath(
        trend + seasonality,
        path.variance * stats.std ** 2,
        trend,
        seasonality,
        path.timestamps,
        path.series_id,
    )


# Calendar covariates


def calendar_features(timestamps, features, length=None):
    """
    Calendar covariates scaled to ``[-0.5, 0.5]``.

    Each feature is mapped with ``(value - min) / (max - min) - 0.5`` over its
    natural range: month 1-12, day of week 0-6 (Monday is 0), hour 0-23 and
    minute 0-59. ``age`` is the position in the series,
    ``index / (length - 1) - 0.5``.

    Parameters
    ----------
    timestamps : array of datetime64
    features : `DatasetProfile` or list of str
    length : int, optional
        Series length used for ``age``; defaults to ``len(timestamps)``.

    Returns
    -------
    covariates : array, shape ``(len(timestamps), len(features))``
    """
    if isinstance(features, DatasetProfile):
        features = features.calendar
    stamps = np.asarray(timestamps, dtype="datetime64[s]")
    days = stamps.astype("datetime64[D]")
    seconds_of_day = (stamps - days).astype(np.int64)
    length = len(stamps) if length is None else length

    columns = []
    for feature in features:
        validate_choice("calendar feature", feature, CALENDAR_FEATURES)
        if feature == "month":
            month = stamps.astype("datetime64[M]").astype(np.int64) % 12 + 1
            columns.append((month - 1) / 11.0 - 0.5)
        elif feature == "day_of_week":
            weekday = (days.astype(np.int64) + 3) % 7
            columns.append(weekday / 6.0 - 0.5)
        elif feature == "hour":
            columns.append((seconds_of_day // 3600) / 23.0 - 0.5)
        elif feature == "minute":
            columns.append((seconds_of_day // 60 % 60) / 59.0 - 0.5)
        else:
            if length > 1:
                columns.append(np.arange(len(stamps)) / (length - 1.0) - 0.5)
            else:
                columns.append(np.zeros(len(stamps)))
    if not columns:
        return np.zeros((len(stamps), 0))
    return np.column_stack(columns).astype(np.float64)


def add_calendar_covariates(table, features):
    """Append calendar covariates to every series of ``table``."""
    if isinstance(features, DatasetProfile):
        features = features.calendar
    features = list(features)
    series = []
    for s in table.series:
        new = copy.copy(s)
        new.covariates = np.hstack(
            [s.covariates, calendar_features(s.timestamps, features)]
        )
        series.append(new)
    return table.replace(
        series, covariate_names=table.covariate_names + features
    )


# Windows


@dataclass
class WindowSample:
    """
    One training or evaluation example.

    ``lagged[t]`` is the target preceding position ``t`` of the joint
    ``input_length + horizon`` sequence; ``targets`` is None for windows built
    for pure forecasting.
    """

    series_id: str
    series_index: int
    start: int
    inputs: np.ndarray
    targets: np.ndarray
    lagged: np.ndarray
    covariates: np.ndarray
    horizon_timestamps: np.ndarray = None
    truth: dict = field(default_factory=OrderedDict)

    @property
    def input_length(self):
        return len(self.inputs)

    @property
    def horizon(self):
        return len(self.lagged) - len(self.inputs)


@dataclass
class WindowBatch:
    lagged: np.ndarray
    covariates: np.ndarray
    series_index: np.ndarray
    inputs: np.ndarray
    targets: np.ndarray = None

    def __len__(self):
        return len(self.lagged)


def stack_windows(windows):
    """Stack windows of identical geometry into arrays."""
    if isinstance(windows, WindowBatch):
        return windows
    if len(windows) == 0:
        raise ContractError("cannot stack an empty list of windows")
    shapes = {(w.lagged.shape, w.covariates.shape) for w in windows}
    if len(shapes) != 1:
        raise ContractError(
            "windows in a batch should share their geometry, got "
            "{0}".format(sorted(shapes))
        )
    has_targets = all(w.targets is not None for w in windows)
    return WindowBatch(
        np.stack([w.lagged for w in windows]),
        np.stack([w.covariates for w in windows]),
        np.array([w.series_index for w in windows], dtype=int),
        np.stack([w.inputs for w in windows]),
        np.stack([w.targets for w in windows]) if has_targets else None,
    )


def _window(s, index, start, input_length, horizon):
    stop = start + input_length + horizon
    return WindowSample(
        s.series_id,
        index,
        start,
        s.values[start : start + input_length].copy(),
        s.values[start + input_length : stop].copy(),
        s.values[start - 1 : stop - 1].copy(),
        s.covariates[start:stop].copy(),
        s.timestamps[start + input_length : stop],
        OrderedDict(
            (key, col[start + input_length : stop])
            for key, col in s.truth.items()
        ),
    )


def make_windows(table, input_length, horizon, stride=1, series_ids=None):
    """
    Slide (input, horizon) windows over every series.

    A window starting at position ``p`` (``p >= 1``, one step is consumed by
    the lagged channel) uses inputs ``p ... p + input_length - 1`` and the
    following ``horizon`` targets. Steps of ``series.history`` are only used as
    inputs, never as horizon targets.

    Parameters
    ----------
    series_ids : list of str, optional
        Full list of series ids of the dataset, used to assign the index of
        each series for the ID embedding. Defaults to ``table.ids``.

    Returns
    -------
    windows : list of `WindowSample`
        Ordered by series, then chronologically.
    """
    input_length = validate_integer("input_length", input_length, 1)
    horizon = validate_integer("horizon", horizon, 1)
    stride = validate_integer("stride", stride, 1)
    ids = table.ids if series_ids is None else [str(i) for i in series_ids]

    windows = []
    for s in table.series:
        if len(s) < input_length + horizon + 1:
            log.warning(
                "Series {0} has {1} steps, fewer than the {2} needed for one "
                "window; skipping it".format(
                    s.series_id, len(s), input_length + horizon + 1
                )
            )
            continue
        first = max(1, s.history - input_length)
        last = len(s) - input_length - horizon
        for start in range(first, last + 1, stride):
            windows.append(
                _window(
                    s, ids.index(s.series_id), start, input_length, horizon
                )
            )

    if not windows:
        raise IngestionError(
            "no windows of {0}+{1} steps could be extracted".format(
                input_length, horizon
            )
        )
    log.debug("Extracted {0} windows".format(len(windows)))
    return windows


# Splits


def chrono_split(table, val_span, test_span, context=0):
    """
    Split every series into consecutive train, validation and test segments.

    Parameters
    ----------
    val_span, test_span : int
        Number of steps in the validation and test segments; the test segment
        is the final one.
    context : int, optional
        Steps preceding the validation and test segments that are prepended
        to them as conditioning history (recorded in ``series.history``).

    Returns
    -------
    train, val, test : `TimeSeriesTable`
    """
    val_span = validate_integer("val_span", val_span, 0)
    test_span = validate_integer("test_span", test_span, 0)
    context = validate_integer("context", context, 0)

    segments = ([], [], [])
    for s in table.series:
        n_train = len(s) - val_span - test_span
        if n_train < 1:
            raise ConfigurationError(
                "series {0}: validation and test spans ({1} + {2}) leave no "
                "training data out of {3} steps".format(
                    s.series_id, val_span, test_span, len(s)
                )
            )
        bounds = [(0, n_train), (n_train, n_train + val_span)]
        bounds.append((n_train + val_span, len(s)))
        for segment, (lo, hi) in zip(segments, bounds):
            start = 0 if lo == 0 else max(0, lo - context)
            segment.append(s.slice(start, hi, history=lo - start))

    return tuple(table.replace(list(segment)) for segment in segments)


def concat_tables(tables):
    """Reassemble consecutive segments, dropping their history prefixes."""
    first = tables[0]
    series = []
    for idx, s in enumerate(first.series):
        parts = [t.series[idx] for t in tables]
        truth = OrderedDict(
            (
                key,
                np.concatenate([p.truth[key][p.history :] for p in parts]),
            )
            for key in s.truth
        )
        series.append(
            SeriesData(
                s.series_id,
                np.concatenate([p.timestamps[p.history :] for p in parts]),
                np.concatenate([p.values[p.history :] for p in parts]),
                np.concatenate([p.covariates[p.history :] for p in parts]),
                truth,
            )
        )
    return first.replace(series)


# Synthetic data


@dataclass
class SynthConfig:
    """
    Generator of ``trend + amplitude * sin(2 pi t / period + phase) + noise``
    series. Each series draws its own phase; the random-walk trend uses steps
    of standard deviation ``trend_step``.
    """

    n_series: int = 1
    length: int = 2400
    period: int = 24
    trend: str = "random-walk"
    slope: float = 0.01
    intercept: float = 0.0
    trend_step: float = 0.01
    amplitude: float = 1.0
    noise: float = 0.1
    seed: int = 0
    start: str = "2020-01-01T00:00:00"
    granularity: str = "1h"

    def __post_init__(self):
        self.n_series = validate_integer("n_series", self.n_series, 1)
        self.length = validate_integer("length", self.length, 2)
        self.period = validate_integer("period", self.period, 2)
        validate_choice("trend", self.trend, ["none", "linear", "random-walk"])
        for name in ["slope", "intercept"]:
            validate_scalar(name, getattr(self, name))
        for name in ["trend_step", "amplitude", "noise"]:
            validate_scalar(name, getattr(self, name), "positive")
        self.seed = validate_integer("seed", self.seed, 0)
        validate_choice("granularity", self.granularity, list(GRANULARITIES))


def synth_generate(config):
    """
    Generate a seeded synthetic table with ground-truth components.

    Every series carries ``truth`` arrays ``trend``, ``seasonal`` and
    ``noise`` with ``value == trend + seasonal + noise`` exactly.
    """
    rng = np.random.default_rng(config.seed)
    t = np.arange(config.length)
    spacing = np.timedelta64(GRANULARITIES[config.granularity], "s")
    timestamps = np.datetime64(config.start, "s") + t * spacing

    series = []
    for idx in range(config.n_series):
        phase = rng.uniform(0.0, 2.0 * np.pi)
        if config.trend == "linear":
            trend = config.intercept + config.slope * t
        elif config.trend == "random-walk":
            steps = rng.normal(0.0, config.trend_step, config.length)
            steps[0] = 0.0
            trend = config.intercept + np.cumsum(steps)
        else:
            trend = np.full(config.length, float(config.intercept))
        seasonal = config.amplitude * np.sin(
            2.0 * np.pi * np.mod(t, config.period) / config.period + phase
        )
        noise = rng.normal(0.0, config.noise, config.length)
        value = trend + seasonal + noise
        series.append(
            SeriesData(
                str(idx),
                timestamps,
                value,
                None,
                OrderedDict(
                    [
                        ("trend", trend),
                        ("seasonal", seasonal),
                        ("noise", noise),
                    ]
                ),
            )
        )
    log.info(
        "Generated {0} synthetic series of {1} steps".format(
            config.n_series, config.length
        )
    )
    return TimeSeriesTable(series, [], config.granularity)


# Baselines


def persistence_forecast(window, steps_per_day, daily_span=20):
    """
    Repeat the last day of the input window over the horizon.

    The last ``steps_per_day`` inputs are tiled (or truncated) to the horizon
    length. For daily data (``steps_per_day == 1``) the last ``daily_span``
    inputs are used instead.
    """
    horizon = window.horizon
    if window.input_length < horizon:
        raise ContractError(
            "persistence needs at least as many inputs ({0}) as horizon "
            "steps ({1})".format(window.input_length, horizon)
        )
    span = daily_span if steps_per_day == 1 else steps_per_day
    if window.input_length < span:
        raise ContractError(
            "persistence needs the last {0} inputs, window has {1}".format(
                span, window.input_length
            )
        )
    return np.resize(window.inputs[-span:], horizon)


def last_value_forecast(window):
    """Repeat the final input value over the horizon."""
    return np.full(window.horizon, window.inputs[-1])
