# Licensed under a 3-clause BSD style license - see LICENSE.rst
import json
import os

import h5py
import numpy as np
import yaml
from astropy import log
from astropy.io import ascii
from astropy.table import Table

from .errors import CheckpointError, ConfigurationError
from .models import ModelBundle, SSDNet, TrainConfig
from .utils import NormalizationStats

__all__ = [
    "FORMAT_VERSION",
    "save_bundle",
    "load_bundle",
    "save_training_log",
    "read_training_log",
    "save_forecast_table",
    "save_forecast_json",
    "save_metrics",
    "save_manifest",
    "read_manifest",
]

FORMAT_VERSION = 1

FORECAST_COLUMNS = [
    "timestamp",
    "mean",
    "variance",
    "q50",
    "q90",
    "trend",
    "seasonality",
]


def _can_write(filename, clobber):
    if os.path.exists(filename) and not clobber:
        log.warning(
            "Not writing {0} because it exists and clobber is False".format(
                filename
            )
        )
        return False
    return True


def save_bundle(filename, bundle, clobber=False, compression=None):
    """
    Save a trained model to an hdf5 checkpoint.

    The root group attributes hold the format version, the training
    configuration and a manifest of parameter shapes as YAML text, the
    covariate schema, series ids and dataset profile. Every parameter is a
    little-endian float64 dataset in the ``parameters`` group; normalization
    statistics live in the ``stats`` group.

    Parameters
    ----------
    filename : str
        Filename for the hdf5 file. If the extension is not 'h5' or 'hdf5',
        the suffix '.h5' is appended.
    bundle : `~ssdnet.models.ModelBundle`
    clobber : bool, optional
        Whether to overwrite an existing file.
    compression : str, optional
        hdf5 compression filter for the parameter datasets.

    Returns
    -------
    filename : str or None
        Name of the written file, or None if nothing was written.
    """
    if filename.split(".")[-1] not in ["h5", "hdf5"]:
        filename += ".h5"
    if not _can_write(filename, clobber):
        return None

    state = bundle.model.state_dict()
    manifest = {name: list(value.shape) for name, value in state.items()}

    with h5py.File(filename, "w") as f:
        f.attrs["format_version"] = FORMAT_VERSION
        f.attrs["config"] = yaml.safe_dump(bundle.config.to_dict())
        f.attrs["manifest"] = yaml.safe_dump(manifest)
        f.attrs["profile"] = bundle.profile
        f.attrs["covariate_names"] = yaml.safe_dump(
            list(bundle.covariate_names)
        )
        f.attrs["series_ids"] = yaml.safe_dump(list(bundle.series_ids))

        group = f.create_group("parameters")
        for name, value in state.items():
            group.create_dataset(
                name, data=value.astype("<f8"), compression=compression
            )

        ids = list(bundle.stats)
        stats = f.create_group("stats")
        stats.attrs["series_ids"] = yaml.safe_dump([str(i) for i in ids])
        stats.create_dataset(
            "mean",
            data=np.array([bundle.stats[i].mean for i in ids], dtype="<f8"),
        )
        stats.create_dataset(
            "std",
            data=np.array([bundle.stats[i].std for i in ids], dtype="<f8"),
        )

    log.info("Saved checkpoint to {0}".format(filename))
    return filename


def _attr(f, key):
    if key not in f.attrs:
        raise CheckpointError("checkpoint has no {0} attribute".format(key))
    value = f.attrs[key]
    return value.decode() if isinstance(value, bytes) else value


def load_bundle(filename):
    """
    Read a checkpoint written by `save_bundle`.

    Raises
    ------
    CheckpointError
        On a format version mismatch, or a missing or mis-shaped parameter.
        The message names the offending field.
    """
    try:
        f = h5py.File(filename, "r")
    except OSError as exc:
        raise OSError("cannot read {0}: {1}".format(filename, exc)) from exc

    with f:
        version = int(_attr(f, "format_version"))
        if version != FORMAT_VERSION:
            raise CheckpointError(
                "format_version: file has {0}, expected {1}".format(
                    version, FORMAT_VERSION
                )
            )
        try:
            config = TrainConfig.from_dict(yaml.safe_load(_attr(f, "config")))
        except (ConfigurationError, TypeError) as exc:
            raise CheckpointError("config: {0}".format(exc)) from exc
        manifest = yaml.safe_load(_attr(f, "manifest"))

        if "parameters" not in f:
            raise CheckpointError("checkpoint has no parameters group")
        group = f["parameters"]
        state = {}
        for name, shape in manifest.items():
            if name not in group:
                raise CheckpointError("parameter {0} is missing".format(name))
            value = group[name][()]
            if list(value.shape) != list(shape):
                raise CheckpointError(
                    "parameter {0} has shape {1}, manifest says {2}".format(
                        name, value.shape, tuple(shape)
                    )
                )
            state[name] = value

        model = SSDNet(config)
        model.load_state_dict(state)
        model.eval()

        stats = {}
        if "stats" in f:
            ids = yaml.safe_load(_attr(f["stats"], "series_ids"))
            means = f["stats/mean"][()]
            stds = f["stats/std"][()]
            for series_id, mean, std in zip(ids, means, stds):
                stats[series_id] = NormalizationStats(float(mean), float(std))

        bundle = ModelBundle(
            model,
            stats,
            yaml.safe_load(_attr(f, "covariate_names")),
            yaml.safe_load(_attr(f, "series_ids")),
            _attr(f, "profile"),
        )

    log.info("Loaded {0} checkpoint from {1}".format(model.kind, filename))
    return bundle


def save_training_log(training_log, filename):
    """Write the per-epoch training log as CSV."""
    table = Table(training_log, copy=True)
    table["improved"] = np.asarray(table["improved"], dtype=int)
    table.write(filename, format="ascii.csv", overwrite=True)
    return filename


def read_training_log(filename):
    return ascii.read(filename, format="csv")


def _timestamps(path):
    if path.timestamps is None:
        return [str(i + 1) for i in range(len(path))]
    return list(np.datetime_as_string(path.timestamps, unit="s"))


def save_forecast_table(paths, filename):
    """
    Write the decomposed forecast of one or more paths as CSV with columns
    ``timestamp, mean, variance, q50, q90, trend, seasonality``.
    """
    table = Table()
    table["timestamp"] = sum((_timestamps(p) for p in paths), [])
    table["mean"] = np.concatenate([p.mean for p in paths])
    table["variance"] = np.concatenate([p.variance for p in paths])
    table["q50"] = np.concatenate([p.quantile(0.5) for p in paths])
    table["q90"] = np.concatenate([p.quantile(0.9) for p in paths])
    table["trend"] = np.concatenate([p.trend for p in paths])
    table["seasonality"] = np.concatenate([p.seasonality for p in paths])
    table.write(filename, format="ascii.csv", overwrite=True)
    log.info("Wrote forecast decomposition to {0}".format(filename))
    return table


def save_forecast_json(paths, filename):
    """Write forecasts as a JSON array of per-step records."""
    records = []
    for path in paths:
        q50, q90 = path.quantile(0.5), path.quantile(0.9)
        for step, timestamp in enumerate(_timestamps(path)):
            records.append(
                {
                    "series_id": path.series_id,
                    "step": step + 1,
                    "timestamp": timestamp,
                    "mean": float(path.mean[step]),
                    "variance": float(path.variance[step]),
                    "q50": float(q50[step]),
                    "q90": float(q90[step]),
                    "trend": float(path.trend[step]),
                    "seasonality": float(path.seasonality[step]),
                }
            )
    with open(filename, "w") as fh:
        json.dump(records, fh, indent=2)
    return records


def save_metrics(metrics, filename):
    """Write a flat mapping of metric names to floats as JSON."""
    with open(filename, "w") as fh:
        json.dump(dict(metrics), fh, indent=2)
    return filename


def save_manifest(manifest, filename):
    """Write a run manifest (resolved configuration, seed, outputs) as YAML."""
    with open(filename, "w") as fh:
        yaml.safe_dump(manifest, fh, default_flow_style=False)
    return filename


def read_manifest(filename):
    with open(filename) as fh:
        return yaml.safe_load(fh)
