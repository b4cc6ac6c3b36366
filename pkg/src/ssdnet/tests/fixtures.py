# Licensed under a 3-clause BSD style license - see LICENSE.rst
import os

import numpy as np
import pytest
import yaml

from ..core import train
from ..encoders import EncoderConfig
from ..models import TrainConfig
from ..utils import (
    SynthConfig,
    chrono_split,
    make_windows,
    normalize,
    synth_generate,
)

RUN_SLOW = bool(os.environ.get("SSDNET_RUN_SLOW"))

# Smallest model worth checking: one layer, one head, s=3, T_l=6, T_h=3
TOY_INPUT_LENGTH = 6
TOY_HORIZON = 3
TOY_SEASON = 3


def toy_config(kind="transformer", **kwargs):
    encoder = EncoderConfig(
        kind=kind,
        d_hid=4,
        n_layers=1,
        d_kv=4,
        n_heads=1,
        input_length=TOY_INPUT_LENGTH,
        horizon=TOY_HORIZON,
        n_series=kwargs.pop("n_series", 2),
    )
    defaults = dict(season=TOY_SEASON, max_epochs=3, batch_size=16, seed=0)
    defaults.update(kwargs)
    return TrainConfig(encoder=encoder, **defaults)


def toy_table(n_series=2, length=120, seed=1):
    return synth_generate(
        SynthConfig(
            n_series=n_series,
            length=length,
            period=TOY_SEASON,
            noise=0.05,
            seed=seed,
        )
    )


def toy_split(table=None):
    """Normalized train/val/test tables and their statistics."""
    table = toy_table() if table is None else table
    segments = chrono_split(table, 30, 30, context=TOY_INPUT_LENGTH + 1)
    train_table, stats = normalize(segments[0])
    val_table, _ = normalize(segments[1], stats)
    test_table, _ = normalize(segments[2], stats)
    return train_table, val_table, test_table, stats


def toy_windows(segment):
    return make_windows(segment, TOY_INPUT_LENGTH, TOY_HORIZON)


@pytest.fixture(scope="module")
def windows():
    train_table, val_table, test_table, stats = toy_split()
    return {
        "train": toy_windows(train_table),
        "val": toy_windows(val_table),
        "test": make_windows(
            test_table, TOY_INPUT_LENGTH, TOY_HORIZON, TOY_HORIZON
        ),
        "stats": stats,
        "series_ids": train_table.ids,
    }


@pytest.fixture(scope="module")
def toy_bundle(windows):
    bundle, training_log = train(
        toy_config(),
        windows["train"],
        windows["val"],
        windows["stats"],
        [],
        windows["series_ids"],
    )
    return bundle


def write_run_config(directory, **overrides):
    """Write a toy YAML run configuration and return its filename."""
    config = {
        "dataset": os.path.join(str(directory), "toy.csv"),
        "output_dir": os.path.join(str(directory), "run"),
        "seed": 0,
        "profile": {
            "name": "custom",
            "granularity": "1h",
            "steps_per_day": TOY_SEASON,
            "input_length": TOY_INPUT_LENGTH,
            "horizon": TOY_HORIZON,
            "season": TOY_SEASON,
        },
        "split": {"val": 30, "test": 30},
        "encoder": {"d_hid": 4, "n_layers": 1, "d_kv": 4, "n_heads": 1},
        "train": {"max_epochs": 2, "batch_size": 16},
        "synth": {"n_series": 2, "length": 120, "period": TOY_SEASON},
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key].update(value)
        else:
            config[key] = value
    filename = os.path.join(str(directory), "run.yaml")
    with open(filename, "w") as fh:
        yaml.safe_dump(config, fh)
    return filename


def random_innovation_inputs(rng, s, horizon, saturate=False):
    """Initial state and innovations in [-0.5, 0.5] from random head inputs."""
    scale = 10.0 if saturate else 2.0
    pre = rng.normal(0.0, scale, (horizon + 1, s))
    bounded = np.clip(pre / 6.0 + 0.5, 0.0, 1.0) - 0.5
    return bounded[0], bounded[1:]
