# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
End-to-end learning on a seeded synthetic dataset. These runs take minutes;
set ``SSDNET_RUN_SLOW=1`` to enable them.
"""
import numpy as np
import pytest

from ..core import decode_forecasts, evaluate, evaluate_baseline, train
from ..encoders import EncoderConfig
from ..models import TrainConfig
from ..utils import (
    SynthConfig,
    chrono_split,
    make_windows,
    normalize,
    synth_generate,
)
from .fixtures import RUN_SLOW  # noqa: F401

SEASON = 24


@pytest.fixture(scope="module")
def synthetic():
    table = synth_generate(
        SynthConfig(
            n_series=1,
            length=2400,
            period=SEASON,
            trend="random-walk",
            trend_step=0.01,
            amplitude=1.0,
            noise=0.1,
            seed=42,
        )
    )
    segments = chrono_split(table, 480, 480, context=SEASON + 1)
    train_table, stats = normalize(segments[0])
    val_table, _ = normalize(segments[1], stats)
    test_table, _ = normalize(segments[2], stats)
    return {
        "train": make_windows(train_table, SEASON, SEASON),
        "val": make_windows(val_table, SEASON, SEASON, SEASON),
        "test": make_windows(test_table, SEASON, SEASON, SEASON),
        "stats": stats,
    }


def _fit(kind, data):
    config = TrainConfig(
        encoder=EncoderConfig(
            kind=kind,
            d_hid=16,
            n_layers=2,
            d_kv=6,
            n_heads=2,
            input_length=SEASON,
            horizon=SEASON,
        ),
        season=SEASON,
        learning_rate=0.005,
        batch_size=32,
        max_epochs=60,
        patience=10,
        seed=0,
    )
    bundle, _ = train(config, data["train"], data["val"], data["stats"])
    return bundle


@pytest.mark.skipif("not RUN_SLOW")
@pytest.mark.parametrize("kind", ["transformer", "lstm"])
def test_beats_persistence(synthetic, kind):
    bundle = _fit(kind, synthetic)
    report = evaluate(bundle, synthetic["test"])
    persistence = evaluate_baseline(
        synthetic["test"], synthetic["stats"], steps_per_day=SEASON
    )
    assert report.rho50 < persistence.rho50


@pytest.mark.skipif("not RUN_SLOW")
def test_decomposition(synthetic):
    bundle = _fit("transformer", synthetic)
    paths = decode_forecasts(bundle, synthetic["test"])
    seasonality = np.concatenate([p.seasonality for p in paths])
    truth = np.concatenate([w.truth["seasonal"] for w in synthetic["test"]])
    assert np.corrcoef(seasonality, truth)[0, 1] >= 0.8

    trend_variation = sum(np.sum(np.abs(np.diff(p.trend))) for p in paths)
    seasonal_variation = sum(
        np.sum(np.abs(np.diff(p.seasonality))) for p in paths
    )
    assert trend_variation <= seasonal_variation
