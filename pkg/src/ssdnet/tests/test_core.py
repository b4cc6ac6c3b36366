# Licensed under a 3-clause BSD style license - see LICENSE.rst
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from .. import core
from ..core import (
    decode_forecast,
    decode_forecasts,
    evaluate,
    evaluate_baseline,
    forward_train,
    model_grad_check,
    train,
    validation_loss,
    window_attention,
)
from ..errors import ContractError, NumericError, TrainingDivergedError
from ..models import ModelBundle, SSDNet
from ..optim import Adam, EarlyStopping, clip_grad_norm
from ..ssm import within_innovation_bounds
from ..tensor import Parameter
from .fixtures import (  # noqa: F401
    TOY_SEASON,
    toy_bundle,
    toy_config,
    windows,
)


def test_forward_train(windows):
    model = SSDNet(toy_config())
    loss, paths = forward_train(model, windows["train"][:5])
    assert loss.shape == ()
    assert np.isfinite(loss.item())
    assert len(paths) == 5
    for path in paths:
        assert len(path) == 3
        assert_allclose(path.mean, path.trend + path.seasonality, rtol=1e-15)
        assert np.all(path.variance > 0.0)

    forecast_only = [replace(w, targets=None) for w in windows["train"][:2]]
    with pytest.raises(ContractError):
        forward_train(model, forecast_only)


def test_innovations_skip_lagged_slots_by_default(windows):
    model = SSDNet(toy_config())
    assert_array_equal(model.innovation_mask, [1.0, 1.0, 0.0])
    free = SSDNet(toy_config(lag_innovations=True))
    assert_array_equal(free.innovation_mask, [1.0, 1.0, 1.0])

    model.eval()
    _, paths = forward_train(model, windows["train"][:8])
    for path in paths:
        assert within_innovation_bounds(path, TOY_SEASON)


def test_model_gradient(windows):
    bundle = ModelBundle(SSDNet(toy_config()))
    assert model_grad_check(bundle, windows["train"][:1]) < 1e-4


def test_lstm_model_gradient(windows):
    bundle = ModelBundle(SSDNet(toy_config("lstm")))
    assert model_grad_check(bundle, windows["train"][:1]) < 1e-4


def test_training_is_deterministic(windows):
    logs = [
        train(toy_config(max_epochs=2), windows["train"], windows["val"])[1]
        for _ in range(2)
    ]
    assert logs[0].colnames == [
        "epoch",
        "train_loss",
        "val_loss",
        "wall_ms",
        "improved",
    ]
    assert list(logs[0]["epoch"]) == [1, 2]
    for name in ["train_loss", "val_loss", "improved"]:
        assert_array_equal(logs[0][name], logs[1][name])


def test_best_weights_are_kept(windows):
    bundle, log = train(
        toy_config(max_epochs=4, learning_rate=0.02),
        windows["train"],
        windows["val"],
        windows["stats"],
    )
    best = np.min(log["val_loss"])
    assert_allclose(validation_loss(bundle, windows["val"], 16), best)
    assert log["improved"][int(np.argmin(log["val_loss"]))]
    assert not bundle.model.training
    assert bundle.stats is not windows["stats"]
    assert bundle.stats == windows["stats"]


def test_early_stopping():
    stopper = EarlyStopping(patience=1)
    assert not stopper.step(1.0) and stopper.improved
    assert not stopper.step(1.5) and not stopper.improved
    assert stopper.step(1.2)
    assert stopper.best == 1.0


def test_adam_and_clipping():
    p = Parameter(np.array([1.0, -2.0]))
    p.grad = np.array([3.0, 4.0])
    assert clip_grad_norm([p], 1.0) == 5.0
    assert_allclose(p.grad, [0.6, 0.8])
    optimizer = Adam([p], 0.1)
    optimizer.step()
    # the first bias-corrected step moves every entry by the learning rate
    assert_allclose(p.data, [0.9, -2.1], rtol=1e-6)
    optimizer.zero_grad()
    assert np.all(p.grad == 0.0)


def test_divergence(windows, monkeypatch):
    def diverge(*args, **kwargs):
        raise NumericError("log produced non-finite values")

    monkeypatch.setattr(core, "composite_loss", diverge)
    with pytest.raises(TrainingDivergedError) as excinfo:
        train(toy_config(), windows["train"], windows["val"])
    assert isinstance(excinfo.value.bundle, ModelBundle)
    assert len(excinfo.value.log) == 0


def test_decode_forecast(toy_bundle, windows):
    w = windows["test"][0]
    path = decode_forecast(toy_bundle, w)
    assert path.series_id == w.series_id
    assert_array_equal(path.timestamps, w.horizon_timestamps)
    assert_array_equal(path.q50, path.mean)
    assert_allclose(path.mean - path.trend - path.seasonality, 0.0, atol=1e-9)
    assert np.all(path.variance > 0.0)

    # targets and observed lagged values past the inputs are never read
    hidden = w.lagged.copy()
    hidden[w.input_length + 1 :] = 1e6
    blind = replace(w, targets=None, lagged=hidden)
    assert_array_equal(decode_forecast(toy_bundle, blind).mean, path.mean)


def test_decode_first_step_matches_observed_pass(toy_bundle, windows):
    w = windows["test"][1]
    _, forced = forward_train(toy_bundle, [w])
    decoded = decode_forecast(toy_bundle, w, denormalize=False)
    assert_allclose(decoded.mean[0], forced[0].mean[0], rtol=1e-12)
    assert within_innovation_bounds(decoded, toy_bundle.config.season)


def test_decode_feeds_back_predictions(toy_bundle, windows):
    w = windows["test"][2]
    path = decode_forecast(toy_bundle, w, denormalize=False)
    start = w.input_length + 1

    # one pass over the fully fed-back sequence reproduces every step
    fed = w.lagged.copy()
    fed[start:] = path.mean[:-1]
    _, replayed = forward_train(toy_bundle, [replace(w, lagged=fed)])
    assert_allclose(replayed[0].mean, path.mean, rtol=1e-12, atol=1e-14)

    nudged = fed.copy()
    nudged[start] += 1.0
    _, moved = forward_train(toy_bundle, [replace(w, lagged=nudged)])
    assert moved[0].mean[0] == replayed[0].mean[0]
    assert moved[0].mean[1] != replayed[0].mean[1]


def test_persistence_by_hand(windows):
    w = windows["test"][0]
    first = replace(
        w,
        inputs=np.array([0.0, 0.0, 0.0, 1.0, 2.0, 3.0]),
        targets=np.array([2.0, 2.0, 2.0]),
    )
    second = replace(
        w,
        inputs=np.array([0.0, 0.0, 0.0, 4.0, 4.0, 4.0]),
        targets=np.array([6.0, 3.0, 4.0]),
    )
    report = evaluate_baseline([first, second], steps_per_day=3)
    # errors 1, 0, -1 and 2, -1, 0 over sum |y| = 19
    assert_allclose(report.rho50, 5.0 / 19.0, rtol=1e-12)
    assert_allclose(report.rho90, 2.0 * 2.9 / 19.0, rtol=1e-12)
    assert_allclose(report.mae, 5.0 / 6.0, rtol=1e-12)


def test_batched_decoding(toy_bundle, windows):
    batch = decode_forecasts(toy_bundle, windows["test"][:4], batch_size=3)
    for w, path in zip(windows["test"][:4], batch):
        assert_allclose(
            decode_forecast(toy_bundle, w).mean, path.mean, rtol=1e-12
        )


def test_decode_errors(toy_bundle, windows):
    w = windows["test"][0]
    inputs = w.lagged.copy()
    inputs[2] = np.nan
    with pytest.raises(ContractError):
        decode_forecast(toy_bundle, replace(w, lagged=inputs))
    with pytest.raises(ContractError):
        decode_forecast(toy_bundle, replace(w, lagged=w.lagged[:-1]))


def test_window_attention(toy_bundle, windows):
    maps = window_attention(toy_bundle, windows["test"][0])
    assert len(maps) == 1
    assert_allclose(maps[0].weights.sum(axis=-1), 1.0, atol=1e-9)

    lstm = ModelBundle(SSDNet(toy_config("lstm")))
    with pytest.raises(ContractError) as excinfo:
        window_attention(lstm, windows["test"][0])
    assert "no attention maps for lstm encoder" in str(excinfo.value)


def test_evaluate(toy_bundle, windows):
    report = evaluate(toy_bundle, windows["test"])
    assert np.isfinite(report.rho50) and report.rho50 > 0.0
    assert report.rho90 > 0.0
    assert set(report.per_series) == {"0", "1"}
    assert evaluate(toy_bundle, windows["test"]).rho50 == report.rho50
    with pytest.raises(ContractError):
        evaluate(toy_bundle, [])


def test_evaluate_baseline(windows):
    persistence = evaluate_baseline(windows["test"], windows["stats"], 3)
    last_value = evaluate_baseline(
        windows["test"], windows["stats"], kind="last-value"
    )
    assert persistence.rho50 > 0.0 and last_value.rho50 > 0.0
    with pytest.raises(ContractError):
        evaluate_baseline(windows["test"], kind="climatology")


def test_training_loss_decreases(windows):
    _, log = train(
        toy_config(max_epochs=5, patience=5, learning_rate=0.01),
        windows["train"],
        windows["val"],
    )
    assert len(log) == 5
    assert log["train_loss"][-1] < log["train_loss"][0]


def test_zero_patience_keeps_first_epoch(windows):
    bundle, log = train(
        toy_config(max_epochs=1, patience=0), windows["train"], windows["val"]
    )
    assert len(log) == 1 and log["improved"][0]
    assert_allclose(
        validation_loss(bundle, windows["val"], 16), log["val_loss"][0]
    )
