# Licensed under a 3-clause BSD style license - see LICENSE.rst
import logging
import time

import numpy as np
from astropy.table import Table

from .errors import ContractError, NumericError, TrainingDivergedError
from .metrics import aggregate_metrics, composite_loss, point_metrics
from .models import ModelBundle, SSDNet
from .optim import Adam, EarlyStopping, clip_grad_norm
from .ssm import ForecastPath
from .tensor import Tape, backward, grad_check
from .utils import (
    denormalize_components,
    last_value_forecast,
    persistence_forecast,
    stack_windows,
)

__all__ = [
    "forward_train",
    "validation_loss",
    "train",
    "decode_forecasts",
    "decode_forecast",
    "window_attention",
    "evaluate",
    "evaluate_baseline",
    "model_grad_check",
]

log = logging.getLogger("ssdnet.core")
log.setLevel(logging.INFO)


def _model(bundle):
    return bundle.model if isinstance(bundle, ModelBundle) else bundle


def forward_train(bundle, windows, reduce=True):
    """
    Forward pass on observed lagged values, and the composite loss.

    Parameters
    ----------
    bundle : `~ssdnet.models.ModelBundle` or `~ssdnet.models.SSDNet`
    windows : list of `~ssdnet.utils.WindowSample`
        Windows (or a stacked `~ssdnet.utils.WindowBatch`) with horizon
        targets, in normalized units. The lagged channel carries the
        observed values over the whole horizon.
    reduce : bool, optional
        Return the batch-mean loss (default) or one loss per window.

    Returns
    -------
    loss : `~ssdnet.tensor.Tensor`
    paths : list of `~ssdnet.ssm.ForecastPath`
        Normalized-unit forecast of every window.
    """
    model = _model(bundle)
    batch = stack_windows(windows)
    if batch.targets is None:
        raise ContractError("forward_train needs windows with targets")
    out = model(batch)
    loss = composite_loss(
        out.means, out.variances, batch.targets, model.config.loss, reduce
    )
    paths = [
        ForecastPath(
            out.means.data[i],
            out.variances.data[i],
            out.trends.data[i],
            out.seasonals.data[i],
        )
        for i in range(len(batch))
    ]
    return loss, paths


def _batches(windows, batch_size, order=None):
    if order is None:
        order = np.arange(len(windows))
    for lo in range(0, len(order), batch_size):
        yield [windows[i] for i in order[lo : lo + batch_size]]


def validation_loss(bundle, windows, batch_size=256):
    """Mean loss of `forward_train` over ``windows`` in eval mode."""
    model = _model(bundle)
    if len(windows) == 0:
        raise ContractError("validation set is empty")
    training = model.training
    model.eval()
    total = 0.0
    for chunk in _batches(windows, batch_size):
        losses, _ = forward_train(model, chunk, reduce=False)
        total += float(np.sum(losses.data))
    model.train(training)
    return total / len(windows)


def _training_log(rows):
    return Table(
        rows=rows if rows else None,
        names=["epoch", "train_loss", "val_loss", "wall_ms", "improved"],
        dtype=[int, float, float, float, bool],
    )


def train(
    config,
    train_windows,
    val_windows,
    stats=None,
    covariate_names=None,
    series_ids=None,
    profile="custom",
):
    """
    Fit an SSDNet with Adam and early stopping on the validation loss.

    Parameters
    ----------
    config : `~ssdnet.models.TrainConfig`
    train_windows, val_windows : list of `~ssdnet.utils.WindowSample`
        Normalized windows of the training and validation segments.
    stats, covariate_names, series_ids, profile
        Stored in the returned bundle.

    Returns
    -------
    bundle : `~ssdnet.models.ModelBundle`
        Model holding the weights with the lowest validation loss.
    training_log : `~astropy.table.Table`
        One row per epoch: ``epoch``, ``train_loss``, ``val_loss``,
        ``wall_ms`` and ``improved``.

    Raises
    ------
    TrainingDivergedError
        If the loss becomes non-finite. The exception carries the bundle with
        the best weights so far and the log.
    """
    if len(train_windows) == 0 or len(val_windows) == 0:
        raise ContractError("training and validation sets must be non-empty")

    model = SSDNet(config)
    parameters = model.parameters()
    optimizer = Adam(parameters, config.learning_rate)
    stopper = EarlyStopping(config.patience)
    rng = np.random.default_rng([config.seed, 2])
    best_state = model.state_dict()
    rows = []

    def make_bundle():
        model.load_state_dict(best_state)
        model.eval()
        return ModelBundle(
            model,
            dict(stats or {}),
            list(covariate_names or []),
            list(series_ids or []),
            profile,
        )

    log.info(
        "Training {0} model ({1} parameters) on {2} windows, validating on "
        "{3}".format(
            config.encoder.kind,
            sum(p.size for p in parameters),
            len(train_windows),
            len(val_windows),
        )
    )

    for epoch in range(1, config.max_epochs + 1):
        start = time.perf_counter()
        model.train()
        total = 0.0
        order = rng.permutation(len(train_windows))
        for chunk in _batches(train_windows, config.batch_size, order):
            model.zero_grad()
            try:
                with Tape() as tape:
                    loss, _ = forward_train(model, chunk)
                value = loss.item()
                if not np.isfinite(value):
                    raise NumericError("loss is {0}".format(value))
            except NumericError as exc:
                raise TrainingDivergedError(
                    "training diverged in epoch {0}: {1}".format(epoch, exc),
                    bundle=make_bundle(),
                    log=_training_log(rows),
                ) from exc
            backward(tape, loss)
            norm = clip_grad_norm(parameters, config.clip_norm)
            optimizer.step()
            total += value * len(chunk)
            log.debug(
                "epoch {0}: batch loss {1:.5f}, gradient norm {2:.3g}".format(
                    epoch, value, norm
                )
            )

        train_loss = total / len(train_windows)
        val_loss = validation_loss(model, val_windows, config.batch_size)
        if not np.isfinite(val_loss):
            raise TrainingDivergedError(
                "validation loss is {0} in epoch {1}".format(val_loss, epoch),
                bundle=make_bundle(),
                log=_training_log(rows),
            )
        stop = stopper.step(val_loss)
        if stopper.improved:
            best_state = model.state_dict()
        wall_ms = 1e3 * (time.perf_counter() - start)
        rows.append((epoch, train_loss, val_loss, wall_ms, stopper.improved))
        log.info(
            "Epoch {0:>3d}: train loss {1:.5f}, val loss {2:.5f} "
            "({3:.0f} ms){4}".format(
                epoch,
                train_loss,
                val_loss,
                wall_ms,
                " *" if stopper.improved else "",
            )
        )
        if stop:
            log.info(
                "No improvement for {0} epochs, stopping after epoch "
                "{1}".format(stopper.counter, epoch)
            )
            break

    log.info("Best validation loss: {0:.5f}".format(stopper.best))
    return make_bundle(), _training_log(rows)


def _decode_batch(model, batch):
    input_length = model.config.encoder.input_length
    horizon = model.config.encoder.horizon
    length = input_length + horizon
    if batch.lagged.shape[1] != length or batch.covariates.shape[1] != length:
        raise ContractError(
            "windows need {0} lagged values and horizon covariates over {1} "
            "positions".format(input_length + 1, length)
        )
    if not np.all(np.isfinite(batch.covariates)):
        raise ContractError("horizon covariates are missing (non-finite)")
    known = batch.lagged[:, : input_length + 1]
    if not np.all(np.isfinite(known)):
        raise ContractError("window inputs have non-finite values")

    lagged = np.zeros_like(batch.lagged)
    lagged[:, : input_length + 1] = known
    for k in range(horizon):
        out = model.forward(lagged, batch.covariates, batch.series_index)
        if k + 1 < horizon:
            lagged[:, input_length + k + 1] = out.means.data[:, k]
    return out


def decode_forecasts(bundle, windows, batch_size=256, denormalize=True):
    """
    Autoregressive forecasts for many windows.

    Only the inputs (and the value preceding them) of each window are used;
    at horizon step ``k`` the lagged channel holds the predicted median of
    step ``k - 1``. One forward pass is made per horizon step.

    Parameters
    ----------
    bundle : `~ssdnet.models.ModelBundle`
    windows : list of `~ssdnet.utils.WindowSample`
        Normalized windows; targets are ignored.
    denormalize : bool, optional
        Map the forecasts back to original units with the bundle statistics.

    Returns
    -------
    paths : list of `~ssdnet.ssm.ForecastPath`
    """
    model = _model(bundle)
    stats = bundle.stats if isinstance(bundle, ModelBundle) else {}
    training = model.training
    model.eval()
    paths = []
    try:
        for chunk in _batches(windows, batch_size):
            out = _decode_batch(model, stack_windows(chunk))
            for i, window in enumerate(chunk):
                path = ForecastPath(
                    out.means.data[i],
                    out.variances.data[i],
                    out.trends.data[i],
                    out.seasonals.data[i],
                    window.horizon_timestamps,
                    window.series_id,
                )
                if denormalize and window.series_id in stats:
                    path = denormalize_components(
                        path, stats[window.series_id]
                    )
                paths.append(path)
    finally:
        model.train(training)
    return paths


def decode_forecast(bundle, window, denormalize=True):
    """Autoregressive forecast of a single window."""
    return decode_forecasts(bundle, [window], denormalize=denormalize)[0]


def window_attention(bundle, window):
    """Attention maps of the final decoding pass over ``window``."""
    model = _model(bundle)
    if model.kind != "transformer":
        raise ContractError(
            "no attention maps for {0} encoder".format(model.kind)
        )
    training = model.training
    model.eval()
    try:
        out = _decode_batch(model, stack_windows([window]))
    finally:
        model.train(training)
    return out.attention


def _original_units(bundle_stats, window, values):
    stats = bundle_stats.get(window.series_id) if bundle_stats else None
    return values if stats is None else stats.denormalize(values)


def evaluate(bundle, windows):
    """
    Decode every window and score the forecasts against its targets.

    Returns
    -------
    report : `~ssdnet.metrics.MetricsReport`
        Metrics over all horizon steps in original units.
    """
    if len(windows) == 0:
        raise ContractError("test set is empty")
    paths = decode_forecasts(bundle, windows)
    targets = [_original_units(bundle.stats, w, w.targets) for w in windows]
    return aggregate_metrics(paths, targets)


def evaluate_baseline(
    windows, stats=None, steps_per_day=24, daily_span=20, kind="persistence"
):
    """
    Score a naive forecast through the same metric path as `evaluate`.

    Parameters
    ----------
    kind : {'persistence', 'last-value'}
        Repeat the last day of the inputs, or the last input value.
    """
    if len(windows) == 0:
        raise ContractError("test set is empty")
    predictions, targets = [], []
    for w in windows:
        if kind == "persistence":
            forecast = persistence_forecast(w, steps_per_day, daily_span)
        elif kind == "last-value":
            forecast = last_value_forecast(w)
        else:
            raise ContractError("unknown baseline {0!r}".format(kind))
        predictions.append(_original_units(stats, w, forecast))
        targets.append(_original_units(stats, w, w.targets))
    return point_metrics(
        predictions, targets, [w.series_id for w in windows]
    )


def model_grad_check(bundle, windows, eps=1e-5):
    """
    Finite-difference check of the loss gradient with respect to every model
    parameter, with dropout disabled.

    Returns
    -------
    max_error : float
    """
    model = _model(bundle)
    training = model.training
    model.eval()
    batch = stack_windows(windows)
    try:
        return grad_check(
            lambda *params: forward_train(model, batch)[0],
            model.parameters(),
            eps=eps,
        )
    finally:
        model.train(training)
