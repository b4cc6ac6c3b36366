# Licensed under a 3-clause BSD style license - see LICENSE.rst
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError
from .tensor import Tensor, absolute, log, reduce_mean
from .validator import validate_scalar

__all__ = [
    "LossConfig",
    "MetricsReport",
    "composite_loss",
    "pinball",
    "quantile_loss",
    "evaluate_forecast",
    "aggregate_metrics",
    "point_metrics",
]

LOG_2PI = np.log(2.0 * np.pi)


@dataclass
class LossConfig:
    """Weight ``a`` of the Gaussian NLL term in the composite loss."""

    a: float = 0.5

    def __post_init__(self):
        self.a = float(validate_scalar("a", self.a, "positive"))


def composite_loss(means, variances, targets, config=None, reduce=True):
    """
    ``a * NLL + MAE`` of targets under per-step Gaussian forecasts.

    Parameters
    ----------
    means, variances : `~ssdnet.tensor.Tensor` or array, shape ``(..., T_h)``
        Predicted means and (strictly positive) variances.
    targets : array, shape ``(..., T_h)``
        Observed values.
    config : `LossConfig`, optional
        Defaults to ``a = 0.5``.
    reduce : bool, optional
        If True (default) return the mean over leading (batch) dimensions,
        otherwise one loss per sample.

    Returns
    -------
    loss : `~ssdnet.tensor.Tensor`
        ``NLL = 0.5 * (log(2 pi) + mean(log var) + mean((y - mean)^2 / var))``
        and ``MAE = mean(|y - mean|)``, both averaged over the horizon.
    """
    if config is None:
        config = LossConfig()
    means = means if isinstance(means, Tensor) else Tensor(means)
    if not isinstance(variances, Tensor):
        variances = Tensor(variances)
    targets = np.asarray(targets, dtype=np.float64)

    if not means.shape == variances.shape == targets.shape:
        raise ContractError(
            "composite_loss: means {0}, variances {1} and targets {2} "
            "should have the same shape".format(
                means.shape, variances.shape, targets.shape
            )
        )
    if np.any(~(variances.data > 0.0)):
        raise ContractError("composite_loss: variances should be positive")

    diff = Tensor(targets) - means
    nll = 0.5 * (
        LOG_2PI
        + reduce_mean(log(variances), axis=-1)
        + reduce_mean(diff * diff / variances, axis=-1)
    )
    mae = reduce_mean(absolute(diff), axis=-1)
    loss = config.a * nll + mae
    if reduce and loss.ndim > 0:
        loss = reduce_mean(loss)
    return loss


def pinball(targets, predictions, rho):
    """Per-step pinball penalty ``P_rho(y, y_hat)``; zero iff equal."""
    y = np.asarray(targets, dtype=np.float64)
    y_hat = np.asarray(predictions, dtype=np.float64)
    return np.where(y > y_hat, rho * (y - y_hat), (1.0 - rho) * (y_hat - y))


def quantile_loss(targets, predictions, rho):
    """
    Normalized rho-quantile loss, ``2 * sum(P_rho) / sum(|y|)``.

    Examples
    --------
    >>> quantile_loss([2.0, -1.0], [1.0, 1.0], 0.5)
    1.0
    """
    rho = validate_scalar("rho", rho, "probability", error=ContractError)
    y = np.asarray(targets, dtype=np.float64).ravel()
    y_hat = np.asarray(predictions, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise ContractError(
            "quantile_loss: {0} targets but {1} predictions".format(
                len(y), len(y_hat)
            )
        )
    denominator = np.sum(np.abs(y))
    if denominator == 0.0:
        raise ContractError(
            "quantile_loss is undefined when all targets are zero"
        )
    return float(2.0 * np.sum(pinball(y, y_hat, rho)) / denominator)


@dataclass
class MetricsReport:
    rho50: float
    rho90: float
    mae: float
    per_series: dict = field(default_factory=OrderedDict)

    def to_dict(self):
        """Flat mapping of metric names to floats.

        Per-series values are keyed ``series<id>.<metric>``.
        """
        out = OrderedDict(
            [("rho50", self.rho50), ("rho90", self.rho90), ("mae", self.mae)]
        )
        for series_id, metrics in self.per_series.items():
            for key, value in metrics.items():
                out["series{0}.{1}".format(series_id, key)] = value
        return out


def _scores(targets, q50, q90):
    return OrderedDict(
        [
            ("rho50", quantile_loss(targets, q50, 0.5)),
            ("rho90", quantile_loss(targets, q90, 0.9)),
            ("mae", float(np.mean(np.abs(targets - q50)))),
        ]
    )


def _report(targets, q50, q90, series_ids):
    totals = _scores(targets, q50, q90)
    per_series = OrderedDict()
    if series_ids is not None:
        for series_id in sorted(set(series_ids), key=str):
            sel = np.array([sid == series_id for sid in series_ids])
            if np.any(targets[sel] != 0.0):
                per_series[series_id] = _scores(
                    targets[sel], q50[sel], q90[sel]
                )
    return MetricsReport(per_series=per_series, **totals)


def evaluate_forecast(path, targets):
    """
    rho-0.5 and rho-0.9 quantile losses and MAE of one forecast path.

    Both ``path`` and ``targets`` should be in original (denormalized) units.
    """
    targets = np.asarray(targets, dtype=np.float64).ravel()
    if len(targets) != len(path):
        raise ContractError(
            "evaluate_forecast: path has {0} steps but {1} targets".format(
                len(path), len(targets)
            )
        )
    ids = None if path.series_id is None else [path.series_id] * len(path)
    return _report(targets, path.quantile(0.5), path.quantile(0.9), ids)


def aggregate_metrics(paths, targets):
    """
    Metrics over every horizon step of several forecast paths.

    Parameters
    ----------
    paths : list of `~ssdnet.ssm.ForecastPath`
    targets : list of arrays
        Observed values aligned with each path.
    """
    if len(paths) == 0:
        raise ContractError("aggregate_metrics: no forecasts to evaluate")
    if len(paths) != len(targets):
        raise ContractError(
            "aggregate_metrics: {0} paths but {1} target arrays".format(
                len(paths), len(targets)
            )
        )
    for path, y in zip(paths, targets):
        if len(path) != len(np.ravel(y)):
            raise ContractError(
                "aggregate_metrics: path has {0} steps but {1} "
                "targets".format(len(path), len(np.ravel(y)))
            )
    y = np.concatenate([np.ravel(t) for t in targets]).astype(np.float64)
    q50 = np.concatenate([p.quantile(0.5) for p in paths])
    q90 = np.concatenate([p.quantile(0.9) for p in paths])
    ids = [p.series_id for p in paths for _ in range(len(p))]
    if all(sid is None for sid in ids):
        ids = None
    return _report(y, q50, q90, ids)


def point_metrics(predictions, targets, series_ids=None):
    """Metrics of point forecasts, used as every quantile."""
    y = np.concatenate([np.ravel(t) for t in targets]).astype(np.float64)
    y_hat = np.concatenate([np.ravel(p) for p in predictions]).astype(float)
    if len(y) == 0:
        raise ContractError("point_metrics: no forecasts to evaluate")
    if y.shape != y_hat.shape:
        raise ContractError(
            "point_metrics: {0} targets but {1} predictions".format(
                len(y), len(y_hat)
            )
        )
    ids = None
    if series_ids is not None:
        ids = [
            sid
            for sid, p in zip(series_ids, predictions)
            for _ in range(len(np.ravel(p)))
        ]
    return _report(y, y_hat, y_hat, ids)
