# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Command-line interface: ``ssdnet <command> --config run.yaml``.

Every command reads the same YAML run configuration (see
`~ssdnet.config.RunConfig`) and writes its outputs to ``output_dir``.
"""
import argparse
import os
from dataclasses import dataclass

from astropy import log

from . import __version__
from .analysis import (
    load_bundle,
    save_bundle,
    save_forecast_json,
    save_forecast_table,
    save_manifest,
    save_metrics,
    save_training_log,
)
from .config import load_config
from .core import (
    decode_forecasts,
    evaluate,
    evaluate_baseline,
    model_grad_check,
    train,
    window_attention,
)
from .encoders import ENCODER_KINDS, export_attention
from .errors import (
    CheckpointError,
    ContractError,
    SSDNetError,
    TrainingDivergedError,
)
from .models import ModelBundle, SSDNet
from .tensor import forward_primitives, primitive_check
from .utils import (
    add_calendar_covariates,
    chrono_split,
    load_csv,
    make_windows,
    normalize,
    synth_generate,
    write_csv,
)

__all__ = [
    "main",
    "prepare_data",
    "cmd_synth",
    "cmd_train",
    "cmd_forecast",
    "cmd_evaluate",
    "cmd_attention",
    "cmd_gradcheck",
]

SEGMENTS = ("train", "val", "test")

CHECKPOINT = "checkpoint.h5"
TRAINING_LOG = "training_log.csv"
MANIFEST = "run.yaml"
COMMAND_MANIFEST = "{0}.yaml"


@dataclass
class RunData:
    """Normalized windows of the three segments of a dataset."""

    windows: dict
    stats: dict
    covariate_names: list
    series_ids: list


def _dataset(run):
    if run.dataset is None:
        raise SSDNetError("the configuration has no dataset path")
    return run.dataset


def _output(run, name):
    os.makedirs(run.output_dir, exist_ok=True)
    return os.path.join(run.output_dir, name)


def prepare_data(run, stats=None, series_ids=None):
    """
    Load the dataset of ``run`` and cut it into normalized windows.

    Calendar covariates of the profile are appended, every series is split
    chronologically and normalized with the statistics of its training
    segment (or with ``stats``, e.g. those stored in a checkpoint).
    """
    profile = run.profile
    table = load_csv(_dataset(run), profile.granularity)
    if profile.calendar:
        table = add_calendar_covariates(table, profile.calendar)
    val_span, test_span = run.split.spans(min(len(s) for s in table.series))
    segments = chrono_split(table, val_span, test_span, run.context)
    train_table, stats = normalize(segments[0], stats)
    series_ids = table.ids if series_ids is None else list(series_ids)

    windows = {}
    for name, segment in zip(SEGMENTS, segments):
        if name != "train":
            segment, _ = normalize(segment, stats)
        else:
            segment = train_table
        stride = run.stride.train if name == "train" else run.eval_stride
        windows[name] = make_windows(
            segment,
            profile.input_length,
            profile.horizon,
            stride,
            series_ids,
        )
    log.info(
        "Windows: {0} train, {1} val, {2} test".format(
            *(len(windows[name]) for name in SEGMENTS)
        )
    )
    return RunData(windows, stats, table.covariate_names, series_ids)


def _checkpoint(run, filename=None):
    return filename or os.path.join(run.output_dir, CHECKPOINT)


def _load_checked_bundle(run, filename):
    filename = _checkpoint(run, filename)
    bundle = load_bundle(filename)
    data = prepare_data(run, bundle.stats, bundle.series_ids)
    if list(data.covariate_names) != list(bundle.covariate_names):
        raise CheckpointError(
            "covariate_names: checkpoint has {0}, dataset has {1}".format(
                bundle.covariate_names, data.covariate_names
            )
        )
    return bundle, data


def _select_window(data, segment, index):
    windows = data.windows[segment]
    if not -len(windows) <= index < len(windows):
        raise ContractError(
            "window {0} out of range: the {1} segment has {2} windows".format(
                index, segment, len(windows)
            )
        )
    return windows[index]


def _headline(report, persistence=None, last_value=None):
    metrics = {}
    if report is not None:
        metrics.update(report.to_dict())
    if persistence is not None:
        metrics["baseline_rho50"] = persistence.rho50
        metrics["baseline_rho90"] = persistence.rho90
        metrics["baseline_mae"] = persistence.mae
    if last_value is not None:
        metrics["last_value_rho50"] = last_value.rho50
    return {key: float(value) for key, value in metrics.items()}


def _write_manifest(run, command, outputs, config=None, **extra):
    """Record the command, seed, resolved configuration and outputs."""
    manifest = {
        "command": command,
        "version": __version__,
        "seed": run.seed,
        "config": run.to_dict() if config is None else config,
        "outputs": outputs,
    }
    manifest.update(extra)
    if command == "train":
        name = MANIFEST
    else:
        name = COMMAND_MANIFEST.format(command)
    save_manifest(manifest, _output(run, name))
    return manifest


def _baselines(run, windows, stats):
    profile = run.profile
    span = profile.persistence_span or 20
    persistence = evaluate_baseline(
        windows, stats, profile.steps_per_day, span, "persistence"
    )
    last_value = evaluate_baseline(windows, stats, kind="last-value")
    return persistence, last_value


# Commands


def cmd_synth(run, output=None):
    """Generate the synthetic dataset of ``run.synth`` as CSV."""
    filename = output or run.dataset or _output(run, "synthetic.csv")
    table = synth_generate(run.synth)
    write_csv(table, filename)
    _write_manifest(run, "synth", {"dataset": filename})
    return filename


def cmd_train(run, encoder=None):
    """
    Train on the dataset of ``run`` and write the checkpoint, training log and
    run manifest to ``run.output_dir``. The best weights are evaluated on the
    test windows and the metrics stored in the manifest.
    """
    data = prepare_data(run)
    config = run.train_config(
        len(data.series_ids), len(data.covariate_names), encoder
    )
    run.check_grid()
    log_file = _output(run, TRAINING_LOG)
    try:
        bundle, training_log = train(
            config,
            data.windows["train"],
            data.windows["val"],
            data.stats,
            data.covariate_names,
            data.series_ids,
            run.profile.name,
        )
    except TrainingDivergedError as exc:
        outputs = {}
        if exc.bundle is not None:
            outputs["checkpoint"] = save_bundle(
                _output(run, CHECKPOINT), exc.bundle, clobber=True
            )
        if exc.log is not None:
            outputs["training_log"] = save_training_log(exc.log, log_file)
        _write_manifest(run, "train", outputs, diverged=str(exc))
        log.warning(
            "Training diverged; best weights so far are in {0}".format(
                outputs.get("checkpoint", "no checkpoint")
            )
        )
        raise
    checkpoint = save_bundle(_output(run, CHECKPOINT), bundle, clobber=True)
    save_training_log(training_log, log_file)

    test = data.windows["test"]
    metrics = _headline(
        evaluate(bundle, test), *_baselines(run, test, data.stats)
    )
    resolved = run.to_dict()
    resolved["encoder"]["kind"] = config.encoder.kind
    manifest = _write_manifest(
        run,
        "train",
        {"checkpoint": checkpoint, "training_log": log_file},
        config=resolved,
        model=config.to_dict(),
        epochs=len(training_log),
        test_metrics=metrics,
    )
    log.info(
        "Test rho50 {0:.4f} (persistence {1:.4f})".format(
            metrics["rho50"], metrics["baseline_rho50"]
        )
    )
    return manifest


def cmd_forecast(run, checkpoint=None, segment="test", window=0):
    """
    Forecast one window and write ``forecast.json`` and the decomposition
    table ``forecast.csv``.
    """
    bundle, data = _load_checked_bundle(run, checkpoint)
    sample = _select_window(data, segment, window)
    paths = decode_forecasts(bundle, [sample])
    outputs = {
        "json": _output(run, "forecast.json"),
        "table": _output(run, "forecast.csv"),
    }
    save_forecast_json(paths, outputs["json"])
    table = save_forecast_table(paths, outputs["table"])
    _write_manifest(
        run,
        "forecast",
        outputs,
        checkpoint=_checkpoint(run, checkpoint),
        segment=segment,
        window=window,
    )
    return table


def cmd_evaluate(run, checkpoint=None, baseline_only=False):
    """
    Score the model and the naive baselines on the test windows and write
    ``metrics.json``.
    """
    if baseline_only:
        data = prepare_data(run)
        report = None
    else:
        bundle, data = _load_checked_bundle(run, checkpoint)
        report = evaluate(bundle, data.windows["test"])
    test = data.windows["test"]
    metrics = _headline(report, *_baselines(run, test, data.stats))
    filename = save_metrics(metrics, _output(run, "metrics.json"))
    _write_manifest(
        run,
        "evaluate",
        {"metrics": filename},
        checkpoint=None if baseline_only else _checkpoint(run, checkpoint),
    )
    for key in ["rho50", "rho90", "mae", "baseline_rho50", "last_value_rho50"]:
        if key in metrics:
            log.info("{0:>17}: {1:.6f}".format(key, metrics[key]))
    return metrics


def cmd_attention(run, checkpoint=None, segment="test", window=0):
    """Export the attention maps of one window as per-layer/head CSVs."""
    bundle, data = _load_checked_bundle(run, checkpoint)
    sample = _select_window(data, segment, window)
    maps = window_attention(bundle, sample)
    filenames = export_attention(maps, _output(run, "attention"))
    _write_manifest(
        run,
        "attention",
        {"attention": list(filenames)},
        checkpoint=_checkpoint(run, checkpoint),
        segment=segment,
        window=window,
    )
    return filenames


def cmd_gradcheck(run, op=None, tolerance=None):
    """
    Finite-difference gradient check of one primitive (``op``) or of the
    composite loss of a freshly initialized model on one training window.

    Returns
    -------
    max_error : float
    passed : bool
    """
    if op is not None:
        tolerance = 1e-6 if tolerance is None else tolerance
        error = primitive_check(op, seed=run.seed)
        label = "primitive {0}".format(op)
    else:
        tolerance = 1e-4 if tolerance is None else tolerance
        data = prepare_data(run)
        config = run.train_config(
            len(data.series_ids), len(data.covariate_names)
        )
        bundle = ModelBundle(SSDNet(config), data.stats)
        error = model_grad_check(bundle, data.windows["train"][:1])
        label = "{0} model".format(config.encoder.kind)
    passed = error < tolerance
    _write_manifest(
        run,
        "gradcheck",
        {},
        target=label,
        max_error=float(error),
        tolerance=float(tolerance),
        passed=bool(passed),
    )
    print(
        "{0}: max relative error {1:.3e} {2}".format(
            label, error, "PASS" if passed else "FAIL"
        )
    )
    return error, passed


# Entry point


def _parser():
    parser = argparse.ArgumentParser(
        prog="ssdnet",
        description="State-space decoder forecasting: train, forecast and "
        "evaluate SSDNet models.",
    )
    parser.add_argument(
        "--version", action="version", version="%(prog)s " + __version__
    )
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    def command(name, help):
        sub = commands.add_parser(name, help=help)
        sub.add_argument(
            "--config", required=True, help="YAML run configuration"
        )
        return sub

    def window_selector(sub):
        sub.add_argument("--checkpoint", help="checkpoint (default: run dir)")
        sub.add_argument("--segment", choices=SEGMENTS, default="test")
        sub.add_argument("--window", type=int, default=0)

    sub = command("synth", "generate a synthetic dataset")
    sub.add_argument("--output", help="CSV file (default: config dataset)")

    sub = command("train", "train a model")
    sub.add_argument("--encoder", choices=ENCODER_KINDS)

    sub = command("forecast", "forecast one window with its decomposition")
    window_selector(sub)

    sub = command("evaluate", "score the model and baselines on the test set")
    sub.add_argument("--checkpoint", help="checkpoint (default: run dir)")
    sub.add_argument(
        "--baseline-only",
        action="store_true",
        help="only score the naive baselines",
    )

    sub = command("attention", "export attention maps of one window")
    window_selector(sub)

    sub = command("gradcheck", "finite-difference gradient check")
    sub.add_argument("--op", choices=sorted(forward_primitives()))
    sub.add_argument("--tolerance", type=float)

    return parser


def main(argv=None):
    """
    Run the ``ssdnet`` command line.

    Returns
    -------
    status : int
        0 on success, 1 if the command failed or a gradient check did not
        pass.
    """
    args = _parser().parse_args(argv)
    try:
        run = load_config(args.config)
        if args.command == "synth":
            cmd_synth(run, args.output)
        elif args.command == "train":
            cmd_train(run, args.encoder)
        elif args.command == "forecast":
            cmd_forecast(run, args.checkpoint, args.segment, args.window)
        elif args.command == "evaluate":
            cmd_evaluate(run, args.checkpoint, args.baseline_only)
        elif args.command == "attention":
            cmd_attention(run, args.checkpoint, args.segment, args.window)
        elif args.command == "gradcheck":
            _, passed = cmd_gradcheck(run, args.op, args.tolerance)
            return 0 if passed else 1
    except (SSDNetError, OSError) as exc:
        log.error("{0}: {1}".format(type(exc).__name__, exc))
        return 1
    return 0

