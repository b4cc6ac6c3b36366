# Licensed under a 3-clause BSD style license - see LICENSE.rst
import copy
from dataclasses import asdict, dataclass, field, fields

import yaml
from astropy import log

from .encoders import EncoderConfig
from .errors import ConfigurationError
from .metrics import LossConfig
from .models import TrainConfig
from .utils import PROFILES, DatasetProfile, SynthConfig
from .validator import validate_integer

__all__ = ["RunConfig", "SplitConfig", "StrideConfig", "load_config"]

# Hyperparameter values explored when tuning the built-in profiles
TUNED_GRID = {
    "d_hid": (8, 12, 16, 24, 32),
    "n_layers": (2, 3, 4),
    "d_kv": (4, 6, 8, 12),
    "n_heads": (2, 3, 4),
    "dropout": (0.0, 0.1, 0.2),
}

CUSTOM_PROFILE = {
    "name": "custom",
    "granularity": "1h",
    "steps_per_day": 24,
    "input_length": 24,
    "horizon": 24,
    "season": 24,
}

ENCODER_KEYS = (
    "kind",
    "d_hid",
    "n_layers",
    "d_kv",
    "n_heads",
    "dropout",
    "use_id_embedding",
)

TRAIN_KEYS = (
    "learning_rate",
    "batch_size",
    "max_epochs",
    "patience",
    "clip_norm",
    "lag_innovations",
)


@dataclass
class SplitConfig:
    """
    Spans of the validation and test segments. ``None`` spans take 20% of the
    shortest series; ``context`` defaults to ``input_length + 1`` steps of
    history in front of each evaluation segment.
    """

    val: int = None
    test: int = None
    context: int = None

    def __post_init__(self):
        for name in ["val", "test", "context"]:
            if getattr(self, name) is not None:
                setattr(
                    self,
                    name,
                    validate_integer("split." + name, getattr(self, name), 0),
                )

    def spans(self, length):
        default = length // 5
        return (
            default if self.val is None else self.val,
            default if self.test is None else self.test,
        )


@dataclass
class StrideConfig:
    """Window strides; ``eval=None`` means non-overlapping horizons."""

    train: int = 1
    eval: int = None

    def __post_init__(self):
        self.train = validate_integer("stride.train", self.train, 1)
        if self.eval is not None:
            self.eval = validate_integer("stride.eval", self.eval, 1)


def _check_keys(section, mapping, allowed):
    if mapping is None:
        return {}
    if not isinstance(mapping, dict):
        raise ConfigurationError(
            "{0} should be a mapping, got {1!r}".format(section, mapping)
        )
    for key in mapping:
        if key not in allowed:
            dotted = key if section == "config" else section + "." + str(key)
            raise ConfigurationError(
                "unknown configuration key {0}".format(dotted)
            )
    return dict(mapping)


def _dataclass_keys(cls):
    return [f.name for f in fields(cls)]


def _build(section, cls, mapping, allowed=None):
    mapping = _check_keys(
        section, mapping, allowed or _dataclass_keys(cls)
    )
    try:
        return cls(**mapping)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError("{0}: {1}".format(section, exc)) from exc


def _profile(value):
    if value is None or value == "custom":
        return DatasetProfile(**CUSTOM_PROFILE)
    if isinstance(value, str):
        if value not in PROFILES:
            raise ConfigurationError(
                "profile should be one of custom, {0} (got {1!r})".format(
                    ", ".join(PROFILES), value
                )
            )
        return copy.deepcopy(PROFILES[value])
    mapping = _check_keys(
        "profile", value, _dataclass_keys(DatasetProfile)
    )
    base = mapping.pop("name", "custom")
    if base == "custom":
        merged = dict(CUSTOM_PROFILE, **mapping)
    elif base in PROFILES:
        merged = dict(asdict(PROFILES[base]), **mapping)
    else:
        raise ConfigurationError(
            "profile.name should be custom or a built-in profile "
            "(got {0!r})".format(base)
        )
    try:
        return DatasetProfile(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError("profile: {0}".format(exc)) from exc


@dataclass
class RunConfig:
    """
    Configuration of a command-line run.

    The dataset profile supplies the window geometry, calendar features and
    default hyperparameters; the ``encoder``, ``loss`` and ``train`` sections
    override them. Use `load_config` to read one from a YAML file.
    """

    dataset: str = None
    output_dir: str = "ssdnet_run"
    seed: int = 0
    profile: DatasetProfile = field(
        default_factory=lambda: DatasetProfile(**CUSTOM_PROFILE)
    )
    split: SplitConfig = field(default_factory=SplitConfig)
    stride: StrideConfig = field(default_factory=StrideConfig)
    encoder: dict = field(default_factory=dict)
    loss: LossConfig = field(default_factory=LossConfig)
    train: dict = field(default_factory=dict)
    synth: SynthConfig = field(default_factory=SynthConfig)

    @classmethod
    def from_dict(cls, config):
        """
        Build a `RunConfig` from a nested mapping, rejecting unknown keys.
        """
        config = _check_keys("config", config or {}, _dataclass_keys(cls))
        try:
            seed = validate_integer("seed", config.get("seed", 0), 0)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from exc
        synth = dict(config.get("synth") or {})
        synth.setdefault("seed", seed)
        run = cls(
            dataset=config.get("dataset"),
            output_dir=str(config.get("output_dir", "ssdnet_run")),
            seed=seed,
            profile=_profile(config.get("profile")),
            split=_build("split", SplitConfig, config.get("split")),
            stride=_build("stride", StrideConfig, config.get("stride")),
            encoder=_check_keys(
                "encoder", config.get("encoder"), ENCODER_KEYS
            ),
            loss=_build("loss", LossConfig, config.get("loss")),
            train=_check_keys("train", config.get("train"), TRAIN_KEYS),
            synth=_build("synth", SynthConfig, synth),
        )
        # validate the model sections before any data is touched
        run.train_config()
        return run

    @property
    def context(self):
        if self.split.context is None:
            return self.profile.input_length + 1
        return self.split.context

    @property
    def eval_stride(self):
        if self.stride.eval is None:
            return self.profile.horizon
        return self.stride.eval

    def encoder_config(self, n_series=1, n_covariates=0, kind=None):
        p = self.profile
        values = {
            "kind": "transformer",
            "d_hid": p.d_hid,
            "n_layers": p.n_layers,
            "d_kv": p.d_kv,
            "n_heads": p.n_heads,
            "dropout": p.dropout,
            "use_id_embedding": p.use_id_embedding,
        }
        values.update(self.encoder)
        if kind is not None:
            values["kind"] = kind
        try:
            return EncoderConfig(
                input_length=p.input_length,
                horizon=p.horizon,
                n_series=n_series,
                n_covariates=n_covariates,
                **values
            )
        except (TypeError, ValueError) as exc:
            raise ConfigurationError("encoder: {0}".format(exc)) from exc

    def train_config(self, n_series=1, n_covariates=0, kind=None):
        """
        Resolve the `~ssdnet.models.TrainConfig` of this run for a dataset
        with ``n_series`` series and ``n_covariates`` covariates.
        """
        encoder = self.encoder_config(n_series, n_covariates, kind)
        values = {"learning_rate": self.profile.learning_rate}
        values.update(self.train)
        try:
            return TrainConfig(
                encoder=encoder,
                season=self.profile.season,
                loss=self.loss,
                seed=self.seed,
                **values
            )
        except (TypeError, ValueError) as exc:
            raise ConfigurationError("train: {0}".format(exc)) from exc

    def check_grid(self):
        """
        Warn about hyperparameters outside the tuned grid.

        Returns
        -------
        off_grid : list of str
        """
        encoder = self.encoder_config()
        off_grid = []
        for name, grid in TUNED_GRID.items():
            value = getattr(encoder, name)
            if value not in grid:
                log.warning(
                    "encoder.{0} = {1} is outside the tuned grid "
                    "({2})".format(name, value, ", ".join(map(str, grid)))
                )
                off_grid.append(name)
        return off_grid

    def to_dict(self):
        """Fully resolved configuration, loadable with `from_dict`."""
        encoder = self.encoder_config()
        return {
            "dataset": self.dataset,
            "output_dir": self.output_dir,
            "seed": self.seed,
            "profile": dict(
                asdict(self.profile), calendar=list(self.profile.calendar)
            ),
            "split": asdict(self.split),
            "stride": asdict(self.stride),
            "encoder": {key: getattr(encoder, key) for key in ENCODER_KEYS},
            "loss": asdict(self.loss),
            "train": {
                key: getattr(self.train_config(), key) for key in TRAIN_KEYS
            },
            "synth": asdict(self.synth),
        }


def load_config(filename):
    """
    Read a `RunConfig` from a YAML file.

    Raises
    ------
    ConfigurationError
        For unknown keys (the message names the dotted key) and invalid
        values.
    OSError
        If the file cannot be read.
    """
    try:
        with open(filename) as fh:
            config = yaml.safe_load(fh)
    except OSError as exc:
        raise OSError(
            "cannot read configuration {0}: {1}".format(filename, exc)
        ) from exc
    except yaml.YAMLError as exc:
        raise ConfigurationError(
            "{0} is not valid YAML: {1}".format(filename, exc)
        ) from exc
    run = RunConfig.from_dict(config)
    log.debug("Loaded configuration from {0}".format(filename))
    return run
