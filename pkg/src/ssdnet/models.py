# Licensed under a 3-clause BSD style license - see LICENSE.rst
from dataclasses import asdict, dataclass, field

import numpy as np

from .encoders import EncoderConfig, build_encoder
from .errors import ContractError
from .layers import Module
from .metrics import LossConfig
from .ssm import (
    InitStateHead,
    InnovationHead,
    VarianceHead,
    build_transition_system,
    lag_innovation_mask,
    unroll_tensor,
)
from .tensor import reshape, take
from .validator import validate_integer, validate_scalar

__all__ = ["TrainConfig", "SSDNet", "SSDNetOutput", "ModelBundle"]


@dataclass
class TrainConfig:
    """
    Everything needed to build and train a model.

    Parameters
    ----------
    encoder : `~ssdnet.encoders.EncoderConfig`
    season : int
        Seasonality period ``s`` of the state-space decoder.
    loss : `~ssdnet.metrics.LossConfig`
    learning_rate : float
        Adam step size.
    batch_size : int
    max_epochs : int
    patience : int
        Epochs without validation improvement tolerated before stopping.
    seed : int
        Seeds parameter initialization, dropout masks and batch shuffling.
    clip_norm : float
        Global gradient norm limit.
    lag_innovations : bool
        Whether innovations are also added to the seasonal lag slots of the
        state; by default only the trend and current seasonal value receive
        them.
    """

    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    season: int = 24
    loss: LossConfig = field(default_factory=LossConfig)
    learning_rate: float = 0.005
    batch_size: int = 32
    max_epochs: int = 200
    patience: int = 10
    seed: int = 0
    clip_norm: float = 5.0
    lag_innovations: bool = False

    def __post_init__(self):
        if isinstance(self.encoder, dict):
            self.encoder = EncoderConfig(**self.encoder)
        if isinstance(self.loss, dict):
            self.loss = LossConfig(**self.loss)
        self.season = validate_integer("season", self.season, 2)
        self.learning_rate = float(
            validate_scalar(
                "learning_rate", self.learning_rate, "strictly-positive"
            )
        )
        self.batch_size = validate_integer("batch_size", self.batch_size, 1)
        self.max_epochs = validate_integer("max_epochs", self.max_epochs, 1)
        self.patience = validate_integer("patience", self.patience, 0)
        self.seed = validate_integer("seed", self.seed, 0)
        self.clip_norm = float(
            validate_scalar("clip_norm", self.clip_norm, "strictly-positive")
        )
        self.lag_innovations = bool(self.lag_innovations)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, config):
        return cls(**config)


@dataclass
class SSDNetOutput:
    """Tensors of shape ``(B, T_h)`` plus the attention maps of the pass."""

    means: object
    variances: object
    trends: object
    seasonals: object
    attention: list


class SSDNet(Module):
    """
    Sequence encoder followed by a fixed state-space decoder.

    The latent of the first decoder position yields the initial state; every
    decoder latent yields one innovation vector and one variance. The decoder
    unrolls the state and emits ``trend + seasonality`` as the mean.

    By default innovations reach only the trend and the current seasonal
    slot; the lagged seasonal slots are a pure shift (see
    `~ssdnet.ssm.lag_innovation_mask`), which keeps every decoded path
    within `~ssdnet.ssm.innovation_bounds`. Set ``lag_innovations`` in the
    model configuration to let the innovation head drive all ``s`` slots.
    """

    def __init__(self, config):
        self.config = config
        rng = np.random.default_rng(config.seed)
        dropout_rng = np.random.default_rng([config.seed, 1])
        d_hid = config.encoder.d_hid
        self.encoder = build_encoder(config.encoder, rng, dropout_rng)
        self.init_head = InitStateHead(d_hid, config.season, rng)
        self.innovation_head = InnovationHead(d_hid, config.season, rng)
        self.variance_head = VarianceHead(d_hid, rng)
        self.system = build_transition_system(config.season)
        self.innovation_mask = lag_innovation_mask(
            config.season, config.lag_innovations
        )

    @property
    def kind(self):
        return self.config.encoder.kind

    def forward(self, lagged, covariates, series_index):
        """
        Parameters
        ----------
        lagged : array, shape ``(B, T_l + T_h)``
            Lagged target channel.
        covariates : array, shape ``(B, T_l + T_h, C)``
        series_index : int array, shape ``(B,)``

        Returns
        -------
        output : `SSDNetOutput`
        """
        lagged = np.asarray(lagged, dtype=np.float64)
        if lagged.shape[-1] != self.config.encoder.length:
            raise ContractError(
                "expected {0} positions, got {1}".format(
                    self.config.encoder.length, lagged.shape[-1]
                )
            )
        latents, maps = self.encoder(lagged, covariates, series_index)
        batch, horizon, _ = latents.shape

        alpha0 = self.init_head(take(latents, np.s_[:, 0, :]))
        innovations = self.innovation_head(latents)
        if not self.config.lag_innovations:
            innovations = innovations * self.innovation_mask
        variances = reshape(self.variance_head(latents), (batch, horizon))
        trends, seasonals = unroll_tensor(alpha0, innovations, self.system)
        return SSDNetOutput(
            trends + seasonals, variances, trends, seasonals, maps
        )

    def __call__(self, batch):
        return self.forward(batch.lagged, batch.covariates, batch.series_index)


@dataclass
class ModelBundle:
    """
    Trained model with what is needed to use it on new data.

    Parameters
    ----------
    model : `SSDNet`
    stats : dict
        Series id to `~ssdnet.utils.NormalizationStats` of the training
        segment.
    covariate_names : list of str
        Covariate schema of the training data.
    series_ids : list of str
        Series ids in ID-embedding order.
    profile : str
        Dataset profile the model was trained for.
    """

    model: SSDNet
    stats: dict = field(default_factory=dict)
    covariate_names: list = field(default_factory=list)
    series_ids: list = field(default_factory=list)
    profile: str = "custom"

    @property
    def config(self):
        return self.model.config

    @property
    def system(self):
        return self.model.system
