# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Sequence encoders mapping the conditioning window and covariates to one latent
vector per decoder position.

Both encoders consume a single joint sequence of ``input_length + horizon``
positions; position ``t`` carries the lagged target ``y_{t-1}`` and the
covariates ``x_t``. The latents returned are those of the last ``horizon``
positions.
"""
import os
from dataclasses import dataclass

import numpy as np
from astropy import log

from .errors import ConfigurationError, ContractError, NumericError
from .layers import Dropout, Embedding, LayerNorm, Linear, Module
from .tensor import (
    Tensor,
    concat,
    matmul,
    relu,
    reshape,
    sigmoid,
    softmax,
    take,
    tanh,
    transpose_last_two,
)
from .validator import validate_choice, validate_integer, validate_scalar

__all__ = [
    "EncoderConfig",
    "AttentionMap",
    "InputEmbedding",
    "AttentionHead",
    "MultiHeadAttention",
    "TransformerLayer",
    "TransformerEncoder",
    "LSTMLayer",
    "LSTMEncoder",
    "build_encoder",
    "embed_inputs",
    "transformer_forward",
    "lstm_forward",
    "export_attention",
    "read_attention",
]

ENCODER_KINDS = ("transformer", "lstm")


@dataclass
class EncoderConfig:
    """
    Encoder geometry.

    ``d_kv`` and ``n_heads`` are only used by the transformer; the attention
    projection width is ``n_heads * d_kv``.
    """

    kind: str = "transformer"
    d_hid: int = 16
    n_layers: int = 2
    d_kv: int = 6
    n_heads: int = 2
    dropout: float = 0.0
    input_length: int = 24
    horizon: int = 24
    use_id_embedding: bool = False
    n_series: int = 1
    n_covariates: int = 0

    def __post_init__(self):
        validate_choice("kind", self.kind, ENCODER_KINDS)
        for name in ["d_hid", "n_layers", "d_kv", "n_heads", "input_length"]:
            setattr(self, name, validate_integer(name, getattr(self, name), 1))
        self.horizon = validate_integer("horizon", self.horizon, 1)
        self.n_series = validate_integer("n_series", self.n_series, 1)
        self.n_covariates = validate_integer(
            "n_covariates", self.n_covariates, 0
        )
        self.dropout = float(validate_scalar("dropout", self.dropout, "rate"))

    @property
    def length(self):
        return self.input_length + self.horizon


@dataclass
class AttentionMap:
    """Softmax weights of one head, shape ``(B, T, T)`` (query, key)."""

    layer: int
    head: int
    weights: np.ndarray

    def __getitem__(self, sample):
        return self.weights[sample]


class InputEmbedding(Module):
    """
    ``Linear([y_{t-1}, x_t]) + position[t] (+ series[id])``.
    """

    def __init__(self, config, rng):
        self.n_covariates = config.n_covariates
        self.projection = Linear(1 + config.n_covariates, config.d_hid, rng)
        self.position = Embedding(config.length, config.d_hid, rng)
        self.series = (
            Embedding(config.n_series, config.d_hid, rng)
            if config.use_id_embedding
            else None
        )

    def __call__(self, lagged, covariates, series_index):
        lagged = np.asarray(lagged, dtype=np.float64)
        covariates = np.asarray(covariates, dtype=np.float64)
        batch, length = lagged.shape
        if covariates.shape != (batch, length, self.n_covariates):
            raise ContractError(
                "covariates have shape {0}, expected {1} ({2} covariate "
                "columns)".format(
                    covariates.shape,
                    (batch, length, self.n_covariates),
                    self.n_covariates,
                )
            )
        if length > self.position.weight.shape[0]:
            raise ContractError(
                "sequence of {0} positions exceeds the {1} learned "
                "positions".format(length, self.position.weight.shape[0])
            )
        features = np.concatenate([lagged[..., None], covariates], axis=-1)
        out = self.projection(Tensor(features)) + self.position(
            np.arange(length)
        )
        if self.series is not None:
            index = np.repeat(
                np.asarray(series_index, dtype=int)[:, None], length, axis=1
            )
            out = out + self.series(index)
        return out


class AttentionHead(Module):
    def __init__(self, d_hid, d_kv, rng):
        self.query = Linear(d_hid, d_kv, rng)
        self.key = Linear(d_hid, d_kv, rng)
        self.value = Linear(d_hid, d_kv, rng)
        self.scale = 1.0 / np.sqrt(d_kv)

    def __call__(self, x, mask):
        scores = matmul(self.query(x), transpose_last_two(self.key(x)))
        weights = softmax(scores * self.scale, mask)
        return matmul(weights, self.value(x)), weights


class MultiHeadAttention(Module):
    def __init__(self, d_hid, d_kv, n_heads, rng):
        self.heads = [AttentionHead(d_hid, d_kv, rng) for _ in range(n_heads)]
        self.output = Linear(n_heads * d_kv, d_hid, rng)

    def __call__(self, x, mask):
        outputs, weights = [], []
        for head in self.heads:
            out, w = head(x, mask)
            outputs.append(out)
            weights.append(w)
        return self.output(concat(outputs, axis=-1)), weights


class TransformerLayer(Module):
    """Pre-norm residual block: causal self-attention then feed-forward."""

    def __init__(self, config, rng, dropout_rng):
        d = config.d_hid
        self.attention_norm = LayerNorm(d)
        self.attention = MultiHeadAttention(
            d, config.d_kv, config.n_heads, rng
        )
        self.ffn_norm = LayerNorm(d)
        self.ffn_in = Linear(d, 4 * d, rng)
        self.ffn_out = Linear(4 * d, d, rng)
        self.dropout = Dropout(config.dropout, dropout_rng)

    def __call__(self, x, mask):
        attended, weights = self.attention(self.attention_norm(x), mask)
        x = x + self.dropout(attended)
        hidden = relu(self.ffn_in(self.ffn_norm(x)))
        x = x + self.dropout(self.ffn_out(hidden))
        return x, weights


class TransformerEncoder(Module):
    """
    Stack of causal pre-norm transformer layers over the joint
    history-plus-horizon sequence, followed by a final layer norm.

    In eval mode the attention weights of every layer and head are kept as
    `AttentionMap` instances.
    """

    kind = "transformer"

    def __init__(self, config, rng, dropout_rng=None):
        if dropout_rng is None:
            dropout_rng = rng
        self.config = config
        self.embedding = InputEmbedding(config, rng)
        self.input_dropout = Dropout(config.dropout, dropout_rng)
        self.layers = [
            TransformerLayer(config, rng, dropout_rng)
            for _ in range(config.n_layers)
        ]
        self.final_norm = LayerNorm(config.d_hid)

    def forward(self, embedded):
        length = embedded.shape[-2]
        mask = np.tril(np.ones((length, length), dtype=bool))
        x = self.input_dropout(embedded)
        maps = []
        for idx, layer in enumerate(self.layers):
            try:
                x, weights = layer(x, mask)
            except NumericError as exc:
                raise NumericError(
                    "transformer layer {0}: {1}".format(idx, exc)
                ) from exc
            if not self.training:
                maps.extend(
                    AttentionMap(idx, head, w.data.copy())
                    for head, w in enumerate(weights)
                )
        x = self.final_norm(x)
        latents = take(x, np.s_[:, length - self.config.horizon :, :])
        return latents, maps

    def __call__(self, lagged, covariates, series_index):
        return self.forward(self.embedding(lagged, covariates, series_index))


class LSTMLayer(Module):
    """
    Single recurrent layer. The fused weight maps ``[x_t, h_{t-1}]`` to the
    input, forget, output and candidate gates, in that order.
    """

    def __init__(self, d_in, d_hid, rng):
        self.d_hid = d_hid
        self.gates = Linear(d_in + d_hid, 4 * d_hid, rng)

    def __call__(self, x):
        batch, length, _ = x.shape
        d = self.d_hid
        h = Tensor(np.zeros((batch, d)))
        c = Tensor(np.zeros((batch, d)))
        outputs = []
        for t in range(length):
            x_t = take(x, np.s_[:, t, :])
            z = self.gates(concat([x_t, h], axis=-1))
            i = sigmoid(take(z, np.s_[:, 0:d]))
            f = sigmoid(take(z, np.s_[:, d : 2 * d]))
            o = sigmoid(take(z, np.s_[:, 2 * d : 3 * d]))
            g = tanh(take(z, np.s_[:, 3 * d :]))
            c = f * c + i * g
            h = o * tanh(c)
            outputs.append(reshape(h, (batch, 1, d)))
        return concat(outputs, axis=1)


class LSTMEncoder(Module):
    """Stacked LSTM over the joint sequence; produces no attention maps."""

    kind = "lstm"

    def __init__(self, config, rng, dropout_rng=None):
        if dropout_rng is None:
            dropout_rng = rng
        self.config = config
        self.embedding = InputEmbedding(config, rng)
        self.layers = [
            LSTMLayer(config.d_hid, config.d_hid, rng)
            for _ in range(config.n_layers)
        ]
        self.dropout = Dropout(config.dropout, dropout_rng)

    def forward(self, embedded):
        x = embedded
        for idx, layer in enumerate(self.layers):
            try:
                x = layer(self.dropout(x))
            except NumericError as exc:
                raise NumericError(
                    "lstm layer {0}: {1}".format(idx, exc)
                ) from exc
        latents = take(x, np.s_[:, x.shape[1] - self.config.horizon :, :])
        return latents, []

    def __call__(self, lagged, covariates, series_index):
        return self.forward(self.embedding(lagged, covariates, series_index))


def build_encoder(config, rng, dropout_rng=None):
    """Instantiate the encoder selected by ``config.kind``."""
    if config.kind == "transformer":
        return TransformerEncoder(config, rng, dropout_rng)
    if config.kind == "lstm":
        return LSTMEncoder(config, rng, dropout_rng)
    raise ConfigurationError(
        "kind should be one of {0}".format(", ".join(ENCODER_KINDS))
    )


def embed_inputs(windows, encoder):
    """
    Embed a list of windows (or a `~ssdnet.utils.WindowBatch`).

    Returns
    -------
    embedded : `~ssdnet.tensor.Tensor` of shape ``(B, T_l + T_h, d_hid)``
    """
    from .utils import stack_windows

    batch = stack_windows(windows)
    return encoder.embedding(
        batch.lagged, batch.covariates, batch.series_index
    )


def transformer_forward(embedded, encoder):
    """Latents ``(B, T_h, d_hid)`` and attention maps of a transformer."""
    if not isinstance(encoder, TransformerEncoder):
        raise ContractError("transformer_forward needs a transformer encoder")
    return encoder.forward(embedded)


def lstm_forward(embedded, encoder):
    """Latents ``(B, T_h, d_hid)`` of an LSTM encoder."""
    if not isinstance(encoder, LSTMEncoder):
        raise ContractError("lstm_forward needs an lstm encoder")
    return encoder.forward(embedded)[0]


def export_attention(maps, directory, sample=0):
    """
    Write one CSV per (layer, head) attention map.

    Files are named ``attention_layer<l>_head<h>.csv``; row ``i`` holds the
    weights of query position ``i`` over all key positions.

    Returns
    -------
    filenames : list of str
    """
    filenames = []
    try:
        os.makedirs(directory, exist_ok=True)
        for amap in maps:
            filename = os.path.join(
                directory,
                "attention_layer{0}_head{1}.csv".format(amap.layer, amap.head),
            )
            np.savetxt(filename, amap[sample], fmt="%.17g", delimiter=",")
            filenames.append(filename)
    except OSError as exc:
        raise OSError(
            "cannot write attention maps to {0}: {1}".format(directory, exc)
        ) from exc
    log.info(
        "Wrote {0} attention maps to {1}".format(len(filenames), directory)
    )
    return filenames


def read_attention(filename):
    try:
        return np.loadtxt(filename, delimiter=",", ndmin=2)
    except OSError as exc:
        raise OSError(
            "cannot read attention map {0}: {1}".format(filename, exc)
        ) from exc
