# Licensed under a 3-clause BSD style license - see LICENSE.rst
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import expit

from ..encoders import (
    AttentionHead,
    EncoderConfig,
    LSTMEncoder,
    LSTMLayer,
    TransformerEncoder,
    build_encoder,
    embed_inputs,
    export_attention,
    lstm_forward,
    read_attention,
    transformer_forward,
)
from ..errors import ConfigurationError, ContractError
from ..tensor import Tensor
from .fixtures import windows  # noqa: F401


def make_config(**kwargs):
    defaults = dict(
        d_hid=8, n_layers=2, d_kv=4, n_heads=3, input_length=5, horizon=4
    )
    defaults.update(kwargs)
    return EncoderConfig(**defaults)


def make_inputs(config, batch=2, seed=0):
    rng = np.random.default_rng(seed)
    lagged = rng.normal(size=(batch, config.length))
    covariates = rng.normal(size=(batch, config.length, config.n_covariates))
    return lagged, covariates, np.zeros(batch, dtype=int)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        EncoderConfig(kind="gru")
    with pytest.raises(ConfigurationError):
        EncoderConfig(dropout=1.0)
    with pytest.raises(ConfigurationError):
        EncoderConfig(d_hid=0)
    assert EncoderConfig(input_length=7, horizon=3).length == 10


def test_transformer_shapes_and_maps():
    config = make_config(n_covariates=2)
    encoder = build_encoder(config, np.random.default_rng(0))
    assert isinstance(encoder, TransformerEncoder)
    encoder.eval()
    latents, maps = encoder(*make_inputs(config))
    assert latents.shape == (2, config.horizon, config.d_hid)
    assert len(maps) == config.n_layers * config.n_heads
    assert [(m.layer, m.head) for m in maps[:3]] == [(0, 0), (0, 1), (0, 2)]
    for amap in maps:
        assert amap.weights.shape == (2, config.length, config.length)
        assert_allclose(amap.weights.sum(axis=-1), 1.0, atol=1e-12)
        upper = np.triu(np.ones((config.length,) * 2, dtype=bool), 1)
        assert np.all(amap.weights[:, upper] == 0.0)


def test_no_maps_while_training():
    config = make_config()
    encoder = build_encoder(config, np.random.default_rng(0))
    _, maps = encoder(*make_inputs(config))
    assert maps == []


@pytest.mark.parametrize("kind", ["transformer", "lstm"])
def test_causality(kind):
    config = make_config(kind=kind)
    encoder = build_encoder(config, np.random.default_rng(1))
    encoder.eval()
    lagged, covariates, index = make_inputs(config)
    before, _ = encoder(lagged, covariates, index)
    lagged = lagged.copy()
    lagged[:, -1] += 10.0
    after, _ = encoder(lagged, covariates, index)
    assert_array_equal(before.data[:, :-1], after.data[:, :-1])
    assert not np.array_equal(before.data[:, -1], after.data[:, -1])


def test_lstm_encoder():
    config = make_config(kind="lstm", n_covariates=1)
    encoder = build_encoder(config, np.random.default_rng(0))
    assert isinstance(encoder, LSTMEncoder)
    embedded = encoder.embedding(*make_inputs(config, batch=3))
    latents = lstm_forward(embedded, encoder)
    assert latents.shape == (3, config.horizon, config.d_hid)
    assert np.all(np.abs(latents.data) < 1.0)
    with pytest.raises(ContractError):
        transformer_forward(embedded, encoder)


def test_uniform_attention_averages_values():
    rng = np.random.default_rng(4)
    head = AttentionHead(3, 3, rng)
    for linear in [head.query, head.key]:
        linear.weight.data[...] = 0.0
    head.value.weight.data[...] = np.eye(3)
    x = rng.normal(size=(1, 4, 3))
    out, weights = head(Tensor(x), np.tril(np.ones((4, 4), dtype=bool)))
    expected = np.cumsum(x[0], axis=0) / np.arange(1, 5)[:, None]
    assert_allclose(out.data[0], expected, atol=1e-14)
    assert_allclose(weights.data[0, 2], [1 / 3, 1 / 3, 1 / 3, 0.0])


def test_lstm_zero_weights_give_zero_latents():
    config = make_config(kind="lstm")
    encoder = build_encoder(config, np.random.default_rng(0))
    for layer in encoder.layers:
        for p in layer.parameters():
            p.data[...] = 0.0
    embedded = encoder.embedding(*make_inputs(config))
    assert_array_equal(lstm_forward(embedded, encoder).data, 0.0)


def test_lstm_cell_by_hand():
    rng = np.random.default_rng(9)
    layer = LSTMLayer(1, 1, rng)
    layer.gates.bias.data[...] = rng.normal(size=4)
    xs = np.array([0.3, -1.2, 0.8])
    out = layer(Tensor(xs.reshape(1, 3, 1))).data.ravel()

    w = layer.gates.weight.data
    b = layer.gates.bias.data
    h = c = 0.0
    expected = []
    for x in xs:
        z = x * w[0] + h * w[1] + b
        i, f, o = expit(z[0]), expit(z[1]), expit(z[2])
        c = f * c + i * np.tanh(z[3])
        h = o * np.tanh(c)
        expected.append(h)
    assert_allclose(out, expected, rtol=0, atol=1e-12)


def test_series_embedding():
    config = make_config(use_id_embedding=True, n_series=3)
    encoder = build_encoder(config, np.random.default_rng(0))
    encoder.eval()
    lagged, covariates, _ = make_inputs(config)
    first, _ = encoder(lagged, covariates, np.array([0, 0]))
    second, _ = encoder(lagged, covariates, np.array([0, 2]))
    assert_array_equal(first.data[0], second.data[0])
    assert not np.array_equal(first.data[1], second.data[1])


def test_embedding_errors():
    config = make_config(n_covariates=2)
    encoder = build_encoder(config, np.random.default_rng(0))
    lagged, covariates, index = make_inputs(config)
    with pytest.raises(ContractError):
        encoder(lagged, covariates[..., :1], index)
    with pytest.raises(ContractError):
        lstm_forward(encoder.embedding(lagged, covariates, index), encoder)


def test_dropout_only_in_training():
    config = make_config(dropout=0.5)
    encoder = build_encoder(
        config, np.random.default_rng(0), np.random.default_rng(1)
    )
    inputs = make_inputs(config)
    encoder.eval()
    first, _ = encoder(*inputs)
    second, _ = encoder(*inputs)
    assert_array_equal(first.data, second.data)
    encoder.train()
    noisy, _ = encoder(*inputs)
    assert not np.array_equal(first.data, noisy.data)


def test_embed_inputs(windows):
    config = make_config(input_length=6, horizon=3)
    encoder = build_encoder(config, np.random.default_rng(0))
    embedded = embed_inputs(windows["train"][:4], encoder)
    assert embedded.shape == (4, 9, config.d_hid)


def test_export_attention(tmpdir):
    config = make_config()
    encoder = build_encoder(config, np.random.default_rng(0))
    encoder.eval()
    _, maps = encoder(*make_inputs(config))
    directory = os.path.join(str(tmpdir), "attention")
    filenames = export_attention(maps, directory, sample=1)
    assert len(filenames) == config.n_layers * config.n_heads
    assert sorted(os.listdir(directory)) == sorted(
        "attention_layer{0}_head{1}.csv".format(layer, head)
        for layer in range(config.n_layers)
        for head in range(config.n_heads)
    )
    for amap, filename in zip(maps, filenames):
        weights = read_attention(filename)
        assert_array_equal(weights, amap.weights[1])
        assert_allclose(weights.sum(axis=1), 1.0, atol=1e-9)
