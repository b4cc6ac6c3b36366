# Licensed under a 3-clause BSD style license - see LICENSE.rst
import numpy as np

from .errors import CheckpointError
from .tensor import Parameter, Tensor, dropout, embedding, layer_norm, matmul

__all__ = ["Module", "Linear", "LayerNorm", "Embedding", "Dropout"]


class Module:
    """
    Base class for parameterized building blocks.

    Attributes that are `~ssdnet.tensor.Parameter`, `Module` or lists of
    modules are discovered in assignment order, so parameter names are dotted
    attribute paths such as ``encoder.layers.0.ffn_in.weight``.
    """

    training = True

    def named_parameters(self, prefix=""):
        for attr, value in vars(self).items():
            path = prefix + attr
            if isinstance(value, Parameter):
                value.name = path
                yield path, value
            elif isinstance(value, Module):
                yield from value.named_parameters(path + ".")
            elif isinstance(value, (list, tuple)):
                for idx, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_parameters(
                            "{0}.{1}.".format(path, idx)
                        )

    def parameters(self):
        return [p for _, p in self.named_parameters()]

    def modules(self):
        yield self
        for value in vars(self).values():
            if isinstance(value, Module):
                yield from value.modules()
            elif isinstance(value, (list, tuple)):
                for item in value:
                    if isinstance(item, Module):
                        yield from item.modules()

    def train(self, mode=True):
        for module in self.modules():
            module.training = mode
        return self

    def eval(self):
        return self.train(False)

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self):
        """Copy of every parameter value keyed by dotted name."""
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state):
        """
        Overwrite parameter values in place.

        Raises
        ------
        CheckpointError
            If a parameter is missing from ``state`` or has another shape.
        """
        for name, p in self.named_parameters():
            if name not in state:
                raise CheckpointError("missing parameter {0}".format(name))
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != p.shape:
                raise CheckpointError(
                    "parameter {0} has shape {1}, expected {2}".format(
                        name, value.shape, p.shape
                    )
                )
            p.data[...] = value


class Linear(Module):
    """Affine map ``x @ weight + bias`` over the last axis."""

    def __init__(self, n_in, n_out, rng, bias=True):
        bound = 1.0 / np.sqrt(n_in)
        self.weight = Parameter(rng.uniform(-bound, bound, (n_in, n_out)))
        self.bias = Parameter(np.zeros(n_out)) if bias else None

    def __call__(self, x):
        out = matmul(x, self.weight)
        if self.bias is not None:
            out = out + self.bias
        return out


class LayerNorm(Module):
    def __init__(self, width, eps=1e-5):
        self.eps = eps
        self.gain = Parameter(np.ones(width))
        self.bias = Parameter(np.zeros(width))

    def __call__(self, x):
        return layer_norm(x, self.eps) * self.gain + self.bias


class Embedding(Module):
    """Learnable lookup table of ``n`` rows of width ``width``."""

    def __init__(self, n, width, rng, scale=0.02):
        self.weight = Parameter(rng.normal(0.0, scale, (n, width)))

    def __call__(self, indices):
        return embedding(self.weight, indices)


class Dropout(Module):
    """Inverted dropout driven by a shared, seeded generator."""

    def __init__(self, rate, rng):
        self.rate = rate
        self.rng = rng

    def __call__(self, x):
        if not isinstance(x, Tensor):
            x = Tensor(x)
        return dropout(x, self.rate, self.rng, training=self.training)
