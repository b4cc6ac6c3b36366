# Licensed under a 3-clause BSD style license - see LICENSE.rst
import numpy as np

from .validator import validate_integer, validate_scalar

__all__ = ["Adam", "clip_grad_norm", "EarlyStopping"]


class Adam:
    """
    Adam optimizer with bias-corrected moment estimates.

    Parameters
    ----------
    parameters : list of `~ssdnet.tensor.Parameter`
    learning_rate : float
    betas : tuple of float, optional
    eps : float, optional
    """

    def __init__(
        self, parameters, learning_rate, betas=(0.9, 0.999), eps=1e-8
    ):
        self.parameters = list(parameters)
        self.learning_rate = validate_scalar(
            "learning_rate", learning_rate, "strictly-positive"
        )
        self.beta1, self.beta2 = betas
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p.data) for p in self.parameters]
        self.v = [np.zeros_like(p.data) for p in self.parameters]

    def step(self):
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, m, v in zip(self.parameters, self.m, self.v):
            if p.grad is None:
                continue
            m *= self.beta1
            m += (1.0 - self.beta1) * p.grad
            v *= self.beta2
            v += (1.0 - self.beta2) * p.grad ** 2
            m_hat = m / correction1
            v_hat = v / correction2
            p.data -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self):
        for p in self.parameters:
            p.zero_grad()


def clip_grad_norm(parameters, max_norm=5.0):
    """
    Rescale gradients in place so their global L2 norm is at most
    ``max_norm``.

    Returns
    -------
    norm : float
        Global norm before clipping.
    """
    grads = [p.grad for p in parameters if p.grad is not None]
    norm = float(np.sqrt(sum(np.sum(g * g) for g in grads)))
    if norm > max_norm:
        scale = max_norm / (norm + 1e-12)
        for g in grads:
            g *= scale
    return norm


class EarlyStopping:
    """
    Track the best validation loss; `step` returns True once ``patience``
    epochs in a row failed to improve it.
    """

    def __init__(self, patience=10):
        self.patience = validate_integer("patience", patience, 0)
        self.best = np.inf
        self.counter = 0
        self.improved = False

    def step(self, loss):
        """Record ``loss``; returns True when training should stop."""
        if loss < self.best:
            self.best = loss
            self.counter = 0
            self.improved = True
        else:
            self.counter += 1
            self.improved = False
        return self.counter > self.patience
