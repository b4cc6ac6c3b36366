# Licensed under a 3-clause BSD style license - see LICENSE.rst
"""
Fixed-form state-space decoder.

The state vector ``alpha`` holds the trend in slot 0 and the seasonal values in
slots ``1 ... s-1`` (most recent first). It evolves as
``alpha_{t+1} = gamma @ alpha_t + c_t`` and emits ``z @ alpha_t``, the sum of
trend and current seasonal value, as the mean of a Gaussian forecast.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .errors import ContractError, NumericError
from .layers import Linear, Module
from .tensor import (
    Tensor,
    concat,
    hard_sigmoid,
    matmul,
    softplus,
    take,
)
from .validator import validate_integer, validate_scalar

__all__ = [
    "TransitionSystem",
    "SSMState",
    "Innovation",
    "StepDistribution",
    "ForecastPath",
    "InnovationHead",
    "InitStateHead",
    "VarianceHead",
    "build_transition_system",
    "lag_innovation_mask",
    "innovation_head",
    "variance_head",
    "init_state_head",
    "ssm_step",
    "ssm_unroll",
    "unroll_tensor",
    "innovation_bounds",
    "within_innovation_bounds",
    "gaussian_quantile",
]


@dataclass(frozen=True)
class TransitionSystem:
    """Non-trainable transition matrix ``gamma`` and emission vector ``z``."""

    s: int
    gamma: np.ndarray = field(repr=False)
    z: np.ndarray = field(repr=False)


def build_transition_system(s):
    """
    Build the random-walk trend plus dummy-seasonal transition system.

    Parameters
    ----------
    s : int
        Seasonality period, at least 2.

    Returns
    -------
    system : `TransitionSystem`
        ``gamma[0, 0] = 1``; row 1 is ``[0, -1, ..., -1]``; rows ``2 ... s-1``
        shift the seasonal lags down by one slot. ``z = (1, 1, 0, ..., 0)``.

    Examples
    --------
    >>> build_transition_system(3).gamma
    array([[ 1.,  0.,  0.],
           [ 0., -1., -1.],
           [ 0.,  1.,  0.]])
    """
    s = validate_integer("s", s, minimum=2)

    gamma = np.zeros((s, s))
    gamma[0, 0] = 1.0
    gamma[1, 1:] = -1.0
    for row in range(2, s):
        gamma[row, row - 1] = 1.0
    z = np.zeros(s)
    z[:2] = 1.0

    gamma.flags.writeable = False
    z.flags.writeable = False
    return TransitionSystem(s=s, gamma=gamma, z=z)


def lag_innovation_mask(s, lag_innovations=False):
    """Multiplier for innovation vectors.

    With ``lag_innovations=False`` only the trend and current-seasonal entries
    are kept, so trend and seasonality follow the additive random-walk and
    dummy-seasonal recurrences exactly.
    """
    if lag_innovations:
        return np.ones(s)
    mask = np.zeros(s)
    mask[:2] = 1.0
    return mask


@dataclass
class SSMState:
    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=np.float64)

    @property
    def trend(self):
        return self.alpha[0]

    @property
    def seasonality(self):
        return self.alpha[1]


@dataclass
class Innovation:
    c: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=np.float64)


@dataclass
class StepDistribution:
    mean: float
    variance: float
    trend: float
    seasonality: float


@dataclass
class ForecastPath:
    """
    Gaussian forecast over a horizon with its trend/seasonality decomposition.

    ``mean`` is always computed as ``trend + seasonality``. ``timestamps`` and
    ``series_id`` are set when the path was decoded from a dataset window.
    """

    mean: np.ndarray
    variance: np.ndarray
    trend: np.ndarray
    seasonality: np.ndarray
    timestamps: np.ndarray = None
    series_id: object = None

    def __post_init__(self):
        for name in ["mean", "variance", "trend", "seasonality"]:
            setattr(
                self,
                name,
                np.atleast_1d(np.asarray(getattr(self, name), float)),
            )
        lengths = {
            len(self.mean),
            len(self.variance),
            len(self.trend),
            len(self.seasonality),
        }
        if len(lengths) != 1:
            raise ContractError("ForecastPath fields differ in length")
        if np.any(~(self.variance > 0.0)):
            raise ContractError("ForecastPath variance should be positive")

    def __len__(self):
        return len(self.mean)

    def step(self, t):
        return StepDistribution(
            float(self.mean[t]),
            float(self.variance[t]),
            float(self.trend[t]),
            float(self.seasonality[t]),
        )

    def quantile(self, rho):
        return gaussian_quantile(self.mean, self.variance, rho)

    @property
    def q50(self):
        return self.quantile(0.5)

    @property
    def q90(self):
        return self.quantile(0.9)


# Parameter heads


class InnovationHead(Module):
    """``HardSigmoid(Linear(o)) - 0.5``: bounded innovations of width ``s``."""

    def __init__(self, d_hid, s, rng):
        self.linear = Linear(d_hid, s, rng)

    def __call__(self, latents):
        return hard_sigmoid(self.linear(latents)) - 0.5


class InitStateHead(InnovationHead):
    """Same activation as `InnovationHead`, with its own affine weights."""


class VarianceHead(Module):
    """``Softplus(Linear(o))``: strictly positive variance."""

    def __init__(self, d_hid, rng):
        self.linear = Linear(d_hid, 1, rng)

    def __call__(self, latents):
        return softplus(self.linear(latents))


def _apply_head(head, latent, name):
    latent = np.asarray(latent, dtype=np.float64)
    if not np.all(np.isfinite(latent)):
        raise NumericError("{0}: latent has non-finite values".format(name))
    width = head.linear.weight.shape[0]
    if latent.shape[-1] != width:
        raise ContractError(
            "{0}: latent width {1} does not match head width {2}".format(
                name, latent.shape[-1], width
            )
        )
    single = latent.ndim == 1
    out = head(Tensor(np.atleast_2d(latent))).data
    return out[0] if single else out


def innovation_head(latent, head):
    """Innovation ``c_t`` for a single latent vector."""
    return Innovation(_apply_head(head, latent, "innovation_head"))


def variance_head(latent, head):
    """Positive variance for a single latent vector."""
    return float(_apply_head(head, latent, "variance_head")[..., 0])


def init_state_head(latent, head):
    """Initial state ``alpha_0`` from the latent at the first decoder step."""
    return SSMState(_apply_head(head, latent, "init_state_head"))


# State evolution


def _as_vector(value, attr):
    if hasattr(value, attr):
        value = getattr(value, attr)
    return np.asarray(value, dtype=np.float64)


def ssm_step(state, c, system):
    """Advance ``alpha`` by one step: ``gamma @ alpha + c``."""
    alpha = _as_vector(state, "alpha")
    c = _as_vector(c, "c")
    if alpha.shape != (system.s,) or c.shape != (system.s,):
        raise ContractError(
            "ssm_step: state {0} and innovation {1} should both have length "
            "{2}".format(alpha.shape, c.shape, system.s)
        )
    return SSMState(system.gamma @ alpha + c)


def ssm_unroll(alpha0, innovations, variances, system):
    """
    Unroll the state over a horizon.

    Parameters
    ----------
    alpha0 : `SSMState` or array
        Initial state.
    innovations : list of `Innovation` or array of shape ``(T_h, s)``
        Innovation applied at each step.
    variances : array of shape ``(T_h,)``
        Positive variances per step.
    system : `TransitionSystem`

    Returns
    -------
    path : `ForecastPath`
    """
    innovations = [_as_vector(c, "c") for c in innovations]
    variances = np.asarray(variances, dtype=np.float64).reshape(-1)
    if len(innovations) != len(variances):
        raise ContractError(
            "ssm_unroll: {0} innovations but {1} variances".format(
                len(innovations), len(variances)
            )
        )
    if np.any(~(variances > 0.0)):
        raise ContractError("ssm_unroll: variances should be positive")

    state = SSMState(_as_vector(alpha0, "alpha"))
    trend = np.empty(len(variances))
    seasonality = np.empty(len(variances))
    for t, c in enumerate(innovations):
        state = ssm_step(state, c, system)
        trend[t] = state.trend
        seasonality[t] = state.seasonality

    return ForecastPath(trend + seasonality, variances, trend, seasonality)


def unroll_tensor(alpha0, innovations, system):
    """
    Differentiable batched unroll.

    Parameters
    ----------
    alpha0 : `~ssdnet.tensor.Tensor` of shape ``(B, s)``
    innovations : `~ssdnet.tensor.Tensor` of shape ``(B, T_h, s)``
    system : `TransitionSystem`

    Returns
    -------
    trend, seasonality : `~ssdnet.tensor.Tensor` of shape ``(B, T_h)``
    """
    batch, horizon, s = innovations.shape
    if s != system.s or alpha0.shape != (batch, s):
        raise ContractError(
            "unroll_tensor: state {0} and innovations {1} do not match "
            "s={2}".format(alpha0.shape, innovations.shape, system.s)
        )
    gamma_t = Tensor(system.gamma.T)
    alpha = alpha0
    trends, seasonals = [], []
    for t in range(horizon):
        c_t = take(innovations, np.s_[:, t, :])
        alpha = matmul(alpha, gamma_t) + c_t
        trends.append(take(alpha, np.s_[:, 0:1]))
        seasonals.append(take(alpha, np.s_[:, 1:2]))
    return concat(trends, axis=-1), concat(seasonals, axis=-1)


# Bounds


def innovation_bounds(t, s):
    """
    Bounds on ``|trend|`` and ``|seasonality|`` after ``t`` innovations.

    This is the trend/seasonality range operation: with ``alpha_0`` and
    every innovation drawn from the bounded heads (and the default lag
    mask), ``|Tr_t| <= (t + 1) / 2`` and ``|S_t| <= (s - 1 + t) / 2``.
    `within_innovation_bounds` applies it to a whole decoded path.

    Returns
    -------
    trend_bound, seasonality_bound : float
        ``(t + 1) * 0.5`` and ``(s - 1 + t) * 0.5``.
    """
    t = validate_integer("t", t, minimum=0, error=ContractError)
    s = validate_integer("s", s, minimum=2, error=ContractError)
    return (t + 1) * 0.5, (s - 1 + t) * 0.5


def within_innovation_bounds(path, s):
    """Whether a normalized-unit decoded path respects the trend and
    seasonality bounds at every step (step ``k`` follows ``k + 1``
    innovations)."""
    steps = np.arange(1, len(path) + 1)
    trend_bound = (steps + 1) * 0.5
    seasonality_bound = (s - 1 + steps) * 0.5
    return bool(
        np.all(np.abs(path.trend) <= trend_bound)
        and np.all(np.abs(path.seasonality) <= seasonality_bound)
    )


# Quantiles


@lru_cache(maxsize=256)
def _standard_normal_ppf(rho):
    if rho == 0.5:
        return 0.0
    if rho > 0.5:
        return -_standard_normal_ppf(1.0 - rho)
    # lower tail only
    return brentq(lambda x: ndtr(x) - rho, -40.0, 0.0, xtol=1e-12)


def gaussian_quantile(mean, variance, rho):
    """
    Quantile ``rho`` of a Gaussian with the given mean and variance.

    The standard normal quantile is found by bracketing root search on the
    CDF, accurate to 1e-12. ``rho = 0.5`` returns ``mean`` unchanged.

    Examples
    --------
    >>> round(float(gaussian_quantile(0.0, 1.0, 0.9)), 6)
    1.281552
    """
    rho = validate_scalar("rho", rho, "probability", error=ContractError)
    mean = np.asarray(mean, dtype=np.float64)
    variance = np.asarray(variance, dtype=np.float64)
    if np.any(~(variance > 0.0)):
        raise ContractError("variance should be strictly positive")
    if rho == 0.5:
        return mean.copy()
    return mean + np.sqrt(variance) * _standard_normal_ppf(float(rho))
