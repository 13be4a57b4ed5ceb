"""Diagonal Gaussian policies.

One trunk MLP predicts the mean; the log standard deviation is a free
parameter vector shared across states. The squashed variant applies
tanh and corrects the density with the change-of-variables term, using
the softplus form of log(1 - tanh(u)^2) so log-probabilities stay
finite however far the pre-squash sample lands in the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vtrl.numerics import tensor as T
from vtrl.numerics.layers import MLP
from vtrl.numerics.tensor import Parameter, Tensor, constant

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
LOG_STD_INIT = -0.5

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def softplus(x: Tensor) -> Tensor:
    """log(1 + e^x) evaluated without overflow for large |x|."""
    absx = T.add(T.relu_apply(x), T.relu_apply(T.neg(x)))
    return T.add(T.relu_apply(x), T.log(T.add(constant(1.0), T.exp(T.neg(absx)))))


def tanh_log_det(u: Tensor) -> Tensor:
    """Row sums of log(1 - tanh(u)^2) via 2(log 2 - u - softplus(-2u))."""
    ln2 = constant(math.log(2.0))
    inner = T.sub(T.sub(ln2, u), softplus(T.mul(constant(-2.0), u)))
    return T.tsum(T.mul(constant(2.0), inner), axis=1)


def gaussian_log_prob(mean: Tensor, log_std: Tensor, value) -> Tensor:
    """Per-row log density of a diagonal Gaussian at `value`."""
    if not isinstance(value, Tensor):
        value = constant(np.asarray(value))
    std = T.exp(log_std)
    z = T.div(T.sub(value, mean), std)
    per_dim = T.sub(T.mul(constant(-0.5), T.mul(z, z)),
                    T.add(log_std, constant(_HALF_LOG_2PI)))
    return T.tsum(per_dim, axis=1)


@dataclass
class GaussianPolicy:
    trunk: MLP
    log_std: Parameter
    squash: bool

    @classmethod
    def create(cls, rng, input_dim: int, action_dim: int, hidden_dim: int,
               squash: bool, name: str = "policy") -> "GaussianPolicy":
        trunk = MLP.create(rng, (input_dim, hidden_dim, hidden_dim, action_dim),
                           f"{name}/mean")
        log_std = Parameter(np.full(action_dim, LOG_STD_INIT), f"{name}/log_std")
        return cls(trunk=trunk, log_std=log_std, squash=squash)

    @property
    def action_dim(self) -> int:
        return self.log_std.value.shape[0]

    def parameters(self):
        return self.trunk.parameters() + [self.log_std]

    def mean_log_std(self, x) -> tuple[Tensor, Tensor]:
        mean = self.trunk(x)
        log_std = T.clip(self.log_std.leaf(), LOG_STD_MIN, LOG_STD_MAX)
        return mean, log_std


def sample_actions(policy: GaussianPolicy, x, noise: np.ndarray
                   ) -> tuple[Tensor, Tensor]:
    """Reparameterized draw: returns (actions, per-row log_prob).

    `noise` is a fixed standard-normal array; gradients flow through the
    mean and log_std only, which is what the SAC actor loss needs.
    """
    mean, log_std = policy.mean_log_std(x)
    u = T.add(mean, T.mul(T.exp(log_std), constant(noise)))
    log_prob = gaussian_log_prob(mean, log_std, u)
    if policy.squash:
        actions = T.tanh(u)
        log_prob = T.sub(log_prob, tanh_log_det(u))
    else:
        actions = u
    return actions, log_prob


def log_prob_of(policy: GaussianPolicy, x, actions: np.ndarray) -> Tensor:
    """Log density of previously collected unsquashed actions.

    Only valid for the clipped-Gaussian (PPO) variant: the stored action
    is the raw Gaussian sample, so no Jacobian term applies.
    """
    if policy.squash:
        raise ValueError("log_prob_of expects an unsquashed policy")
    mean, log_std = policy.mean_log_std(x)
    return gaussian_log_prob(mean, log_std, constant(np.asarray(actions)))


def entropy(policy: GaussianPolicy) -> Tensor:
    """Exact entropy of the diagonal Gaussian (state-independent)."""
    log_std = T.clip(policy.log_std.leaf(), LOG_STD_MIN, LOG_STD_MAX)
    d = policy.action_dim
    return T.add(T.tsum(log_std), constant(0.5 * d * (1.0 + math.log(2.0 * math.pi))))


def act(policy: GaussianPolicy, x: np.ndarray, deterministic: bool,
        rng: np.random.Generator) -> tuple[np.ndarray, float]:
    """Single-observation action draw, outside any gradient tape.

    Returns the action and its log probability. The squashed variant
    emits tanh-bounded actions; the unsquashed variant returns the raw
    Gaussian sample and leaves range clipping to the environment.
    """
    x = np.asarray(x)
    if x.ndim == 1:
        x = x[None, :]
    if deterministic:
        noise = np.zeros((x.shape[0], policy.action_dim))
    else:
        noise = rng.standard_normal((x.shape[0], policy.action_dim))
    actions, log_prob = sample_actions(policy, x, noise)
    return actions.data[0].copy(), float(log_prob.data[0])
