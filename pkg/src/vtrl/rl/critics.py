"""Twin Q-networks with polyak-averaged targets.

The target networks copy the online Q heads at construction and then
trail them by exponential averaging. Encoders are not part of the twin
structure; pixel-mode critics read features from a separate encoder
that is hard-synced from the actor's at a fixed period.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.errors import ContractError
from vtrl.numerics import tensor as T
from vtrl.numerics.layers import MLP
from vtrl.numerics.tensor import Parameter, Tensor, constant


def _copy_mlp(src: MLP, name: str) -> MLP:
    clone = MLP(layers=[])
    for i, layer in enumerate(src.layers):
        w = Parameter(layer.weight.value.copy(), f"{name}/fc{i}/weight")
        b = Parameter(layer.bias.value.copy(), f"{name}/fc{i}/bias")
        clone.layers.append(type(layer)(w, b))
    return clone


@dataclass
class TwinCritics:
    q1: MLP
    q2: MLP
    target_q1: MLP
    target_q2: MLP

    @classmethod
    def create(cls, rng, input_dim: int, action_dim: int, hidden_dim: int,
               name: str = "critic") -> "TwinCritics":
        sizes = (input_dim + action_dim, hidden_dim, hidden_dim, 1)
        q1 = MLP.create(rng, sizes, f"{name}/q1")
        q2 = MLP.create(rng, sizes, f"{name}/q2")
        return cls(q1=q1, q2=q2,
                   target_q1=_copy_mlp(q1, f"{name}/q1_target"),
                   target_q2=_copy_mlp(q2, f"{name}/q2_target"))

    def online_parameters(self):
        return self.q1.parameters() + self.q2.parameters()

    def target_parameters(self):
        return self.target_q1.parameters() + self.target_q2.parameters()

    def parameters(self):
        return self.online_parameters() + self.target_parameters()


def q_value(net: MLP, features, actions) -> Tensor:
    """Scalar Q(s, a) per row from concatenated features and actions."""
    if not isinstance(features, Tensor):
        features = constant(np.asarray(features))
    if not isinstance(actions, Tensor):
        actions = constant(np.asarray(actions))
    x = T.concat([features, actions], axis=1)
    return T.reshape(net(x), (-1,))


def polyak_update(target_params, online_params, polyak: float) -> None:
    """theta_target <- polyak * theta_target + (1 - polyak) * theta."""
    if not 0.0 < polyak <= 1.0:
        raise ContractError(f"polyak factor must be in (0, 1], got {polyak}")
    if len(target_params) != len(online_params):
        raise ContractError("target/online parameter lists differ in length")
    for tgt, src in zip(target_params, online_params):
        if tgt.value.shape != src.value.shape:
            raise ContractError(
                f"polyak shape mismatch: {tgt.name} {tgt.value.shape} vs "
                f"{src.name} {src.value.shape}")
        tgt.value *= polyak
        tgt.value += (1.0 - polyak) * src.value


def sync_critic_encoder(actor_encoder_params, critic_encoder_params,
                        step: int, period: int) -> bool:
    """Hard-copy the actor's encoder weights every `period` steps.

    Returns True when a copy happened. Between syncs the critic encoder
    is frozen, so its features drift only when the copy lands.
    """
    if period < 1:
        raise ContractError(f"sync period must be >= 1, got {period}")
    if len(actor_encoder_params) != len(critic_encoder_params):
        raise ContractError("encoder parameter lists differ in length")
    if step % period != 0:
        return False
    for src, dst in zip(actor_encoder_params, critic_encoder_params):
        if src.value.shape != dst.value.shape:
            raise ContractError(
                f"encoder sync shape mismatch: {src.name} {src.value.shape} "
                f"vs {dst.name} {dst.value.shape}")
        dst.value = src.value.copy()
    return True
