"""Loss functions for both algorithms.

These are pure graph builders: callers hand in features (as arrays for
detached inputs, or live tensors when encoder gradients are wanted) and
get back a scalar loss plus a components record for the metrics stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.contrastive import combined_loss
from vtrl.errors import ContractError
from vtrl.numerics import tensor as T
from vtrl.numerics.tensor import Tensor, constant
from vtrl.rl.buffers import RolloutBuffer
from vtrl.rl.config import PPOConfig, SACConfig
from vtrl.rl.critics import q_value
from vtrl.rl.policy import entropy, log_prob_of, sample_actions


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else constant(np.asarray(x))


@dataclass
class SACFeatureBatch:
    """Inputs to the SAC losses with encoding already resolved.

    critic features are plain arrays (the critic encoder receives no
    gradients); policy features may be a live tensor so the actor loss
    can reach the online encoders.
    """

    policy_features: object
    critic_features: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    dones: np.ndarray
    next_policy_features: np.ndarray
    next_critic_features: np.ndarray


def sac_critic_loss(batch: SACFeatureBatch, nets, cfg: SACConfig,
                    noise: np.ndarray):
    """Twin Bellman regression against the entropy-adjusted target.

    Returns (loss, info); info carries the per-row target so the
    discount-free and entropy-free special cases can be checked
    directly.
    """
    next_actions, next_log_prob = sample_actions(
        nets.policy, np.asarray(batch.next_policy_features), noise)
    tq1 = q_value(nets.critics.target_q1, batch.next_critic_features, next_actions)
    tq2 = q_value(nets.critics.target_q2, batch.next_critic_features, next_actions)
    min_q = np.minimum(tq1.data, tq2.data)
    target = batch.rewards + cfg.gamma * (1.0 - batch.dones) * (
        min_q - cfg.alpha_ent * next_log_prob.data)

    y = constant(target)
    q1 = q_value(nets.critics.q1, batch.critic_features, batch.actions)
    q2 = q_value(nets.critics.q2, batch.critic_features, batch.actions)
    e1 = T.sub(q1, y)
    e2 = T.sub(q2, y)
    loss = T.add(T.tmean(T.mul(e1, e1)), T.tmean(T.mul(e2, e2)))
    info = {"target": target, "q1": q1.data.copy(), "q2": q2.data.copy()}
    return loss, info


def sac_actor_loss(batch: SACFeatureBatch, nets, cfg: SACConfig,
                   noise: np.ndarray, contrastive_cfg=None, aug=None):
    """Entropy-regularized policy objective, plus the contrastive term.

    When `contrastive_cfg` and an augmented pair are supplied and beta
    is nonzero, beta * L_MM joins the total; otherwise the contrastive
    graph is never built, so disabling it leaves no trace in the tape.
    """
    actions, log_prob = sample_actions(nets.policy, batch.policy_features, noise)
    q1 = q_value(nets.critics.q1, batch.critic_features, actions)
    q2 = q_value(nets.critics.q2, batch.critic_features, actions)
    min_q = T.minimum(q1, q2)
    loss_actor = T.tmean(T.sub(T.mul(constant(cfg.alpha_ent), log_prob), min_q))

    components = {
        "loss_actor": float(loss_actor.data),
        "entropy": float(-np.mean(log_prob.data)),
        "loss_mm": 0.0, "loss_vv": 0.0, "loss_tt": 0.0,
        "loss_vt": 0.0, "loss_tv": 0.0,
    }
    total = loss_actor
    if contrastive_cfg is not None and aug is not None and contrastive_cfg.beta > 0.0:
        mm, mm_parts = combined_loss(nets.model, aug, contrastive_cfg)
        total = T.add(total, T.mul(constant(contrastive_cfg.beta), mm))
        components.update(mm_parts)
    return total, components


def gae_advantages(rollout: RolloutBuffer, cfg: PPOConfig
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Generalized advantage estimation over one collection phase.

    Returns raw (advantages, returns); normalization is the update
    phase's job so the lambda = 0 one-step identity stays exact here.
    """
    n = len(rollout)
    if n == 0:
        raise ContractError("cannot compute advantages of an empty rollout")
    rewards = np.asarray(rollout.rewards, dtype=float)
    values = np.asarray(rollout.values, dtype=float)
    dones = np.asarray(rollout.dones, dtype=float)
    next_values = np.append(values[1:], float(rollout.bootstrap_value))
    deltas = rewards + cfg.gamma * (1.0 - dones) * next_values - values
    advantages = np.empty(n)
    acc = 0.0
    for t in reversed(range(n)):
        acc = deltas[t] + cfg.gamma * cfg.gae_lambda * (1.0 - dones[t]) * acc
        advantages[t] = acc
    return advantages, advantages + values


def normalize_advantages(advantages: np.ndarray) -> np.ndarray:
    adv = np.asarray(advantages, dtype=float)
    return (adv - adv.mean()) / (adv.std() + 1e-8)


@dataclass
class PPOBatch:
    """One minibatch of the clipped-surrogate update."""

    features: object
    actions: np.ndarray
    old_log_probs: np.ndarray
    advantages: np.ndarray
    returns: np.ndarray


def ppo_clip_loss(batch: PPOBatch, nets, cfg: PPOConfig,
                  contrastive_cfg=None, aug=None):
    """Clipped surrogate + value regression + contrastive term.

    total = surrogate + value_coef * MSE(V, returns) + beta * L_MM
            - entropy_coef * policy entropy
    """
    features = _as_tensor(batch.features)
    new_log_probs = log_prob_of(nets.policy, features, batch.actions)
    ratio = T.exp(T.sub(new_log_probs, constant(np.asarray(batch.old_log_probs))))
    adv = constant(np.asarray(batch.advantages))
    clipped = T.clip(ratio, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon)
    surrogate = T.neg(T.tmean(T.minimum(T.mul(ratio, adv), T.mul(clipped, adv))))

    values = T.reshape(nets.value(features), (-1,))
    verr = T.sub(values, constant(np.asarray(batch.returns)))
    value_mse = T.tmean(T.mul(verr, verr))

    ent = entropy(nets.policy)
    total = T.add(surrogate, T.mul(constant(cfg.value_coef), value_mse))
    if cfg.entropy_coef != 0.0:
        total = T.sub(total, T.mul(constant(cfg.entropy_coef), ent))

    components = {
        "loss_actor": float(surrogate.data),
        "loss_critic": float(value_mse.data),
        "entropy": float(ent.data),
        "ratio_mean": float(np.mean(ratio.data)),
        "loss_mm": 0.0, "loss_vv": 0.0, "loss_tt": 0.0,
        "loss_vt": 0.0, "loss_tv": 0.0,
    }
    if contrastive_cfg is not None and aug is not None and contrastive_cfg.beta > 0.0:
        mm, mm_parts = combined_loss(nets.model, aug, contrastive_cfg)
        total = T.add(total, T.mul(constant(contrastive_cfg.beta), mm))
        components.update(mm_parts)
    return total, components
