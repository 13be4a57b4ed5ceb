"""SAC and PPO agents over pixel, state, and fused representations.

Randomness is split into named child streams (init, act, aug, key,
sample, update) so that structurally absent features consume nothing:
an agent that never builds the contrastive term draws the same values
from every other stream as one that does, which is what makes the
beta = 0 equivalence to the augmentation-only baseline exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.contrastive import (
    AugmentedPair,
    ContrastiveConfig,
    RepresentationModel,
    augment_views,
    center_crop,
    clone_encoder,
    encode,
)
from vtrl.errors import ConfigError
from vtrl.numerics import tensor as T
from vtrl.numerics.layers import MLP
from vtrl.numerics.optim import Adam
from vtrl.numerics.tensor import Tensor, grad_eval, zero_grads
from vtrl.rl.buffers import ReplayBuffer, RolloutBuffer, Transition
from vtrl.rl.config import AgentMode, PPOConfig, SACConfig
from vtrl.rl.critics import TwinCritics, polyak_update, sync_critic_encoder
from vtrl.rl.losses import (
    PPOBatch,
    SACFeatureBatch,
    gae_advantages,
    normalize_advantages,
    ppo_clip_loss,
    sac_actor_loss,
    sac_critic_loss,
)
from vtrl.rl.policy import GaussianPolicy, act as policy_act

ACTION_DIM = 2

_STREAMS = ("init", "act", "aug", "key", "sample", "update")


def _spawn_streams(seed: int) -> dict:
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(child)
            for name, child in zip(_STREAMS, children)}


def _select_modalities(modalities: str, visual, tactile) -> list:
    if modalities == "both":
        return [visual, tactile]
    if modalities == "visual_only":
        return [visual]
    return [tactile]


class _PixelFrontend:
    """Shared observation plumbing for the image-based modes."""

    def __init__(self, mode: AgentMode, contrastive_cfg: ContrastiveConfig,
                 image_size: int):
        if contrastive_cfg.crop_size > image_size:
            raise ConfigError(
                f"crop_size {contrastive_cfg.crop_size} exceeds the "
                f"render size {image_size}")
        self.mode = mode
        self.crop_size = contrastive_cfg.crop_size
        self.image_size = image_size

    def online_encoders(self, model):
        return _select_modalities(self.mode.modalities,
                                  model.online_visual, model.online_tactile)

    def center_images(self, visual: np.ndarray, tactile: np.ndarray):
        return (center_crop(visual, self.crop_size),
                center_crop(tactile, self.crop_size))

    def random_view(self, visual: np.ndarray, tactile: np.ndarray, rng):
        view = augment_views(visual, tactile, self.crop_size, rng)
        return view.visual, view.tactile

    def features_np(self, encoders, visual: np.ndarray, tactile: np.ndarray
                    ) -> np.ndarray:
        images = _select_modalities(self.mode.modalities, visual, tactile)
        feats = [encode(enc, imgs).data for enc, imgs in zip(encoders, images)]
        return feats[0] if len(feats) == 1 else np.concatenate(feats, axis=1)

    def features_graph(self, encoders, visual: np.ndarray, tactile: np.ndarray
                       ) -> Tensor:
        images = _select_modalities(self.mode.modalities, visual, tactile)
        zs = [encode(enc, imgs) for enc, imgs in zip(encoders, images)]
        return zs[0] if len(zs) == 1 else T.concat(zs, axis=1)

    def feature_dim(self, embed_dim: int) -> int:
        return embed_dim * (2 if self.mode.modalities == "both" else 1)


class SACAgent:
    """Off-policy agent; observations are stored raw and augmented per
    sample, so replayed experience yields fresh views every update."""

    def __init__(self, mode: AgentMode, cfg: SACConfig,
                 contrastive_cfg: ContrastiveConfig, image_size: int,
                 state_dim: int, seed: int):
        if mode.algorithm != "sac":
            raise ConfigError(f"SACAgent requires algorithm='sac', got {mode.algorithm!r}")
        self.mode = mode
        self.cfg = cfg
        self.contrastive_cfg = contrastive_cfg
        self.rng = _spawn_streams(seed)
        init = self.rng["init"]

        if mode.uses_pixels:
            self.frontend = _PixelFrontend(mode, contrastive_cfg, image_size)
            self.model = RepresentationModel.create(init, contrastive_cfg)
            self.critic_visual = clone_encoder(self.model.online_visual,
                                               "critic_visual")
            self.critic_tactile = clone_encoder(self.model.online_tactile,
                                                "critic_tactile")
            feature_dim = self.frontend.feature_dim(contrastive_cfg.embed_dim)
        else:
            self.frontend = None
            self.model = None
            self.critic_visual = None
            self.critic_tactile = None
            feature_dim = state_dim

        self.policy = GaussianPolicy.create(init, feature_dim, ACTION_DIM,
                                            cfg.hidden_dim, squash=True)
        self.critics = TwinCritics.create(init, feature_dim, ACTION_DIM,
                                          cfg.hidden_dim)
        actor_params = self.policy.parameters()
        if self.model is not None:
            actor_params = actor_params + self.model.parameters()
        self.actor_opt = Adam(actor_params, learning_rate=cfg.learning_rate)
        self.critic_opt = Adam(self.critics.online_parameters(),
                               learning_rate=cfg.learning_rate)
        self.buffer = ReplayBuffer(cfg.replay_capacity)
        self.env_steps = 0
        self.update_count = 0

    def parameters(self):
        params = self.policy.parameters() + self.critics.parameters()
        if self.model is not None:
            params += self.model.all_parameters()
            params += self.critic_visual.parameters()
            params += self.critic_tactile.parameters()
        return params

    def _critic_encoders(self):
        return _select_modalities(self.mode.modalities,
                                  self.critic_visual, self.critic_tactile)

    def _obs_features(self, observation) -> np.ndarray:
        if self.model is None:
            return np.asarray(observation.state, dtype=float)[None, :]
        vis, tac = self.frontend.center_images(observation.visual[None],
                                               observation.tactile[None])
        return self.frontend.features_np(
            self.frontend.online_encoders(self.model), vis, tac)

    def select_action(self, observation, deterministic: bool = False
                      ) -> np.ndarray:
        """Tanh-squashed policy action; uniform during the warmup phase."""
        if not deterministic and self.env_steps < self.cfg.start_steps:
            return self.rng["act"].uniform(-1.0, 1.0, size=ACTION_DIM)
        x = self._obs_features(observation)
        action, _ = policy_act(self.policy, x, deterministic, self.rng["act"])
        return action

    def observe(self, transition: Transition) -> None:
        self.buffer.push(transition)
        self.env_steps += 1

    def ready_to_update(self) -> bool:
        return (self.env_steps >= self.cfg.start_steps
                and self.buffer.count >= self.cfg.batch_size
                and self.env_steps % self.cfg.update_every == 0)

    def _zero_grads(self) -> None:
        zero_grads(self.parameters())

    def update(self) -> dict:
        """Critic step, actor step, momentum, polyak, encoder sync."""
        cfg = self.cfg
        batch = self.buffer.sample(cfg.batch_size, self.rng["sample"])

        aug = None
        if self.model is not None:
            if self.mode.augments:
                query_view = augment_views(batch.visual, batch.tactile,
                                           self.frontend.crop_size,
                                           self.rng["aug"])
                obs_v, obs_t = query_view.visual, query_view.tactile
                next_view = augment_views(batch.next_visual, batch.next_tactile,
                                          self.frontend.crop_size,
                                          self.rng["aug"])
                nxt_v, nxt_t = next_view.visual, next_view.tactile
            else:
                obs_v, obs_t = self.frontend.center_images(batch.visual,
                                                           batch.tactile)
                nxt_v, nxt_t = self.frontend.center_images(batch.next_visual,
                                                           batch.next_tactile)
            if self.mode.uses_contrastive and self.contrastive_cfg.beta > 0.0:
                key_view = augment_views(batch.visual, batch.tactile,
                                         self.frontend.crop_size,
                                         self.rng["key"])
                aug = AugmentedPair(query_view=query_view, key_view=key_view)
            critic_encs = self._critic_encoders()
            online_encs = self.frontend.online_encoders(self.model)
            critic_feats = self.frontend.features_np(critic_encs, obs_v, obs_t)
            next_critic_feats = self.frontend.features_np(critic_encs, nxt_v, nxt_t)
            next_policy_feats = self.frontend.features_np(online_encs, nxt_v, nxt_t)
            policy_features = self.frontend.features_graph(online_encs, obs_v, obs_t)
        else:
            critic_feats = batch.state
            next_critic_feats = batch.next_state
            next_policy_feats = batch.next_state
            policy_features = batch.state

        fb = SACFeatureBatch(
            policy_features=policy_features,
            critic_features=critic_feats,
            actions=batch.action,
            rewards=batch.reward,
            dones=batch.done,
            next_policy_features=next_policy_feats,
            next_critic_features=next_critic_feats,
        )

        target_noise = self.rng["update"].standard_normal(
            (len(batch), ACTION_DIM))
        self._zero_grads()
        critic_loss, _ = sac_critic_loss(fb, self, cfg, target_noise)
        grad_eval(critic_loss)
        self.critic_opt.step()

        actor_noise = self.rng["update"].standard_normal(
            (len(batch), ACTION_DIM))
        contrastive = self.contrastive_cfg if aug is not None else None
        self._zero_grads()
        actor_loss, components = sac_actor_loss(fb, self, cfg, actor_noise,
                                                contrastive_cfg=contrastive,
                                                aug=aug)
        grad_eval(actor_loss)
        self.actor_opt.step()

        if self.model is not None:
            self.model.momentum_update()
        polyak_update(self.critics.target_parameters(),
                      self.critics.online_parameters(), cfg.polyak)
        if self.model is not None:
            online, critic_side = [], []
            for enc_o, enc_c in zip(
                    (self.model.online_visual, self.model.online_tactile),
                    (self.critic_visual, self.critic_tactile)):
                online += enc_o.parameters()
                critic_side += enc_c.parameters()
            sync_critic_encoder(online, critic_side, self.update_count,
                                cfg.critic_encoder_sync_period)
        self.update_count += 1

        metrics = {"loss_critic": float(critic_loss.data)}
        metrics.update(components)
        return metrics


class PPOAgent:
    """On-policy agent; augmented views are fixed at collection time so
    the first optimization pass reproduces the behaviour policy's
    probabilities exactly."""

    def __init__(self, mode: AgentMode, cfg: PPOConfig,
                 contrastive_cfg: ContrastiveConfig, image_size: int,
                 state_dim: int, seed: int):
        if mode.algorithm != "ppo":
            raise ConfigError(f"PPOAgent requires algorithm='ppo', got {mode.algorithm!r}")
        self.mode = mode
        self.cfg = cfg
        self.contrastive_cfg = contrastive_cfg
        self.rng = _spawn_streams(seed)
        init = self.rng["init"]

        if mode.uses_pixels:
            self.frontend = _PixelFrontend(mode, contrastive_cfg, image_size)
            self.model = RepresentationModel.create(init, contrastive_cfg)
            feature_dim = self.frontend.feature_dim(contrastive_cfg.embed_dim)
        else:
            self.frontend = None
            self.model = None
            feature_dim = state_dim

        self.policy = GaussianPolicy.create(init, feature_dim, ACTION_DIM,
                                            cfg.hidden_dim, squash=False)
        self.value = MLP.create(init, (feature_dim, cfg.hidden_dim,
                                       cfg.hidden_dim, 1), "value")
        params = self.policy.parameters() + self.value.parameters()
        if self.model is not None:
            params = params + self.model.parameters()
        self.opt = Adam(params, learning_rate=cfg.learning_rate)
        self.rollout = RolloutBuffer()
        self.env_steps = 0

    def parameters(self):
        params = self.policy.parameters() + self.value.parameters()
        if self.model is not None:
            params += self.model.all_parameters()
        return params

    def _features_np(self, proc_visual, proc_tactile, state) -> np.ndarray:
        if self.model is None:
            return np.asarray(state, dtype=float)
        return self.frontend.features_np(
            self.frontend.online_encoders(self.model), proc_visual, proc_tactile)

    def _process_collect(self, observation):
        """Collection-time view: random crop in augmenting modes."""
        if self.model is None:
            return None, None
        vis = observation.visual[None]
        tac = observation.tactile[None]
        if self.mode.augments:
            return self.frontend.random_view(vis, tac, self.rng["aug"])
        return self.frontend.center_images(vis, tac)

    def _value_np(self, features: np.ndarray) -> float:
        return float(self.value(features).data[0, 0])

    def act_collect(self, observation) -> dict:
        """Sample an action and record everything the update will need."""
        proc_v, proc_t = self._process_collect(observation)
        x = self._features_np(proc_v, proc_t,
                              np.asarray(observation.state)[None, :])
        action, log_prob = policy_act(self.policy, x, False, self.rng["act"])
        return {
            "action": action,
            "log_prob": log_prob,
            "value": self._value_np(x),
            "proc_visual": None if proc_v is None else proc_v[0],
            "proc_tactile": None if proc_t is None else proc_t[0],
        }

    def select_action(self, observation, deterministic: bool = False
                      ) -> np.ndarray:
        """Deterministic evaluation path (mean action, center crop)."""
        if not deterministic:
            return self.act_collect(observation)["action"]
        if self.model is None:
            x = np.asarray(observation.state, dtype=float)[None, :]
        else:
            vis, tac = self.frontend.center_images(observation.visual[None],
                                                   observation.tactile[None])
            x = self.frontend.features_np(
                self.frontend.online_encoders(self.model), vis, tac)
        action, _ = policy_act(self.policy, x, True, self.rng["act"])
        return action

    def store(self, observation, step_info: dict, reward: float,
              done: bool) -> None:
        self.rollout.add(observation, step_info["action"],
                         step_info["log_prob"], step_info["value"],
                         reward, done,
                         proc_visual=step_info["proc_visual"],
                         proc_tactile=step_info["proc_tactile"])
        self.env_steps += 1

    def ready_to_update(self) -> bool:
        return len(self.rollout) >= self.cfg.rollout_horizon

    def update(self, bootstrap_observation) -> dict:
        """GAE, then clipped-surrogate epochs over shuffled minibatches."""
        cfg = self.cfg
        if self.model is None:
            boot_x = np.asarray(bootstrap_observation.state, dtype=float)[None, :]
        else:
            vis, tac = self.frontend.center_images(
                bootstrap_observation.visual[None],
                bootstrap_observation.tactile[None])
            boot_x = self.frontend.features_np(
                self.frontend.online_encoders(self.model), vis, tac)
        self.rollout.bootstrap_value = self._value_np(boot_x)

        advantages, returns = gae_advantages(self.rollout, cfg)
        advantages = normalize_advantages(advantages)
        n = len(self.rollout)
        actions = np.stack(self.rollout.actions)
        old_log_probs = np.asarray(self.rollout.log_probs)
        if self.model is not None:
            proc_visual = np.stack(self.rollout.proc_visual)
            proc_tactile = np.stack(self.rollout.proc_tactile)
            raw_visual = np.stack(
                [o.visual for o in self.rollout.observations])
            raw_tactile = np.stack(
                [o.tactile for o in self.rollout.observations])
        else:
            states = np.stack([o.state for o in self.rollout.observations])

        contrastive_on = (self.mode.uses_contrastive
                          and self.contrastive_cfg.beta > 0.0)
        sums: dict = {}
        steps = 0
        for _ in range(cfg.epochs_per_update):
            perm = self.rng["update"].permutation(n)
            for start in range(0, n, cfg.minibatch_size):
                mb = perm[start:start + cfg.minibatch_size]
                if self.model is not None:
                    features = self.frontend.features_graph(
                        self.frontend.online_encoders(self.model),
                        proc_visual[mb], proc_tactile[mb])
                else:
                    features = states[mb]
                aug = None
                contrastive = None
                if contrastive_on:
                    query = augment_views(raw_visual[mb], raw_tactile[mb],
                                          self.frontend.crop_size,
                                          self.rng["aug"])
                    key = augment_views(raw_visual[mb], raw_tactile[mb],
                                        self.frontend.crop_size,
                                        self.rng["key"])
                    aug = AugmentedPair(query_view=query, key_view=key)
                    contrastive = self.contrastive_cfg

                pb = PPOBatch(features=features, actions=actions[mb],
                              old_log_probs=old_log_probs[mb],
                              advantages=advantages[mb], returns=returns[mb])
                zero_grads(self.parameters())
                loss, components = ppo_clip_loss(pb, self, cfg,
                                                 contrastive_cfg=contrastive,
                                                 aug=aug)
                grad_eval(loss)
                self.opt.step()
                if self.model is not None:
                    self.model.momentum_update()
                for key_name, value in components.items():
                    sums[key_name] = sums.get(key_name, 0.0) + value
                steps += 1

        self.rollout.clear()
        if steps == 0:
            return {}
        return {name: total / steps for name, total in sums.items()}


def make_agent(mode: AgentMode, contrastive_cfg: ContrastiveConfig,
               algo_cfg, image_size: int, state_dim: int, seed: int):
    if mode.algorithm == "sac":
        if not isinstance(algo_cfg, SACConfig):
            raise ConfigError("sac agent requires a SACConfig")
        return SACAgent(mode, algo_cfg, contrastive_cfg, image_size,
                        state_dim, seed)
    if not isinstance(algo_cfg, PPOConfig):
        raise ConfigError("ppo agent requires a PPOConfig")
    return PPOAgent(mode, algo_cfg, contrastive_cfg, image_size,
                    state_dim, seed)


def sac_update(agent: SACAgent) -> dict:
    return agent.update()


def ppo_update(agent: PPOAgent, bootstrap_observation) -> dict:
    return agent.update(bootstrap_observation)
