"""Agent mode and per-algorithm hyperparameter bundles."""

from __future__ import annotations

from dataclasses import dataclass

from vtrl.errors import ConfigError

ALGORITHMS = ("sac", "ppo")
REPRESENTATIONS = ("m2curl", "rad", "vanilla", "state")
MODALITIES = ("both", "visual_only", "tactile_only")


@dataclass(frozen=True)
class AgentMode:
    """Which algorithm runs, on which representation, from which senses.

    The state representation reads the simulator's low-dimensional state
    vector and ignores the modalities field. Contrastive training needs
    both modalities, so that combination is enforced here.
    """

    algorithm: str
    representation: str = "m2curl"
    modalities: str = "both"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(
                f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.representation not in REPRESENTATIONS:
            raise ConfigError(
                f"representation must be one of {REPRESENTATIONS}, "
                f"got {self.representation!r}")
        if self.modalities not in MODALITIES:
            raise ConfigError(
                f"modalities must be one of {MODALITIES}, got {self.modalities!r}")
        if self.representation == "m2curl" and self.modalities != "both":
            raise ConfigError(
                "contrastive representation requires modalities='both', "
                f"got {self.modalities!r}")

    @property
    def uses_pixels(self) -> bool:
        return self.representation != "state"

    @property
    def uses_contrastive(self) -> bool:
        return self.representation == "m2curl"

    @property
    def augments(self) -> bool:
        return self.representation in ("m2curl", "rad")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


@dataclass
class SACConfig:
    gamma: float = 0.99
    alpha_ent: float = 0.1
    polyak: float = 0.995
    batch_size: int = 128
    critic_encoder_sync_period: int = 2
    learning_rate: float = 1e-3
    hidden_dim: int = 128
    replay_capacity: int = 100_000
    start_steps: int = 1000
    update_every: int = 1

    def __post_init__(self):
        _require(0.0 <= self.gamma < 1.0, f"gamma must be in [0, 1), got {self.gamma}")
        _require(self.alpha_ent >= 0.0, f"alpha_ent must be >= 0, got {self.alpha_ent}")
        _require(0.0 < self.polyak <= 1.0, f"polyak must be in (0, 1], got {self.polyak}")
        _require(self.batch_size >= 1, "batch_size must be positive")
        _require(self.critic_encoder_sync_period >= 1, "sync period must be >= 1")
        _require(self.learning_rate > 0.0, "learning_rate must be positive")
        _require(self.hidden_dim >= 1, "hidden_dim must be positive")
        _require(self.replay_capacity >= 1, "replay_capacity must be positive")
        _require(self.start_steps >= 0, "start_steps must be >= 0")
        _require(self.update_every >= 1, "update_every must be >= 1")


@dataclass
class PPOConfig:
    clip_epsilon: float = 0.2
    gae_lambda: float = 0.95
    gamma: float = 0.99
    epochs_per_update: int = 4
    rollout_horizon: int = 2048
    minibatch_size: int = 64
    value_coef: float = 0.5
    entropy_coef: float = 0.0
    learning_rate: float = 1e-3
    hidden_dim: int = 128

    def __post_init__(self):
        _require(self.clip_epsilon > 0.0,
                 f"clip_epsilon must be positive, got {self.clip_epsilon}")
        _require(0.0 <= self.gae_lambda <= 1.0,
                 f"gae_lambda must be in [0, 1], got {self.gae_lambda}")
        _require(0.0 <= self.gamma < 1.0, f"gamma must be in [0, 1), got {self.gamma}")
        _require(self.epochs_per_update >= 0, "epochs_per_update must be >= 0")
        _require(self.rollout_horizon >= 1, "rollout_horizon must be positive")
        _require(self.minibatch_size >= 1, "minibatch_size must be positive")
        _require(self.value_coef >= 0.0, "value_coef must be >= 0")
        _require(self.entropy_coef >= 0.0, "entropy_coef must be >= 0")
        _require(self.learning_rate > 0.0, "learning_rate must be positive")
        _require(self.hidden_dim >= 1, "hidden_dim must be positive")
