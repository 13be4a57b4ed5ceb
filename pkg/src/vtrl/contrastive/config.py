"""Hyperparameters for the multimodal contrastive learner."""

from __future__ import annotations

from dataclasses import dataclass, field

from vtrl.errors import ConfigError

# the contrastive weight and temperature differ by algorithm: the
# off-policy learner sees less sample diversity, so it gets a smaller
# weight and a softer temperature
ALGORITHM_DEFAULTS = {
    "sac": {"beta": 0.1, "tau": 0.1},
    "ppo": {"beta": 1.0, "tau": 0.05},
}


@dataclass
class ContrastiveConfig:
    lambda_vv: float = 1.0
    lambda_tt: float = 1.0
    lambda_vt: float = 1.0
    lambda_tv: float = 1.0
    beta: float = 0.1
    tau: float = 0.1
    alpha_ema: float = 0.99
    embed_dim: int = 50
    head_hidden: int = 128
    crop_size: int = 56

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        for name in ("lambda_vv", "lambda_tt", "lambda_vt", "lambda_tv", "beta"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")
        if self.tau <= 0:
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if not 0.0 <= self.alpha_ema <= 1.0:
            raise ConfigError(f"alpha_ema must lie in [0, 1], got {self.alpha_ema}")
        if self.embed_dim < 1 or self.head_hidden < 1:
            raise ConfigError("embed_dim and head_hidden must be positive")
        if self.crop_size < 1:
            raise ConfigError(f"crop_size must be positive, got {self.crop_size}")

    @property
    def lambdas(self):
        return (self.lambda_vv, self.lambda_tt, self.lambda_vt, self.lambda_tv)

    @classmethod
    def for_algorithm(cls, algorithm: str, **overrides) -> "ContrastiveConfig":
        if algorithm not in ALGORITHM_DEFAULTS:
            raise ConfigError(f"unknown algorithm {algorithm!r}")
        kw = dict(ALGORITHM_DEFAULTS[algorithm])
        kw.update(overrides)
        return cls(**kw)
