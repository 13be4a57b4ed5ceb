"""Run configuration: strict JSON schema with defaults.

A config file names the environment, the agent mode, and the training
budget; everything omitted falls back to documented defaults. Unknown
keys are rejected rather than ignored, since a typo like "baat_size"
silently training with the default is the worst failure mode a config
system can have.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from vtrl.contrastive import ContrastiveConfig
from vtrl.errors import ConfigError, ParseError
from vtrl.rl import AgentMode, PPOConfig, SACConfig
from vtrl.sim import ENV_KINDS

DEFAULT_TOTAL_ENV_STEPS = 20_000
DEFAULT_EVAL_EVERY = 2_000
DEFAULT_EVAL_EPISODES = 10
DEFAULT_IMAGE_SIZE = 64
DEFAULT_HORIZON = 200


@dataclass
class RunConfig:
    """Fully resolved description of one training run."""

    env_kind: str
    image_size: int
    env_horizon: int
    env_params: dict
    mode: AgentMode
    contrastive: ContrastiveConfig
    sac: SACConfig | None
    ppo: PPOConfig | None
    total_env_steps: int
    eval_every: int
    eval_episodes: int
    seed: int
    output_dir: str

    def __post_init__(self):
        if self.env_kind not in ENV_KINDS:
            raise ConfigError(
                f"env kind must be one of {ENV_KINDS}, got {self.env_kind!r}")
        if self.image_size < 8:
            raise ConfigError(f"image_size too small: {self.image_size}")
        if self.env_horizon < 1:
            raise ConfigError(f"env_horizon must be positive, got {self.env_horizon}")
        if not isinstance(self.env_params, dict):
            raise ConfigError("env params must be an object")
        if self.mode.uses_pixels and self.contrastive.crop_size > self.image_size:
            raise ConfigError(
                f"crop_size {self.contrastive.crop_size} exceeds "
                f"image_size {self.image_size}")
        if (self.sac is None) == (self.ppo is None):
            raise ConfigError("exactly one of sac/ppo settings must be present")
        if self.mode.algorithm == "sac" and self.sac is None:
            raise ConfigError("algorithm 'sac' requires sac settings, got ppo")
        if self.mode.algorithm == "ppo" and self.ppo is None:
            raise ConfigError("algorithm 'ppo' requires ppo settings, got sac")
        if self.total_env_steps < 0:
            raise ConfigError(
                f"total_env_steps must be >= 0, got {self.total_env_steps}")
        if self.eval_every < 1:
            raise ConfigError(f"eval_every must be positive, got {self.eval_every}")
        if self.eval_episodes < 1:
            raise ConfigError(
                f"eval_episodes must be positive, got {self.eval_episodes}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if not isinstance(self.output_dir, str) or not self.output_dir:
            raise ConfigError("output_dir must be a non-empty string")

    @property
    def algo_config(self):
        return self.sac if self.mode.algorithm == "sac" else self.ppo

    def label(self) -> str:
        return f"{self.mode.algorithm}-{self.mode.representation}-{self.mode.modalities}"


_TOP_LEVEL_KEYS = {
    "env", "algorithm", "representation", "modalities", "contrastive",
    "sac", "ppo", "total_env_steps", "eval_every", "eval_episodes",
    "seed", "output_dir",
}


def _require_int(data: dict, key: str, default: int) -> int:
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"field {key!r} must be an integer, got {value!r}")
    return value


def _require_str(data: dict, key: str, default: str) -> str:
    value = data.get(key, default)
    if not isinstance(value, str):
        raise ParseError(f"field {key!r} must be a string, got {value!r}")
    return value


def _build_section(cls, data: dict, section: str):
    """Instantiate a config dataclass from a JSON object, strictly."""
    if not isinstance(data, dict):
        raise ParseError(f"section {section!r} must be an object, got {data!r}")
    allowed = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ParseError(
            f"unknown key(s) in {section!r}: {', '.join(unknown)}")
    try:
        return cls(**data)
    except (ConfigError, TypeError) as exc:
        raise ParseError(f"invalid {section!r} section: {exc}") from exc


def _parse_env(data: dict) -> tuple[str, int, int, dict]:
    env = data.get("env", "push")
    if isinstance(env, str):
        return env, DEFAULT_IMAGE_SIZE, DEFAULT_HORIZON, {}
    if not isinstance(env, dict):
        raise ParseError(f"field 'env' must be a string or object, got {env!r}")
    unknown = sorted(set(env) - {"kind", "size", "horizon", "params"})
    if unknown:
        raise ParseError(f"unknown key(s) in 'env': {', '.join(unknown)}")
    kind = env.get("kind", "push")
    if not isinstance(kind, str):
        raise ParseError(f"field 'env.kind' must be a string, got {kind!r}")
    size = _require_int(env, "size", DEFAULT_IMAGE_SIZE)
    horizon = _require_int(env, "horizon", DEFAULT_HORIZON)
    params = env.get("params", {})
    if not isinstance(params, dict):
        raise ParseError(f"field 'env.params' must be an object, got {params!r}")
    return kind, size, horizon, params


def config_from_dict(data: dict) -> RunConfig:
    """Validate a JSON-shaped dict and fill in every default."""
    if not isinstance(data, dict):
        raise ParseError(f"config root must be an object, got {type(data).__name__}")
    unknown = sorted(set(data) - _TOP_LEVEL_KEYS)
    if unknown:
        raise ParseError(f"unknown config key(s): {', '.join(unknown)}")

    algorithm = data.get("algorithm")
    if not isinstance(algorithm, str):
        raise ParseError("field 'algorithm' is required and must be a string")

    env_kind, image_size, env_horizon, env_params = _parse_env(data)
    try:
        mode = AgentMode(
            algorithm=algorithm,
            representation=_require_str(data, "representation", "m2curl"),
            modalities=_require_str(data, "modalities", "both"),
        )
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc

    contrastive_data = data.get("contrastive", {})
    if not isinstance(contrastive_data, dict):
        raise ParseError("section 'contrastive' must be an object")
    allowed = {f.name for f in dataclasses.fields(ContrastiveConfig)}
    unknown = sorted(set(contrastive_data) - allowed)
    if unknown:
        raise ParseError(f"unknown key(s) in 'contrastive': {', '.join(unknown)}")
    try:
        contrastive = ContrastiveConfig.for_algorithm(algorithm, **contrastive_data)
    except (ConfigError, TypeError) as exc:
        raise ParseError(f"invalid 'contrastive' section: {exc}") from exc

    if "sac" in data and algorithm != "sac":
        raise ParseError("'sac' settings given but algorithm is not 'sac'")
    if "ppo" in data and algorithm != "ppo":
        raise ParseError("'ppo' settings given but algorithm is not 'ppo'")
    sac = ppo = None
    if algorithm == "sac":
        sac = _build_section(SACConfig, data.get("sac", {}), "sac")
    else:
        ppo = _build_section(PPOConfig, data.get("ppo", {}), "ppo")

    try:
        return RunConfig(
            env_kind=env_kind,
            image_size=image_size,
            env_horizon=env_horizon,
            env_params=env_params,
            mode=mode,
            contrastive=contrastive,
            sac=sac,
            ppo=ppo,
            total_env_steps=_require_int(data, "total_env_steps",
                                         DEFAULT_TOTAL_ENV_STEPS),
            eval_every=_require_int(data, "eval_every", DEFAULT_EVAL_EVERY),
            eval_episodes=_require_int(data, "eval_episodes",
                                       DEFAULT_EVAL_EPISODES),
            seed=_require_int(data, "seed", 0),
            output_dir=_require_str(data, "output_dir", "runs/run"),
        )
    except ConfigError as exc:
        raise ParseError(str(exc)) from exc


def parse_config(path) -> RunConfig:
    """Read and validate a JSON config file."""
    path = Path(path)
    if not path.is_file():
        raise ParseError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


def serialize_config(cfg: RunConfig) -> dict:
    """Inverse of config_from_dict, with every default made explicit."""
    data = {
        "env": {"kind": cfg.env_kind, "size": cfg.image_size,
                "horizon": cfg.env_horizon, "params": dict(cfg.env_params)},
        "algorithm": cfg.mode.algorithm,
        "representation": cfg.mode.representation,
        "modalities": cfg.mode.modalities,
        "contrastive": dataclasses.asdict(cfg.contrastive),
        "total_env_steps": cfg.total_env_steps,
        "eval_every": cfg.eval_every,
        "eval_episodes": cfg.eval_episodes,
        "seed": cfg.seed,
        "output_dir": cfg.output_dir,
    }
    if cfg.sac is not None:
        data["sac"] = dataclasses.asdict(cfg.sac)
    else:
        data["ppo"] = dataclasses.asdict(cfg.ppo)
    return data


def write_config(cfg: RunConfig, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(serialize_config(cfg), f, indent=1, sort_keys=True)
        f.write("\n")
