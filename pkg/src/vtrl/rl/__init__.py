from vtrl.rl.buffers import (
    Batch,
    ReplayBuffer,
    RolloutBuffer,
    Transition,
    buffer_push,
    buffer_sample,
    collate,
)
from vtrl.rl.config import AgentMode, PPOConfig, SACConfig
from vtrl.rl.critics import (
    TwinCritics,
    polyak_update,
    q_value,
    sync_critic_encoder,
)
from vtrl.rl.losses import (
    PPOBatch,
    SACFeatureBatch,
    gae_advantages,
    normalize_advantages,
    ppo_clip_loss,
    sac_actor_loss,
    sac_critic_loss,
)
from vtrl.rl.policy import (
    GaussianPolicy,
    act,
    entropy,
    gaussian_log_prob,
    log_prob_of,
    sample_actions,
    softplus,
    tanh_log_det,
)
from vtrl.rl.agent import (
    PPOAgent,
    SACAgent,
    make_agent,
    ppo_update,
    sac_update,
)

__all__ = [
    "AgentMode",
    "Batch",
    "GaussianPolicy",
    "PPOAgent",
    "PPOBatch",
    "PPOConfig",
    "ReplayBuffer",
    "RolloutBuffer",
    "SACAgent",
    "SACConfig",
    "SACFeatureBatch",
    "Transition",
    "TwinCritics",
    "act",
    "buffer_push",
    "buffer_sample",
    "collate",
    "entropy",
    "gae_advantages",
    "gaussian_log_prob",
    "log_prob_of",
    "make_agent",
    "normalize_advantages",
    "polyak_update",
    "ppo_clip_loss",
    "ppo_update",
    "q_value",
    "sac_actor_loss",
    "sac_critic_loss",
    "sac_update",
    "sample_actions",
    "softplus",
    "sync_critic_encoder",
    "tanh_log_det",
]
