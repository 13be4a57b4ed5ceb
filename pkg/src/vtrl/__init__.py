"""Visuotactile contrastive representation learning fused into SAC and PPO."""

__version__ = "0.1.0"
