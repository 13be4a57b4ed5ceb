"""Shared observation and step-result types for the environments."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.errors import DimensionError


@dataclass
class Observation:
    """Paired same-timestep views: camera image, touch imprint, true state."""

    visual: np.ndarray
    tactile: np.ndarray
    state: np.ndarray

    def __post_init__(self):
        if self.visual.shape != self.tactile.shape or self.visual.ndim != 2:
            raise DimensionError(
                f"visual {self.visual.shape} and tactile {self.tactile.shape} "
                "must be equal 2D shapes")
        if self.visual.dtype != np.uint8 or self.tactile.dtype != np.uint8:
            raise DimensionError("images must be uint8")


@dataclass
class StepResult:
    observation: Observation
    reward: float
    done: bool
    info: dict


def clip_action(action) -> np.ndarray:
    arr = np.asarray(action, dtype=np.float64).reshape(-1)
    if arr.shape != (2,):
        raise DimensionError(f"action must be a 2-vector, got shape {np.asarray(action).shape}")
    return np.clip(arr, -1.0, 1.0)


def stack_observations(observations) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batch arrays (visual, tactile, state) from a sequence of Observations."""
    visual = np.stack([o.visual for o in observations])
    tactile = np.stack([o.tactile for o in observations])
    state = np.stack([o.state for o in observations])
    return visual, tactile, state
