"""Experience storage: an off-policy ring buffer and an on-policy rollout.

Both store raw uint8 observations; cropping and normalization happen at
sample time so one stored transition can serve many augmented views.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vtrl.errors import ContractError
from vtrl.sim.base import Observation


@dataclass
class Transition:
    observation: Observation
    action: np.ndarray
    reward: float
    next_observation: Observation
    done: bool

    def __post_init__(self):
        self.action = np.asarray(self.action, dtype=float).reshape(-1)
        if np.any(np.abs(self.action) > 1.0 + 1e-12):
            raise ContractError(
                f"transition action outside [-1, 1]: {self.action}")
        if self.reward > 0.0:
            raise ContractError(
                f"positive reward {self.reward} violates the task contract")


@dataclass
class Batch:
    """Collated transitions, observations still raw uint8."""

    visual: np.ndarray
    tactile: np.ndarray
    state: np.ndarray
    action: np.ndarray
    reward: np.ndarray
    next_visual: np.ndarray
    next_tactile: np.ndarray
    next_state: np.ndarray
    done: np.ndarray

    def __len__(self) -> int:
        return self.action.shape[0]


def collate(transitions) -> Batch:
    obs = [t.observation for t in transitions]
    nxt = [t.next_observation for t in transitions]
    return Batch(
        visual=np.stack([o.visual for o in obs]),
        tactile=np.stack([o.tactile for o in obs]),
        state=np.stack([o.state for o in obs]),
        action=np.stack([t.action for t in transitions]),
        reward=np.array([t.reward for t in transitions], dtype=float),
        next_visual=np.stack([o.visual for o in nxt]),
        next_tactile=np.stack([o.tactile for o in nxt]),
        next_state=np.stack([o.state for o in nxt]),
        done=np.array([float(t.done) for t in transitions]),
    )


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions."""

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ContractError(f"replay capacity must be positive, got {capacity}")
        self.capacity = int(capacity)
        self.storage: list = []
        self._cursor = 0

    @property
    def count(self) -> int:
        return len(self.storage)

    def __len__(self) -> int:
        return self.count

    def push(self, transition: Transition) -> None:
        if self.count < self.capacity:
            self.storage.append(transition)
        else:
            self.storage[self._cursor] = transition
        self._cursor = (self._cursor + 1) % self.capacity

    def sample(self, batch_size: int, rng: np.random.Generator) -> Batch:
        if batch_size > self.count:
            raise ContractError(
                f"cannot sample {batch_size} transitions from a buffer "
                f"holding {self.count}")
        idx = rng.integers(0, self.count, size=batch_size)
        return collate([self.storage[i] for i in idx])


def buffer_push(buffer: ReplayBuffer, transition: Transition) -> None:
    buffer.push(transition)


def buffer_sample(buffer: ReplayBuffer, batch_size: int,
                  rng: np.random.Generator) -> Batch:
    return buffer.sample(batch_size, rng)


@dataclass
class RolloutBuffer:
    """On-policy storage for one collection phase.

    Alongside the raw observation we keep the processed (cropped,
    normalized) network input that produced the stored log_prob, so the
    first optimization pass can reproduce the collection-time ratio of
    exactly one.
    """

    observations: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    log_probs: list = field(default_factory=list)
    values: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    dones: list = field(default_factory=list)
    proc_visual: list = field(default_factory=list)
    proc_tactile: list = field(default_factory=list)
    bootstrap_value: float = 0.0

    def add(self, observation: Observation, action, log_prob: float,
            value: float, reward: float, done: bool,
            proc_visual=None, proc_tactile=None) -> None:
        self.observations.append(observation)
        self.actions.append(np.asarray(action, dtype=float).reshape(-1))
        self.log_probs.append(float(log_prob))
        self.values.append(float(value))
        self.rewards.append(float(reward))
        self.dones.append(float(done))
        self.proc_visual.append(proc_visual)
        self.proc_tactile.append(proc_tactile)

    def __len__(self) -> int:
        return len(self.rewards)

    def clear(self) -> None:
        for name in ("observations", "actions", "log_probs", "values",
                     "rewards", "dones", "proc_visual", "proc_tactile"):
            getattr(self, name).clear()
        self.bootstrap_value = 0.0
