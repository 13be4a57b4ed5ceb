"""Planar pushing task: drive a block along a waypoint path with a round pusher.

Physics is quasi-static: whenever the pusher overlaps the block, the
block translates out of penetration along the center-to-center normal.
The tactile image reports the overlap at the moment of contact, before
that resolution, since the resolved geometry is back to touching.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vtrl.errors import ContractError
from vtrl.sim.base import Observation, StepResult, clip_action
from vtrl.sim.raster import (
    blur3,
    disc_mask,
    finalize,
    paint,
    paint_field,
    pixel_grid,
    segment_mask,
)

ARENA = 1.0


@dataclass
class PushState:
    pusher: np.ndarray
    block: np.ndarray
    block_orientation: float
    waypoint_index: int
    waypoints: np.ndarray
    steps: int
    contact_depth: float = 0.0


def render_push_tactile(pusher, block, pusher_radius: float, block_radius: float,
                        size: int) -> np.ndarray:
    """Imprint of the pusher-block overlap in the pusher's local window.

    All-zero exactly when the discs do not overlap; otherwise the
    deepest-penetration pixel is always lit, so arbitrarily shallow
    contact still registers.
    """
    w = 1.3 * pusher_radius
    x, y = pixel_grid(size, -w, w)
    px = x + pusher[0]
    py = y + pusher[1]
    d_pusher = np.hypot(px - pusher[0], py - pusher[1])
    d_block = np.hypot(px - block[0], py - block[1])
    pen = np.minimum(pusher_radius - d_pusher, block_radius - d_block)
    scale = min(pusher_radius, block_radius)
    buf = np.where(pen > 0.0, 40.0 + 215.0 * np.clip(pen / scale, 0.0, 1.0), 0.0)
    gap = np.hypot(*(np.asarray(block) - np.asarray(pusher)))
    depth = pusher_radius + block_radius - gap
    if depth > 0.0 and gap > 1e-12:
        n = (np.asarray(block) - np.asarray(pusher)) / gap
        deepest = np.asarray(pusher) + (pusher_radius - 0.5 * depth) * n
        col = int(np.clip((deepest[0] - (pusher[0] - w)) / (2.0 * w) * size, 0, size - 1))
        row = int(np.clip((deepest[1] - (pusher[1] - w)) / (2.0 * w) * size, 0, size - 1))
        buf[row, col] = max(buf[row, col], 40.0)
    return finalize(blur3(buf))


class PushWorld:
    kind = "push"
    action_dim = 2
    state_dim = 9

    def __init__(self, size: int = 64, horizon: int = 200,
                 max_speed: float = 0.02, pusher_radius: float = 0.05,
                 block_radius: float = 0.06, capture_radius: float = 0.08,
                 n_waypoints: int = 4):
        self.size = size
        self.horizon = horizon
        self.max_speed = max_speed
        self.pusher_radius = pusher_radius
        self.block_radius = block_radius
        self.capture_radius = capture_radius
        self.n_waypoints = n_waypoints
        self.state: PushState | None = None
        self._done = True

    def reset(self, seed: int) -> Observation:
        rng = np.random.default_rng(seed)
        block = rng.uniform(0.3, 0.7, size=2)
        orientation = rng.uniform(0.0, 2.0 * math.pi)
        waypoints = []
        angle = rng.uniform(0.0, 2.0 * math.pi)
        point = np.clip(block + 0.15 * np.array([math.cos(angle), math.sin(angle)]),
                        0.12, 0.88)
        waypoints.append(point)
        for _ in range(self.n_waypoints - 1):
            angle = rng.uniform(0.0, 2.0 * math.pi)
            point = np.clip(point + 0.2 * np.array([math.cos(angle), math.sin(angle)]),
                            0.12, 0.88)
            waypoints.append(point)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        gap = rng.uniform(0.18, 0.3)
        pusher = np.clip(block + gap * np.array([math.cos(angle), math.sin(angle)]),
                         self.pusher_radius + 0.02,
                         ARENA - self.pusher_radius - 0.02)
        self.state = PushState(pusher=pusher, block=block,
                               block_orientation=orientation, waypoint_index=0,
                               waypoints=np.asarray(waypoints), steps=0)
        self._done = False
        return self._observe(self.state.block)

    def step(self, action) -> StepResult:
        if self._done or self.state is None:
            raise ContractError("step called on a finished episode; reset first")
        a = clip_action(action)
        s = self.state
        s.pusher = np.clip(s.pusher + a * self.max_speed,
                           self.pusher_radius, ARENA - self.pusher_radius)
        block_at_contact = s.block.copy()
        delta = s.block - s.pusher
        gap = float(np.hypot(*delta))
        depth = self.pusher_radius + self.block_radius - gap
        if depth > 0.0 and gap > 1e-12:
            normal = delta / gap
            s.block = np.clip(s.block + depth * normal,
                              self.block_radius, ARENA - self.block_radius)
            s.block_orientation += 2.0 * depth * (normal[0] * a[1] - normal[1] * a[0])
        s.contact_depth = max(depth, 0.0)
        target = s.waypoints[s.waypoint_index]
        distance = float(np.hypot(*(s.block - target)))
        reward = -distance / math.sqrt(2.0)
        while (s.waypoint_index < len(s.waypoints) - 1
               and np.hypot(*(s.block - s.waypoints[s.waypoint_index]))
               <= self.capture_radius):
            s.waypoint_index += 1
        s.steps += 1
        self._done = s.steps >= self.horizon
        obs = self._observe(block_at_contact)
        info = {
            "contact": depth > 0.0,
            "contact_depth": s.contact_depth,
            "block_waypoint_distance": distance,
            "waypoint_index": s.waypoint_index,
        }
        return StepResult(observation=obs, reward=reward, done=self._done, info=info)

    def _observe(self, block_at_contact: np.ndarray) -> Observation:
        s = self.state
        tactile = render_push_tactile(s.pusher, block_at_contact,
                                      self.pusher_radius, self.block_radius,
                                      self.size)
        return Observation(visual=self._render_visual(), tactile=tactile,
                           state=self._state_vector())

    def _render_visual(self) -> np.ndarray:
        s = self.state
        x, y = pixel_grid(self.size, 0.0, ARENA)
        buf = np.zeros((self.size, self.size))
        for i in range(len(s.waypoints) - 1):
            paint(buf, segment_mask(x, y, s.waypoints[i], s.waypoints[i + 1], 0.008), 70)
        paint(buf, disc_mask(x, y, s.waypoints[s.waypoint_index], 0.025), 150)
        paint(buf, disc_mask(x, y, s.block, self.block_radius), 200)
        tick_end = s.block + self.block_radius * np.array(
            [math.cos(s.block_orientation), math.sin(s.block_orientation)])
        paint(buf, segment_mask(x, y, s.block, tick_end, 0.01), 240)
        paint(buf, disc_mask(x, y, s.pusher, self.pusher_radius), 255)
        return finalize(buf)

    def _state_vector(self) -> np.ndarray:
        s = self.state
        target = s.waypoints[s.waypoint_index]
        return np.array([
            s.pusher[0], s.pusher[1], s.block[0], s.block[1],
            target[0], target[1],
            math.cos(s.block_orientation), math.sin(s.block_orientation),
            s.contact_depth,
        ])
