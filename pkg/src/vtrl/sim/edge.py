"""Edge-following task: center a square touch sensor on a raised edge.

The edge is a straight line through an anchor point at a random angle;
one side of it is raised. Reward penalizes the sensor center's lateral
offset from the line. The renderers are module functions so the frozen
pair dataset can reuse them outside an episode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vtrl.errors import ContractError
from vtrl.sim.base import Observation, StepResult, clip_action
from vtrl.sim.raster import (
    blur3,
    finalize,
    halfplane_field,
    paint,
    pixel_grid,
    segment_mask,
)

ARENA = 1.0


def edge_frame(angle: float) -> tuple[np.ndarray, np.ndarray]:
    """Unit tangent along the edge and unit normal toward the raised side."""
    tangent = np.array([math.cos(angle), math.sin(angle)])
    normal = np.array([-math.sin(angle), math.cos(angle)])
    return tangent, normal


def corner_clearance(sensor, anchor, normal, half_width: float) -> float:
    """Largest signed distance of the sensor square's corners to the edge."""
    offset = float((np.asarray(sensor) - np.asarray(anchor)) @ normal)
    return offset + (abs(normal[0]) + abs(normal[1])) * half_width


def render_edge_scene(anchor, angle: float, sensor, size: int,
                      half_width: float) -> np.ndarray:
    """Global view: bright edge line with a thin fringe marking the raised
    side, plus the sensor outline.

    The fringe stays narrow so the scene shares no broad intensity field
    with the imprint; a filled raised side would let raw pixels solve
    the cross-modal pairing.
    """
    x, y = pixel_grid(size, 0.0, ARENA)
    tangent, normal = edge_frame(angle)
    signed = halfplane_field(x, y, anchor, normal)
    along = halfplane_field(x, y, anchor, tangent)
    along_sensor = float((np.asarray(sensor) - np.asarray(anchor)) @ tangent)
    pad = (signed > 0.0) & (signed <= 0.03) & (np.abs(along - along_sensor) <= 0.05)
    buf = np.where(pad, 90.0, 0.0)
    # Stroke half-width tracks the pixel pitch so lines stay solid
    # instead of aliasing into dashes at coarse resolutions.
    stroke = max(0.006, 0.75 * ARENA / size)
    paint(buf, np.abs(signed) <= stroke, 140)
    sx, sy = float(sensor[0]), float(sensor[1])
    h = half_width
    corners = [(sx - h, sy - h), (sx + h, sy - h), (sx + h, sy + h), (sx - h, sy + h)]
    for i in range(4):
        paint(buf, segment_mask(x, y, corners[i], corners[(i + 1) % 4], stroke), 190)
    return finalize(buf)


def render_edge_imprint(anchor, angle: float, sensor, size: int,
                        half_width: float) -> np.ndarray:
    """Sensor-frame imprint of the raised side.

    All-zero exactly when the square does not reach the raised side;
    the deepest pixel is force-lit so corner-sliver contact registers.
    """
    x, y = pixel_grid(size, -half_width, half_width)
    _, normal = edge_frame(angle)
    signed = halfplane_field(x + float(sensor[0]), y + float(sensor[1]),
                             anchor, normal)
    buf = np.where(signed > 0.0,
                   255.0 * np.clip(signed / (2.0 * half_width), 0.0, 1.0),
                   0.0)
    if corner_clearance(sensor, anchor, normal, half_width) > 0.0:
        row, col = np.unravel_index(int(np.argmax(signed)), signed.shape)
        buf[row, col] = max(buf[row, col], 40.0)
    return finalize(blur3(buf))


@dataclass
class EdgeState:
    sensor: np.ndarray
    anchor: np.ndarray
    angle: float
    steps: int


class EdgeFollow:
    kind = "edge"
    action_dim = 2
    state_dim = 6

    def __init__(self, size: int = 64, horizon: int = 200,
                 max_speed: float = 0.02, half_width: float = 0.06):
        self.size = size
        self.horizon = horizon
        self.max_speed = max_speed
        self.half_width = half_width
        self.state: EdgeState | None = None
        self._done = True

    def reset(self, seed: int) -> Observation:
        rng = np.random.default_rng(seed)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        tangent, normal = edge_frame(angle)
        anchor = np.array([0.5, 0.5])
        gap = rng.uniform(0.18, 0.32)
        along = rng.uniform(-0.2, 0.2)
        sensor = anchor - gap * normal + along * tangent
        self.state = EdgeState(sensor=sensor, anchor=anchor, angle=angle, steps=0)
        self._done = False
        return self._observe()

    def step(self, action) -> StepResult:
        if self._done or self.state is None:
            raise ContractError("step called on a finished episode; reset first")
        a = clip_action(action)
        s = self.state
        s.sensor = np.clip(s.sensor + a * self.max_speed,
                           self.half_width, ARENA - self.half_width)
        _, normal = edge_frame(s.angle)
        offset = float((s.sensor - s.anchor) @ normal)
        reward = -abs(offset) / self.half_width
        clearance = corner_clearance(s.sensor, s.anchor, normal, self.half_width)
        s.steps += 1
        self._done = s.steps >= self.horizon
        info = {
            "contact": clearance > 0.0,
            "signed_offset": offset,
            "corner_clearance": clearance,
        }
        return StepResult(observation=self._observe(), reward=reward,
                          done=self._done, info=info)

    def _observe(self) -> Observation:
        s = self.state
        visual = render_edge_scene(s.anchor, s.angle, s.sensor, self.size,
                                   self.half_width)
        tactile = render_edge_imprint(s.anchor, s.angle, s.sensor, self.size,
                                      self.half_width)
        return Observation(visual=visual, tactile=tactile,
                           state=self._state_vector())

    def _state_vector(self) -> np.ndarray:
        s = self.state
        _, normal = edge_frame(s.angle)
        offset = float((s.sensor - s.anchor) @ normal)
        clearance = corner_clearance(s.sensor, s.anchor, normal, self.half_width)
        return np.array([
            s.sensor[0], s.sensor[1],
            math.cos(s.angle), math.sin(s.angle),
            offset / self.half_width, clearance / self.half_width,
        ])
