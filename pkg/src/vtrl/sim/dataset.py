"""Frozen (visual, tactile) pair dataset for representation-only work.

Each pair renders one latent pose twice: the scene through the camera
renderer and the touch imprint through the tactile renderer. Poses are
drawn so the sensor always straddles the edge, keeping every imprint
informative. File format: one JSON header line, then raw uint8 pixel
blocks interleaved visual-then-tactile per pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from vtrl.errors import ConfigError, ParseError
from vtrl.sim.edge import edge_frame, render_edge_imprint, render_edge_scene

_HALF_WIDTH = 0.06


@dataclass
class PairDataset:
    visual: np.ndarray
    tactile: np.ndarray
    seed: int
    latents: np.ndarray | None = None

    def __len__(self) -> int:
        return self.visual.shape[0]

    def __getitem__(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        return self.visual[i], self.tactile[i]


def make_latent_pair_dataset(n: int, seed: int, size: int = 64) -> PairDataset:
    """n poses of (edge angle, lateral offset, sensor position), rendered twice."""
    if n < 2:
        raise ConfigError(f"need at least 2 pairs for contrastive use, got {n}")
    rng = np.random.default_rng(seed)
    visual = np.empty((n, size, size), dtype=np.uint8)
    tactile = np.empty((n, size, size), dtype=np.uint8)
    latents = np.empty((n, 4))
    for i in range(n):
        angle = rng.uniform(0.0, 2.0 * math.pi)
        offset = rng.uniform(-0.5, 0.9) * _HALF_WIDTH
        # Narrow position jitter: enough variation that absolute pixel
        # location carries nothing, small enough that 512 samples cover
        # the pose manifold densely.
        sensor = rng.uniform(0.4, 0.6, size=2)
        _, normal = edge_frame(angle)
        anchor = sensor - offset * normal
        visual[i] = render_edge_scene(anchor, angle, sensor, size, _HALF_WIDTH)
        tactile[i] = render_edge_imprint(anchor, angle, sensor, size, _HALF_WIDTH)
        latents[i] = (angle, offset, sensor[0], sensor[1])
    return PairDataset(visual=visual, tactile=tactile, seed=seed, latents=latents)


def save_pair_dataset(dataset: PairDataset, path: str) -> None:
    n = len(dataset)
    height, width = dataset.visual.shape[1:]
    header = json.dumps({"n": n, "height": height, "width": width,
                         "seed": dataset.seed})
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii") + b"\n")
        for i in range(n):
            fh.write(dataset.visual[i].tobytes())
            fh.write(dataset.tactile[i].tobytes())


def load_pair_dataset(path: str) -> PairDataset:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
            n = int(header["n"])
            height = int(header["height"])
            width = int(header["width"])
            seed = int(header["seed"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad pair-dataset header in {path}: {exc}") from exc
        body = fh.read()
    frame = height * width
    expected = n * 2 * frame
    if len(body) != expected:
        raise ParseError(
            f"pair-dataset body in {path} holds {len(body)} bytes, expected {expected}")
    flat = np.frombuffer(body, dtype=np.uint8).reshape(n, 2, height, width)
    return PairDataset(visual=flat[:, 0].copy(), tactile=flat[:, 1].copy(),
                       seed=seed)
