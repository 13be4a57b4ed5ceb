"""Random-crop augmentation for paired image batches.

Crops are drawn as integer offsets from the generator handed in, so a
fixed seed reproduces the exact same views.  Pixel values come in as
uint8 and leave as floats in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.errors import ConfigError, DimensionError
from vtrl.numerics import default_dtype


def _check_batch(images: np.ndarray, label: str) -> np.ndarray:
    arr = np.asarray(images)
    if arr.ndim != 3:
        raise DimensionError(f"{label} batch must be (B, H, W), got shape {arr.shape}")
    return arr


def crop_batch(images: np.ndarray, offsets: np.ndarray, crop_size: int) -> np.ndarray:
    """Crop each image at its own (row, col) offset and scale to [0, 1]."""
    arr = _check_batch(images, "image")
    b, h, w = arr.shape
    if crop_size > h or crop_size > w:
        raise ConfigError(f"crop_size {crop_size} exceeds image size {h}x{w}")
    offsets = np.asarray(offsets, dtype=np.int64)
    if offsets.shape != (b, 2):
        raise DimensionError(f"offsets must be ({b}, 2), got {offsets.shape}")
    if (offsets < 0).any() or (offsets[:, 0] > h - crop_size).any() \
            or (offsets[:, 1] > w - crop_size).any():
        raise ConfigError("crop offsets out of range")
    span = np.arange(crop_size)
    rows = offsets[:, 0, None, None] + span[None, :, None]
    cols = offsets[:, 1, None, None] + span[None, None, :]
    out = arr[np.arange(b)[:, None, None], rows, cols]
    return out.astype(default_dtype()) / 255.0


def random_offsets(rng: np.random.Generator, batch: int, image_size: int,
                   crop_size: int) -> np.ndarray:
    if crop_size > image_size:
        raise ConfigError(f"crop_size {crop_size} exceeds image size {image_size}")
    return rng.integers(0, image_size - crop_size + 1, size=(batch, 2))


def center_crop(images: np.ndarray, crop_size: int) -> np.ndarray:
    """Deterministic crop used at action-selection and evaluation time."""
    arr = _check_batch(images, "image")
    b, h, w = arr.shape
    off = np.tile([[(h - crop_size) // 2, (w - crop_size) // 2]], (b, 1))
    return crop_batch(arr, off, crop_size)


@dataclass
class ViewBatch:
    """One augmented view of each modality, plus the offsets that made it."""

    visual: np.ndarray
    tactile: np.ndarray
    visual_offsets: np.ndarray
    tactile_offsets: np.ndarray


@dataclass
class AugmentedPair:
    query_view: ViewBatch
    key_view: ViewBatch


def augment_views(visual: np.ndarray, tactile: np.ndarray, crop_size: int,
                  rng: np.random.Generator) -> ViewBatch:
    """Independently cropped views of the two modalities."""
    vis = _check_batch(visual, "visual")
    tac = _check_batch(tactile, "tactile")
    if vis.shape[0] != tac.shape[0]:
        raise DimensionError(
            f"batch mismatch: {vis.shape[0]} visual vs {tac.shape[0]} tactile")
    off_v = random_offsets(rng, vis.shape[0], vis.shape[1], crop_size)
    off_t = random_offsets(rng, tac.shape[0], tac.shape[1], crop_size)
    return ViewBatch(
        visual=crop_batch(vis, off_v, crop_size),
        tactile=crop_batch(tac, off_t, crop_size),
        visual_offsets=off_v,
        tactile_offsets=off_t,
    )


def augment_pair(visual: np.ndarray, tactile: np.ndarray, crop_size: int,
                 rng: np.random.Generator,
                 key_rng: np.random.Generator | None = None) -> AugmentedPair:
    """Query and key views of the same underlying batch.

    The query view doubles as the reinforcement-learning input; the key
    view only feeds the momentum branch.  Keeping the key draws on a
    separate generator leaves the query stream untouched when the
    contrastive branch is disabled.
    """
    query = augment_views(visual, tactile, crop_size, rng)
    key = augment_views(visual, tactile, crop_size,
                        rng if key_rng is None else key_rng)
    return AugmentedPair(query_view=query, key_view=key)
