"""Tiny software rasterizer for the 2D environments.

Everything draws into float intensity buffers via np.maximum, so draw
order never darkens earlier shapes; `finalize` rounds into uint8.
Coordinates: a size-S buffer covers a square window of the world, pixel
(i, j) sampling the point at row i (y axis) and column j (x axis), each
offset half a pixel to the cell center.
"""

from __future__ import annotations

import numpy as np


def pixel_grid(size: int, low: float, high: float) -> tuple[np.ndarray, np.ndarray]:
    """World coordinates (X, Y) of pixel centers for a square window."""
    span = (np.arange(size) + 0.5) * (high - low) / size + low
    x = np.broadcast_to(span[None, :], (size, size))
    y = np.broadcast_to(span[:, None], (size, size))
    return x, y


def paint(buf: np.ndarray, mask: np.ndarray, intensity: float) -> None:
    np.maximum(buf, np.where(mask, float(intensity), 0.0), out=buf)


def paint_field(buf: np.ndarray, field: np.ndarray) -> None:
    np.maximum(buf, field, out=buf)


def disc_mask(x: np.ndarray, y: np.ndarray, center, radius: float) -> np.ndarray:
    dx = x - center[0]
    dy = y - center[1]
    return dx * dx + dy * dy <= radius * radius


def segment_mask(x: np.ndarray, y: np.ndarray, a, b, half_thickness: float) -> np.ndarray:
    """Pixels within half_thickness of the segment from a to b."""
    ax, ay = float(a[0]), float(a[1])
    bx, by = float(b[0]), float(b[1])
    dx, dy = bx - ax, by - ay
    length_sq = dx * dx + dy * dy
    if length_sq == 0.0:
        return disc_mask(x, y, (ax, ay), half_thickness)
    t = np.clip(((x - ax) * dx + (y - ay) * dy) / length_sq, 0.0, 1.0)
    px = ax + t * dx
    py = ay + t * dy
    return (x - px) ** 2 + (y - py) ** 2 <= half_thickness * half_thickness


def halfplane_field(x: np.ndarray, y: np.ndarray, anchor, normal) -> np.ndarray:
    """Signed distance to the line through anchor; positive along normal."""
    return (x - anchor[0]) * normal[0] + (y - anchor[1]) * normal[1]


def blur3(buf: np.ndarray) -> np.ndarray:
    """Separable [1,2,1]/4 blur with zero padding; zeros stay zeros."""
    p = np.pad(buf, ((0, 0), (1, 1)))
    h = (p[:, :-2] + 2.0 * p[:, 1:-1] + p[:, 2:]) * 0.25
    p = np.pad(h, ((1, 1), (0, 0)))
    return (p[:-2, :] + 2.0 * p[1:-1, :] + p[2:, :]) * 0.25


def finalize(buf: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(buf), 0, 255).astype(np.uint8)
