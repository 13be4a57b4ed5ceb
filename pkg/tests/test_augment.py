"""Crop augmentation contracts."""

import numpy as np
import pytest

from vtrl.errors import ConfigError, DimensionError
from vtrl.contrastive import augment_pair, augment_views, center_crop, crop_batch


def test_full_size_crop_is_identity_over_255():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(3, 8, 8), dtype=np.uint8)
    view = augment_views(img, img, 8, rng)
    assert np.array_equal(view.visual, img.astype(np.float64) / 255.0)
    assert np.array_equal(view.visual_offsets, np.zeros((3, 2), dtype=np.int64))


def test_constant_image_is_constant_after_any_crop():
    img = np.full((2, 10, 10), 128, dtype=np.uint8)
    view = augment_views(img, img, 6, np.random.default_rng(3))
    assert np.all(view.visual == 128 / 255.0)
    assert np.all(view.tactile == 128 / 255.0)


def test_fixed_seed_reproduces_offsets():
    rng_a = np.random.default_rng(42)
    rng_b = np.random.default_rng(42)
    img = np.random.default_rng(1).integers(0, 256, (5, 12, 12), dtype=np.uint8)
    pa = augment_pair(img, img, 9, rng_a)
    pb = augment_pair(img, img, 9, rng_b)
    for view_a, view_b in ((pa.query_view, pb.query_view), (pa.key_view, pb.key_view)):
        assert np.array_equal(view_a.visual_offsets, view_b.visual_offsets)
        assert np.array_equal(view_a.tactile_offsets, view_b.tactile_offsets)
        assert np.array_equal(view_a.visual, view_b.visual)


def test_crop_matches_manual_slice():
    img = np.arange(2 * 7 * 7, dtype=np.uint8).reshape(2, 7, 7)
    offsets = np.array([[1, 2], [3, 0]])
    out = crop_batch(img, offsets, 4)
    assert np.array_equal(out[0], img[0, 1:5, 2:6] / 255.0)
    assert np.array_equal(out[1], img[1, 3:7, 0:4] / 255.0)


def test_pair_views_sized_and_bounded():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, (4, 11, 11), dtype=np.uint8)
    pair = augment_pair(img, img, 7, rng)
    for view in (pair.query_view, pair.key_view):
        assert view.visual.shape == (4, 7, 7)
        assert view.tactile.shape == (4, 7, 7)
        assert view.visual.min() >= 0.0 and view.visual.max() <= 1.0


def test_query_and_key_crops_differ_in_general():
    rng = np.random.default_rng(9)
    img = rng.integers(0, 256, (8, 20, 20), dtype=np.uint8)
    pair = augment_pair(img, img, 8, rng)
    assert not np.array_equal(pair.query_view.visual_offsets,
                              pair.key_view.visual_offsets)


def test_center_crop_is_deterministic_middle_window():
    img = np.arange(6 * 6, dtype=np.uint8).reshape(1, 6, 6)
    out = center_crop(img, 4)
    assert np.array_equal(out[0], img[0, 1:5, 1:5] / 255.0)


def test_oversized_crop_rejected():
    img = np.zeros((2, 6, 6), dtype=np.uint8)
    with pytest.raises(ConfigError):
        augment_views(img, img, 7, np.random.default_rng(0))
    with pytest.raises(DimensionError):
        crop_batch(img, np.zeros((3, 2), dtype=np.int64), 4)
    with pytest.raises(ConfigError):
        crop_batch(img, np.full((2, 2), 5, dtype=np.int64), 4)
