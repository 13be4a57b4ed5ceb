"""Representation-only training on a frozen paired-image dataset.

No policy, no environment stepping: just the contrastive objective on
(visual, tactile) pairs, plus retrieval-based probes of how well the
two modalities line up in code space.
"""

from __future__ import annotations

import numpy as np

from vtrl.errors import ConfigError
from vtrl.numerics import Adam, grad_eval, zero_grads
from vtrl.contrastive.augment import augment_pair, center_crop
from vtrl.contrastive.config import ContrastiveConfig
from vtrl.contrastive.losses import combined_loss
from vtrl.contrastive.model import RepresentationModel, encode, head_apply


def pretrain(visual: np.ndarray, tactile: np.ndarray, config: ContrastiveConfig,
             seed: int, steps: int, batch_size: int,
             learning_rate: float = 1e-3,
             ) -> tuple[RepresentationModel, list[dict[str, float]]]:
    """Train a fresh model on paired images; returns it with the loss trace."""
    visual = np.asarray(visual)
    tactile = np.asarray(tactile)
    n = visual.shape[0]
    if n < 2 or tactile.shape[0] != n:
        raise ConfigError(f"need matched pair arrays with n >= 2, got {visual.shape} / {tactile.shape}")
    if batch_size < 2:
        raise ConfigError(f"batch_size must be at least 2, got {batch_size}")
    streams = np.random.SeedSequence(seed).spawn(4)
    init_rng, batch_rng, aug_rng, key_rng = (np.random.default_rng(s) for s in streams)
    model = RepresentationModel.create(init_rng, config)
    opt = Adam(model.parameters(), learning_rate=learning_rate)
    history: list[dict[str, float]] = []
    for _ in range(steps):
        idx = batch_rng.integers(0, n, size=batch_size)
        pair = augment_pair(visual[idx], tactile[idx], config.crop_size,
                            aug_rng, key_rng)
        loss, components = combined_loss(model, pair, config)
        zero_grads(model.parameters())
        grad_eval(loss)
        opt.step()
        model.momentum_update()
        history.append(components)
    return model, history


def cross_modal_retrieval_accuracy(model: RepresentationModel,
                                   visual: np.ndarray, tactile: np.ndarray,
                                   batch_size: int = 32) -> float:
    """Top-1 accuracy of visual queries against tactile keys.

    Pairs are scored in consecutive blocks of batch_size (chance = 1 /
    batch_size); any remainder that cannot fill a block is dropped.
    Queries use the online visual encoder through the visual->tactile
    head; keys use the momentum tactile encoder through the reverse
    head, mirroring the training pairing.
    """
    n_blocks = visual.shape[0] // batch_size
    if n_blocks == 0:
        raise ConfigError(
            f"need at least {batch_size} held-out pairs, got {visual.shape[0]}")
    crop = model.config.crop_size
    hits = 0
    for b in range(n_blocks):
        sl = slice(b * batch_size, (b + 1) * batch_size)
        q_img = center_crop(np.asarray(visual[sl]), crop)
        k_img = center_crop(np.asarray(tactile[sl]), crop)
        queries = head_apply(model.head_vt, encode(model.online_visual, q_img)).data
        keys = head_apply(model.head_tv, encode(model.momentum_tactile, k_img)).data
        ranks = (queries @ keys.T).argmax(axis=1)
        hits += int((ranks == np.arange(batch_size)).sum())
    return hits / (n_blocks * batch_size)


def pixel_retrieval_accuracy(visual: np.ndarray, tactile: np.ndarray,
                             crop_size: int, batch_size: int = 32) -> float:
    """Same retrieval protocol but on raw normalized pixels (the floor)."""
    n_blocks = visual.shape[0] // batch_size
    if n_blocks == 0:
        raise ConfigError(
            f"need at least {batch_size} held-out pairs, got {visual.shape[0]}")
    hits = 0
    for b in range(n_blocks):
        sl = slice(b * batch_size, (b + 1) * batch_size)
        q = center_crop(np.asarray(visual[sl]), crop_size).reshape(batch_size, -1)
        k = center_crop(np.asarray(tactile[sl]), crop_size).reshape(batch_size, -1)
        q = q / np.maximum(np.linalg.norm(q, axis=1, keepdims=True), 1e-12)
        k = k / np.maximum(np.linalg.norm(k, axis=1, keepdims=True), 1e-12)
        ranks = (q @ k.T).argmax(axis=1)
        hits += int((ranks == np.arange(batch_size)).sum())
    return hits / (n_blocks * batch_size)
