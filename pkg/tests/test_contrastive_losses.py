"""Combined-loss algebra, dataflow zeros, and the full-pipeline gradient check."""

import numpy as np
import pytest

from vtrl.contrastive import (
    ContrastiveConfig,
    RepresentationModel,
    augment_pair,
    augment_views,
    combined_loss,
    compute_keys,
    contrastive_terms,
    inter_loss,
    intra_loss,
)
from vtrl.numerics import constant, grad_check, grad_eval, mul, zero_grads


def make_model(seed=0, **kw):
    cfg = dict(crop_size=9, embed_dim=6, head_hidden=8)
    cfg.update(kw)
    return RepresentationModel.create(np.random.default_rng(seed),
                                      ContrastiveConfig(**cfg))


def make_pair(model, seed=1, batch=4, image=12):
    rng = np.random.default_rng(seed)
    vis = rng.integers(0, 256, size=(batch, image, image), dtype=np.uint8)
    tac = rng.integers(0, 256, size=(batch, image, image), dtype=np.uint8)
    return augment_pair(vis, tac, model.config.crop_size, rng)


def test_sum_identity_with_uniform_weights():
    model = make_model()
    pair = make_pair(model)
    total, comps = combined_loss(model, pair)
    parts = (
        intra_loss(model, pair, "visual"),
        intra_loss(model, pair, "tactile"),
        inter_loss(model, pair, "vt"),
        inter_loss(model, pair, "tv"),
    )
    hand_sum = sum(float(t.data) for t in parts)
    assert abs(float(total.data) - hand_sum) < 1e-9
    for tag, term in zip(("vv", "tt", "vt", "tv"), parts, strict=True):
        assert comps[f"loss_{tag}"] == pytest.approx(float(term.data), abs=1e-12)
    assert comps["loss_mm"] == pytest.approx(float(total.data), abs=1e-12)


def test_intra_only_weights_leave_inter_heads_untouched():
    model = make_model()
    pair = make_pair(model)
    cfg = ContrastiveConfig(crop_size=9, embed_dim=6, head_hidden=8,
                            lambda_vt=0.0, lambda_tv=0.0)
    loss, comps = combined_loss(model, pair, cfg)
    zero_grads(model.all_parameters())
    grad_eval(loss)
    for p in model.head_vt.parameters() + model.head_tv.parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))
    for p in model.head_vv.parameters() + model.head_tt.parameters():
        assert np.abs(p.grad).sum() > 0
    assert comps["loss_vt"] == 0.0 and comps["loss_tv"] == 0.0


def test_inter_only_weights_leave_intra_heads_untouched():
    model = make_model()
    pair = make_pair(model)
    cfg = ContrastiveConfig(crop_size=9, embed_dim=6, head_hidden=8,
                            lambda_vv=0.0, lambda_tt=0.0)
    loss, _ = combined_loss(model, pair, cfg)
    zero_grads(model.all_parameters())
    grad_eval(loss)
    for p in model.head_vv.parameters() + model.head_tt.parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))
    for p in model.head_vt.parameters() + model.head_tv.parameters():
        assert np.abs(p.grad).sum() > 0


def test_all_zero_weights_short_circuit():
    model = make_model()
    pair = make_pair(model)
    cfg = ContrastiveConfig(crop_size=9, embed_dim=6, head_hidden=8,
                            lambda_vv=0.0, lambda_tt=0.0,
                            lambda_vt=0.0, lambda_tv=0.0)
    loss, comps = combined_loss(model, pair, cfg)
    assert float(loss.data) == 0.0
    assert all(v == 0.0 for v in comps.values())
    zero_grads(model.all_parameters())
    grad_eval(mul(loss, constant(np.asarray(1.0))))
    for p in model.all_parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))


def test_loss_is_linear_in_each_weight():
    model = make_model()
    pair = make_pair(model)
    solo = ContrastiveConfig(crop_size=9, embed_dim=6, head_hidden=8,
                             lambda_vv=2.0, lambda_tt=0.0,
                             lambda_vt=0.0, lambda_tv=0.0)
    loss, comps = combined_loss(model, pair, solo)
    assert float(loss.data) == 2.0 * comps["loss_vv"]

    base, comps1 = combined_loss(model, pair)
    bumped_cfg = ContrastiveConfig(crop_size=9, embed_dim=6, head_hidden=8,
                                   lambda_vv=2.0)
    bumped, comps2 = combined_loss(model, pair, bumped_cfg)
    assert float(bumped.data) - float(base.data) == pytest.approx(
        comps1["loss_vv"], abs=1e-12)
    assert comps1["loss_vv"] == comps2["loss_vv"]


def test_intra_loss_touches_only_its_modality_encoder():
    model = make_model()
    pair = make_pair(model)
    loss = intra_loss(model, pair, "visual")
    zero_grads(model.all_parameters())
    grad_eval(loss)
    for p in model.online_tactile.parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))
    assert any(np.abs(p.grad).sum() > 0 for p in model.online_visual.parameters())


def test_inter_loss_dataflow_zeros():
    model = make_model()
    pair = make_pair(model)
    loss = inter_loss(model, pair, "vt")
    zero_grads(model.all_parameters())
    grad_eval(loss)
    for p in model.head_tt.parameters() + model.head_vv.parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))
    assert any(np.abs(p.grad).sum() > 0 for p in model.head_vt.parameters())
    # keys are detached, so the tv head used on the key path stays clean too
    for p in model.head_tv.parameters():
        assert np.array_equal(p.grad, np.zeros_like(p.grad))


def test_self_agreement_scores_below_shuffled_pairing():
    model = make_model(seed=3)
    rng = np.random.default_rng(6)
    vis = rng.integers(0, 256, size=(6, 9, 9), dtype=np.uint8)
    tac = rng.integers(0, 256, size=(6, 9, 9), dtype=np.uint8)
    # crop_size == image size makes both views the same image, and a
    # fresh model's momentum branch equals its online branch
    aligned = augment_pair(vis, tac, 9, np.random.default_rng(0))
    matched = float(intra_loss(model, aligned, "visual").data)
    perm = np.array([1, 2, 3, 4, 5, 0])
    shuffled = augment_pair(vis, tac, 9, np.random.default_rng(0))
    shuffled.key_view.visual = shuffled.key_view.visual[perm]
    mismatched = float(intra_loss(model, shuffled, "visual").data)
    assert matched < mismatched


def test_full_pipeline_gradient_check():
    model = make_model(seed=12, crop_size=7, embed_dim=4, head_hidden=6)
    rng = np.random.default_rng(5)
    vis = rng.integers(0, 256, size=(3, 9, 9), dtype=np.uint8)
    tac = rng.integers(0, 256, size=(3, 9, 9), dtype=np.uint8)
    pair = augment_pair(vis, tac, 7, rng)
    cfg = model.config
    keys = compute_keys(model, pair.key_view, cfg.lambdas)

    def loss_fn():
        terms = contrastive_terms(model, pair.query_view, keys, cfg.tau)
        total = None
        for tag in ("vv", "tt", "vt", "tv"):
            total = terms[tag] if total is None else total + terms[tag]
        return total

    report = grad_check(loss_fn, model.parameters(), tolerance=1e-3)
    assert report.passed, report.summary()
