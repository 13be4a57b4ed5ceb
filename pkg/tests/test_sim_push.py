"""PushWorld dynamics, rewards, and tactile-contact equivalence."""

import math

import numpy as np
import pytest

from vtrl.errors import ContractError, DimensionError
from vtrl.sim import PushWorld, render_push_tactile

R_PUSHER = 0.05
R_BLOCK = 0.06


def rollout(env, seed, actions):
    out = [env.reset(seed)]
    results = []
    for a in actions:
        res = env.step(a)
        out.append(res.observation)
        results.append(res)
    return out, results


def test_same_seed_same_trajectory_bitwise():
    actions = np.random.default_rng(0).uniform(-1, 1, size=(15, 2))
    env_a, env_b = PushWorld(size=32, horizon=50), PushWorld(size=32, horizon=50)
    obs_a, res_a = rollout(env_a, 7, actions)
    obs_b, res_b = rollout(env_b, 7, actions)
    for oa, ob in zip(obs_a, obs_b, strict=True):
        assert np.array_equal(oa.visual, ob.visual)
        assert np.array_equal(oa.tactile, ob.tactile)
        assert np.array_equal(oa.state, ob.state)
    for ra, rb in zip(res_a, res_b, strict=True):
        assert ra.reward == rb.reward and ra.done == rb.done
        assert ra.info == rb.info


def test_reset_has_no_contact_across_seeds():
    env = PushWorld(size=24, horizon=10)
    for seed in range(60):
        obs = env.reset(seed)
        s = env.state
        gap = float(np.hypot(*(s.block - s.pusher)))
        assert gap > R_PUSHER + R_BLOCK
        assert obs.tactile.sum() == 0


def test_tactile_nonzero_iff_discs_overlap():
    rng = np.random.default_rng(4)
    touch = R_PUSHER + R_BLOCK
    for _ in range(120):
        pusher = rng.uniform(0.2, 0.8, 2)
        angle = rng.uniform(0, 2 * math.pi)
        gap = rng.uniform(0.2, 1.8) * touch
        block = pusher + gap * np.array([math.cos(angle), math.sin(angle)])
        img = render_push_tactile(pusher, block, R_PUSHER, R_BLOCK, 24)
        assert (img.sum() > 0) == (gap < touch), f"gap {gap} vs touch {touch}"
    # razor-thin contact still registers
    sliver = render_push_tactile((0.5, 0.5), (0.5 + touch - 1e-7, 0.5),
                                 R_PUSHER, R_BLOCK, 24)
    assert sliver.sum() > 0
    apart = render_push_tactile((0.5, 0.5), (0.5 + touch + 1e-7, 0.5),
                                R_PUSHER, R_BLOCK, 24)
    assert apart.sum() == 0


def test_deeper_overlap_reads_brighter():
    sums = []
    for frac in (0.9, 0.6, 0.3):
        block = (0.5 + frac * (R_PUSHER + R_BLOCK), 0.5)
        img = render_push_tactile((0.5, 0.5), block, R_PUSHER, R_BLOCK, 32)
        sums.append(int(img.sum()))
    assert sums[0] < sums[1] < sums[2]


def test_imprint_centroid_tracks_contact_direction():
    # block overlapping from +x: centroid shifted right of window center,
    # symmetric in y; cross-checked against a 4x-resolution oracle
    pusher = np.array([0.5, 0.5])
    block = np.array([0.5 + 0.7 * (R_PUSHER + R_BLOCK), 0.5])
    size = 32
    img = render_push_tactile(pusher, block, R_PUSHER, R_BLOCK, size).astype(float)
    ii, jj = np.indices(img.shape)
    cy = (img * ii).sum() / img.sum()
    cx = (img * jj).sum() / img.sum()

    fine = 128
    w = 1.3 * R_PUSHER
    span = (np.arange(fine) + 0.5) * (2 * w) / fine - w
    x = span[None, :] + pusher[0]
    y = span[:, None] + pusher[1]
    pen = np.minimum(R_PUSHER - np.hypot(x - pusher[0], y - pusher[1]),
                     R_BLOCK - np.hypot(x - block[0], y - block[1]))
    weight = np.where(pen > 0, 40 + 215 * np.clip(pen / R_BLOCK, 0, 1), 0.0)
    oy = (weight * np.indices(weight.shape)[0]).sum() / weight.sum() / fine * size
    ox = (weight * np.indices(weight.shape)[1]).sum() / weight.sum() / fine * size
    assert abs(cx - ox) < 2.0 and abs(cy - oy) < 2.0
    assert cx > size / 2
    assert abs(cy - (size - 1) / 2) < 1.0


def test_null_action_without_contact_keeps_geometry():
    env = PushWorld(size=24, horizon=20)
    env.reset(3)
    block_before = env.state.block.copy()
    first = env.step([0.0, 0.0])
    second = env.step([0.0, 0.0])
    assert np.array_equal(env.state.block, block_before)
    # first waypoint sits exactly 0.15 from the block at reset
    assert first.reward == pytest.approx(-0.15 / math.sqrt(2), abs=1e-12)
    assert second.reward == first.reward


def test_block_on_waypoint_scores_zero():
    env = PushWorld(size=24, horizon=20)
    env.reset(1)
    env.state.block = env.state.waypoints[0].copy()
    env.state.pusher = np.array([0.15, 0.15])
    res = env.step([0.0, 0.0])
    assert res.reward == 0.0


def test_push_from_left_moves_block_right():
    env = PushWorld(size=24, horizon=20)
    env.reset(0)
    env.state.pusher = np.array([0.40, 0.5])
    env.state.block = np.array([0.49, 0.5])
    res = env.step([1.0, 0.0])
    assert env.state.block[0] > 0.49
    assert env.state.block[1] == 0.5
    assert res.info["contact"]
    assert res.observation.tactile.sum() > 0


def test_positions_stay_clipped_and_rewards_nonpositive():
    env = PushWorld(size=24, horizon=120)
    env.reset(9)
    for _ in range(120):
        res = env.step([-1.0, -1.0])
        assert res.reward <= 0.0
        s = env.state
        assert R_PUSHER <= s.pusher.min() and s.pusher.max() <= 1 - R_PUSHER
        assert R_BLOCK <= s.block.min() and s.block.max() <= 1 - R_BLOCK


def test_waypoint_index_never_decreases():
    env = PushWorld(size=24, horizon=80)
    env.reset(5)
    rng = np.random.default_rng(2)
    last = 0
    for _ in range(80):
        res = env.step(rng.uniform(-1, 1, 2))
        assert res.info["waypoint_index"] >= last
        last = res.info["waypoint_index"]


def test_episode_runs_exactly_horizon_then_refuses():
    env = PushWorld(size=24, horizon=5)
    env.reset(0)
    flags = [env.step([0.1, 0.1]).done for _ in range(5)]
    assert flags == [False, False, False, False, True]
    with pytest.raises(ContractError):
        env.step([0.0, 0.0])
    with pytest.raises(ContractError):
        PushWorld(size=24).step([0.0, 0.0])


def test_actions_clipped_and_shape_checked():
    env = PushWorld(size=24, horizon=20)
    env.reset(11)
    before = env.state.pusher.copy()
    env.step([5.0, -5.0])
    moved = env.state.pusher - before
    expected = np.clip(before + np.array([0.02, -0.02]), R_PUSHER, 1 - R_PUSHER) - before
    assert np.allclose(moved, expected, atol=1e-15)
    with pytest.raises(DimensionError):
        env.step([1.0, 0.0, 0.0])


def test_observation_images_are_u8_with_drawn_content():
    env = PushWorld(size=48, horizon=10)
    obs = env.reset(2)
    assert obs.visual.dtype == np.uint8 and obs.tactile.dtype == np.uint8
    assert obs.visual.max() == 255
    assert obs.state.shape == (9,)
