"""EdgeFollow rewards and imprint-contact equivalence."""

import math

import numpy as np
import pytest

from vtrl.errors import ContractError
from vtrl.sim import (
    EdgeFollow,
    corner_clearance,
    edge_frame,
    render_edge_imprint,
)

H = 0.06


def test_same_seed_same_trajectory_bitwise():
    actions = np.random.default_rng(1).uniform(-1, 1, size=(12, 2))
    env_a, env_b = EdgeFollow(size=32, horizon=40), EdgeFollow(size=32, horizon=40)
    obs_a = [env_a.reset(13)]
    obs_b = [env_b.reset(13)]
    for a in actions:
        ra, rb = env_a.step(a), env_b.step(a)
        assert ra.reward == rb.reward and ra.info == rb.info
        obs_a.append(ra.observation)
        obs_b.append(rb.observation)
    for oa, ob in zip(obs_a, obs_b, strict=True):
        assert np.array_equal(oa.visual, ob.visual)
        assert np.array_equal(oa.tactile, ob.tactile)
        assert np.array_equal(oa.state, ob.state)


def test_reset_is_contact_free_and_angles_vary():
    env = EdgeFollow(size=24, horizon=10)
    angles = set()
    for seed in range(40):
        obs = env.reset(seed)
        assert obs.tactile.sum() == 0
        _, normal = edge_frame(env.state.angle)
        assert corner_clearance(env.state.sensor, env.state.anchor, normal, H) < 0
        angles.add(round(env.state.angle, 6))
    assert len(angles) == 40


def test_imprint_nonzero_iff_square_reaches_edge():
    rng = np.random.default_rng(8)
    for _ in range(120):
        angle = rng.uniform(0, 2 * math.pi)
        _, normal = edge_frame(angle)
        offset = rng.uniform(-2.5, 2.5) * H
        sensor = rng.uniform(0.3, 0.7, 2)
        anchor = sensor - offset * normal
        clearance = corner_clearance(sensor, anchor, normal, H)
        img = render_edge_imprint(anchor, angle, sensor, 24, H)
        assert (img.sum() > 0) == (clearance > 0)


def test_corner_sliver_contact_registers():
    angle = 0.0
    _, normal = edge_frame(angle)  # raised side is +y
    sensor = np.array([0.5, 0.5])
    anchor = sensor - (-(abs(normal[0]) + abs(normal[1])) * H + 1e-7) * normal
    assert corner_clearance(sensor, anchor, normal, H) == pytest.approx(1e-7, rel=1e-3)
    img = render_edge_imprint(anchor, angle, sensor, 24, H)
    assert img.sum() > 0


def test_reward_is_negative_scaled_offset():
    env = EdgeFollow(size=24, horizon=30)
    env.reset(3)
    rng = np.random.default_rng(5)
    for _ in range(30):
        res = env.step(rng.uniform(-1, 1, 2))
        _, normal = edge_frame(env.state.angle)
        offset = float((env.state.sensor - env.state.anchor) @ normal)
        assert res.reward == pytest.approx(-abs(offset) / H, abs=1e-12)
        assert res.reward <= 0.0


def test_centered_sensor_scores_zero():
    env = EdgeFollow(size=24, horizon=10)
    env.reset(0)
    env.state.sensor = env.state.anchor.copy()
    res = env.step([0.0, 0.0])
    assert res.reward == 0.0
    assert res.observation.tactile.sum() > 0


def test_horizon_and_refusal_after_done():
    env = EdgeFollow(size=24, horizon=4)
    env.reset(0)
    flags = [env.step([0.0, 0.1]).done for _ in range(4)]
    assert flags == [False, False, False, True]
    with pytest.raises(ContractError):
        env.step([0.0, 0.0])


def test_sensor_clipped_to_arena():
    env = EdgeFollow(size=24, horizon=100)
    env.reset(7)
    for _ in range(100):
        env.step([1.0, 1.0])
        assert H <= env.state.sensor.min() and env.state.sensor.max() <= 1 - H
    assert env.state.sensor[0] == 1 - H


def test_state_vector_encodes_pose():
    env = EdgeFollow(size=24, horizon=10)
    obs = env.reset(21)
    s = env.state
    assert obs.state.shape == (6,)
    assert obs.state[2] == pytest.approx(math.cos(s.angle))
    assert obs.state[3] == pytest.approx(math.sin(s.angle))
