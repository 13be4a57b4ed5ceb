"""Strict parsing, default filling, and round-trip of run configs."""

import json

import pytest

from vtrl.errors import ParseError
from vtrl.harness import config_from_dict, parse_config, serialize_config


def test_minimal_config_fills_defaults():
    cfg = config_from_dict({"env": "push", "algorithm": "sac", "seed": 3})
    assert cfg.env_kind == "push"
    assert cfg.image_size == 64
    assert cfg.env_horizon == 200
    assert cfg.env_params == {}
    assert cfg.mode.representation == "m2curl"
    assert cfg.mode.modalities == "both"
    assert cfg.total_env_steps == 20000
    assert cfg.eval_every == 2000
    assert cfg.eval_episodes == 10
    assert cfg.seed == 3
    assert cfg.ppo is None
    assert cfg.sac is not None
    assert cfg.sac.batch_size == 128
    # off-policy contrastive defaults
    assert cfg.contrastive.beta == 0.1
    assert cfg.contrastive.tau == 0.1


def test_ppo_gets_its_own_contrastive_defaults():
    cfg = config_from_dict({"algorithm": "ppo"})
    assert cfg.sac is None
    assert cfg.ppo.clip_epsilon == 0.2
    assert cfg.contrastive.beta == 1.0
    assert cfg.contrastive.tau == 0.05


def test_unknown_top_level_key_rejected():
    with pytest.raises(ParseError, match="baat_size"):
        config_from_dict({"algorithm": "sac", "baat_size": 4})


def test_unknown_nested_key_rejected():
    with pytest.raises(ParseError, match="'sac'.*batchsize"):
        config_from_dict({"algorithm": "sac", "sac": {"batchsize": 4}})
    with pytest.raises(ParseError, match="'contrastive'"):
        config_from_dict({"algorithm": "sac", "contrastive": {"bata": 1.0}})
    with pytest.raises(ParseError, match="'env'"):
        config_from_dict({"algorithm": "sac", "env": {"kindd": "push"}})


def test_negative_lambda_rejected():
    with pytest.raises(ParseError, match="lambda_vt"):
        config_from_dict({"algorithm": "sac",
                          "contrastive": {"lambda_vt": -1.0}})


def test_algorithm_section_mismatch_rejected():
    with pytest.raises(ParseError, match="sac"):
        config_from_dict({"algorithm": "ppo", "sac": {}})
    with pytest.raises(ParseError, match="ppo"):
        config_from_dict({"algorithm": "sac", "ppo": {}})


def test_missing_algorithm_rejected():
    with pytest.raises(ParseError, match="algorithm"):
        config_from_dict({"env": "push"})


def test_crop_larger_than_render_rejected():
    with pytest.raises(ParseError, match="crop_size"):
        config_from_dict({"algorithm": "sac",
                          "env": {"kind": "push", "size": 32},
                          "contrastive": {"crop_size": 56}})


def test_bad_field_types_rejected():
    with pytest.raises(ParseError, match="total_env_steps"):
        config_from_dict({"algorithm": "sac", "total_env_steps": "many"})
    with pytest.raises(ParseError, match="seed"):
        config_from_dict({"algorithm": "sac", "seed": True})


def test_round_trip_preserves_everything():
    original = config_from_dict({
        "algorithm": "ppo",
        "representation": "rad",
        "modalities": "visual_only",
        "env": {"kind": "edge", "size": 48, "horizon": 120,
                "params": {"n_waypoints": 2}},
        "contrastive": {"crop_size": 40, "embed_dim": 32, "tau": 0.2},
        "ppo": {"rollout_horizon": 512, "minibatch_size": 32},
        "total_env_steps": 4096, "eval_every": 1024, "eval_episodes": 4,
        "seed": 7, "output_dir": "runs/custom",
    })
    assert config_from_dict(serialize_config(original)) == original


def test_parse_config_reads_files(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"algorithm": "sac", "seed": 1}))
    assert parse_config(path).seed == 1

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError, match="JSON"):
        parse_config(bad)

    with pytest.raises(ParseError, match="not found"):
        parse_config(tmp_path / "absent.json")
