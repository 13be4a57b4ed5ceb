"""Preset expansion: grid sizes, ablation weights, unimodal fallbacks."""

import pytest

from vtrl.errors import ConfigError
from vtrl.harness import config_from_dict, preset, serialize_config


def test_table1_grid_has_24_runs():
    configs = preset("table1-grid")
    assert len(configs) == 24
    cells = {(c.mode.algorithm, c.mode.representation) for c in configs}
    assert len(cells) == 8
    assert sorted({c.seed for c in configs}) == [0, 1, 2]
    assert len({c.output_dir for c in configs}) == 24


def test_ablation_preset_weights():
    configs = preset("ablation-intra-inter")
    assert len(configs) == 9
    assert all(c.mode.algorithm == "sac" for c in configs)
    assert all(c.mode.representation == "m2curl" for c in configs)
    lambdas = {c.contrastive.lambdas for c in configs}
    assert lambdas == {(1.0, 1.0, 1.0, 1.0),
                       (1.0, 1.0, 0.0, 0.0),
                       (0.0, 0.0, 1.0, 1.0)}
    intra = [c for c in configs if c.contrastive.lambdas == (1.0, 1.0, 0.0, 0.0)]
    assert len(intra) == 3
    assert all(c.contrastive.lambda_vt == 0.0 and c.contrastive.lambda_tv == 0.0
               for c in intra)


def test_unimodal_preset_drops_contrastive_for_single_senses():
    configs = preset("unimodal")
    assert len(configs) == 18
    for c in configs:
        if c.mode.modalities == "both":
            assert c.mode.uses_contrastive
        else:
            assert not c.mode.uses_contrastive
            assert c.mode.augments


def test_every_preset_config_reparses():
    for name in ("table1-grid", "ablation-intra-inter", "unimodal"):
        for cfg in preset(name):
            assert config_from_dict(serialize_config(cfg)) == cfg


def test_unknown_preset_lists_valid_names():
    with pytest.raises(ConfigError, match="table1-grid"):
        preset("table-two")


def test_preset_overrides_apply():
    configs = preset("ablation-intra-inter", output_root="elsewhere",
                     image_size=24, total_env_steps=500, eval_every=100,
                     seeds=(5,))
    assert len(configs) == 3
    assert all(c.image_size == 24 for c in configs)
    assert all(c.total_env_steps == 500 for c in configs)
    assert all(c.seed == 5 for c in configs)
    assert all(c.output_dir.startswith("elsewhere/") for c in configs)
