"""Canned experiment grids, each expanding to validated run configs.

table1-grid crosses every representation with both algorithms; the
ablation preset varies the four contrastive weights between the full,
intra-only, and inter-only settings; the unimodal preset compares the
fused agent against single-sense baselines (which drop the contrastive
objective, since it needs both senses).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

from vtrl.errors import ConfigError
from vtrl.harness.config import RunConfig, config_from_dict
from vtrl.harness.run import RunResult, run_experiment

PRESET_NAMES = ("table1-grid", "ablation-intra-inter", "unimodal")
SEEDS = (0, 1, 2)

_ABLATION_LAMBDAS = {
    "full": (1.0, 1.0, 1.0, 1.0),
    "intra": (1.0, 1.0, 0.0, 0.0),
    "inter": (0.0, 0.0, 1.0, 1.0),
}

# single-sense cells keep the crop augmentation but cannot form
# cross-modal pairs, so they fall back to the augmentation-only agent
_UNIMODAL_REPRESENTATION = {
    "both": "m2curl",
    "visual_only": "rad",
    "tactile_only": "rad",
}


def _base(env_kind: str, image_size: int, horizon: int, total_env_steps: int,
          eval_every: int) -> dict:
    return {
        "env": {"kind": env_kind, "size": image_size, "horizon": horizon},
        # crop at 7/8 of the render, the same ratio as the 64 -> 56 default
        "contrastive": {"crop_size": max(image_size * 7 // 8, 1)},
        "total_env_steps": total_env_steps,
        "eval_every": eval_every,
    }


def preset(name: str, output_root: str = "runs", env_kind: str = "push",
           image_size: int = 64, horizon: int = 200,
           total_env_steps: int = 20_000, eval_every: int = 2_000,
           seeds=SEEDS) -> list[RunConfig]:
    """Expand a preset name into its full list of run configs."""
    if name not in PRESET_NAMES:
        raise ConfigError(
            f"unknown preset {name!r}; valid names: {', '.join(PRESET_NAMES)}")

    specs: list[tuple[str, dict]] = []
    if name == "table1-grid":
        for algorithm in ("sac", "ppo"):
            for representation in ("m2curl", "rad", "vanilla", "state"):
                specs.append((f"{algorithm}-{representation}", {
                    "algorithm": algorithm,
                    "representation": representation,
                }))
    elif name == "ablation-intra-inter":
        for variant, (vv, tt, vt, tv) in _ABLATION_LAMBDAS.items():
            specs.append((f"sac-m2curl-{variant}", {
                "algorithm": "sac",
                "representation": "m2curl",
                "lambdas": {"lambda_vv": vv, "lambda_tt": tt,
                            "lambda_vt": vt, "lambda_tv": tv},
            }))
    else:
        for algorithm in ("sac", "ppo"):
            for modalities, representation in _UNIMODAL_REPRESENTATION.items():
                specs.append((f"{algorithm}-{modalities}", {
                    "algorithm": algorithm,
                    "representation": representation,
                    "modalities": modalities,
                }))

    configs = []
    for label, overrides in specs:
        for seed in seeds:
            data = _base(env_kind, image_size, horizon, total_env_steps,
                         eval_every)
            extra = dict(overrides)
            data["contrastive"].update(extra.pop("lambdas", {}))
            data.update(extra)
            data["seed"] = seed
            data["output_dir"] = f"{output_root}/{name}/{label}-seed{seed}"
            configs.append(config_from_dict(data))
    return configs


def run_preset(name: str, output_root: str = "runs", parallel: int = 1,
               **preset_kwargs) -> list[RunResult]:
    """Execute every run in a preset, optionally across processes."""
    configs = preset(name, output_root=output_root, **preset_kwargs)
    if parallel <= 1:
        return [run_experiment(cfg) for cfg in configs]
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        return list(pool.map(run_experiment, configs))
