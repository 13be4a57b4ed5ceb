from vtrl.errors import ConfigError
from vtrl.sim.base import Observation, StepResult, clip_action, stack_observations
from vtrl.sim.push import PushState, PushWorld, render_push_tactile
from vtrl.sim.edge import (
    EdgeFollow,
    EdgeState,
    corner_clearance,
    edge_frame,
    render_edge_imprint,
    render_edge_scene,
)
from vtrl.sim.dataset import (
    PairDataset,
    load_pair_dataset,
    make_latent_pair_dataset,
    save_pair_dataset,
)

ENV_KINDS = ("push", "edge")


def make_env(kind: str, size: int = 64, horizon: int = 200, **params):
    """Environment factory; kind is one of ENV_KINDS."""
    if kind == "push":
        return PushWorld(size=size, horizon=horizon, **params)
    if kind == "edge":
        return EdgeFollow(size=size, horizon=horizon, **params)
    raise ConfigError(f"unknown env kind {kind!r}; expected one of {ENV_KINDS}")
