"""Training run execution: seeding, evaluation cadence, metrics files.

A run directory receives four artifacts: config.json (the fully
resolved config), baseline.json (the measured random-policy return),
metrics.jsonl (one record per evaluation point), and checkpoint.json/
checkpoint.bin (latest parameters). Records carry wall_ms = 0 so that
reruns of the same config and seed are byte-identical; real wall time
belongs in logs, not in data files that determinism checks hash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from vtrl.harness.config import RunConfig, write_config
from vtrl.numerics.checkpoint import save_checkpoint
from vtrl.numerics.tensor import using_dtype
from vtrl.rl import Transition, make_agent
from vtrl.sim import make_env

# tags separating the harness seed streams from the agent's internal ones
_EVAL_STREAM = 0x45564C
_EPISODE_STREAM = 0x455053
_BASELINE_STREAM = 0x424C4E


@dataclass
class RunResult:
    config: RunConfig
    output_dir: Path
    metrics_path: Path
    checkpoint_path: Path
    baseline_return: float
    records: list
    final_return: float
    best_return: float


def _eval_seeds(cfg: RunConfig) -> list[int]:
    state = np.random.SeedSequence([cfg.seed, _EVAL_STREAM]).generate_state(
        cfg.eval_episodes)
    return [int(s) for s in state]


def _make_env(cfg: RunConfig):
    return make_env(cfg.env_kind, size=cfg.image_size,
                    horizon=cfg.env_horizon, **cfg.env_params)


def _episode(env, seed: int, act) -> float:
    obs = env.reset(seed=seed)
    total = 0.0
    while True:
        result = env.step(act(obs))
        total += result.reward
        obs = result.observation
        if result.done:
            return total


def evaluate_policy(agent, cfg: RunConfig, episode_seeds=None) -> float:
    """Mean deterministic-policy return over the fixed eval episodes."""
    seeds = _eval_seeds(cfg) if episode_seeds is None else episode_seeds
    env = _make_env(cfg)
    returns = [_episode(env, s, lambda o: agent.select_action(o, deterministic=True))
               for s in seeds]
    return float(np.mean(returns))


def measure_random_baseline(cfg: RunConfig, episode_seeds=None) -> float:
    """Mean return of uniform random actions under the eval protocol."""
    seeds = _eval_seeds(cfg) if episode_seeds is None else episode_seeds
    rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, _BASELINE_STREAM]))
    env = _make_env(cfg)
    returns = [_episode(env, s, lambda o: rng.uniform(-1.0, 1.0, size=2))
               for s in seeds]
    return float(np.mean(returns))


def _mean_of(pending: list) -> dict:
    keys = sorted({k for m in pending for k in m})
    return {k: float(np.mean([m[k] for m in pending if k in m])) for k in keys}


def run_experiment(cfg: RunConfig) -> RunResult:
    """Train one agent and leave a complete run directory behind."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_config(cfg, out / "config.json")

    eval_seeds = _eval_seeds(cfg)
    baseline = measure_random_baseline(cfg, eval_seeds)
    with open(out / "baseline.json", "w") as f:
        json.dump({"random_policy_return": baseline,
                   "episodes": cfg.eval_episodes}, f, sort_keys=True)
        f.write("\n")

    metrics_path = out / "metrics.jsonl"
    checkpoint_path = out / "checkpoint"
    records: list = []
    pending: list = []

    # float32 keeps training fast; the numerics test suites run in the
    # float64 default, which this context does not disturb
    with using_dtype(np.float32), open(metrics_path, "w") as metrics_file:

        def emit(record: dict) -> None:
            metrics_file.write(json.dumps(record, sort_keys=True) + "\n")
            metrics_file.flush()
            records.append(record)

        probe = _make_env(cfg)
        agent = make_agent(cfg.mode, cfg.contrastive, cfg.algo_config,
                           cfg.image_size, probe.state_dim, cfg.seed)

        def write_eval(steps: int) -> None:
            record = {"env_steps": steps, "wall_ms": 0,
                      "episode_return": evaluate_policy(agent, cfg, eval_seeds)}
            if pending:
                record.update(_mean_of(pending))
                pending.clear()
            emit(record)
            save_checkpoint(agent.parameters(), checkpoint_path)

        try:
            write_eval(0)
            env = _make_env(cfg)
            episode_rng = np.random.default_rng(
                np.random.SeedSequence([cfg.seed, _EPISODE_STREAM]))
            obs = env.reset(seed=int(episode_rng.integers(2 ** 31)))
            is_sac = cfg.mode.algorithm == "sac"
            for step in range(1, cfg.total_env_steps + 1):
                if is_sac:
                    action = agent.select_action(obs)
                    result = env.step(action)
                    agent.observe(Transition(obs, action, result.reward,
                                             result.observation, result.done))
                else:
                    info = agent.act_collect(obs)
                    result = env.step(info["action"])
                    agent.store(obs, info, result.reward, result.done)
                obs = result.observation
                if result.done:
                    obs = env.reset(seed=int(episode_rng.integers(2 ** 31)))
                if agent.ready_to_update():
                    pending.append(agent.update() if is_sac
                                   else agent.update(obs))
                if step % cfg.eval_every == 0:
                    write_eval(step)
            if cfg.total_env_steps % cfg.eval_every != 0:
                write_eval(cfg.total_env_steps)
        except OSError as exc:
            # flush what exists and mark the file as aborted
            emit({"env_steps": records[-1]["env_steps"] if records else 0,
                  "wall_ms": 0, "status": "aborted", "error": str(exc)})
            raise

    eval_returns = [r["episode_return"] for r in records
                    if "episode_return" in r]
    return RunResult(
        config=cfg,
        output_dir=out,
        metrics_path=metrics_path,
        checkpoint_path=checkpoint_path,
        baseline_return=baseline,
        records=records,
        final_return=eval_returns[-1],
        best_return=max(eval_returns),
    )
