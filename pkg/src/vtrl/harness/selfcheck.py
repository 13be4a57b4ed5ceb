"""Built-in verification commands.

`gradcheck` compares every analytic gradient in the stack against
central finite differences, layer by layer and through the full
augment-encode-project-contrast pipeline. `selfcheck` replays the fast
analytic oracles (softmax cross-entropy by hand, one-step TD, the
untouched-ratio surrogate) and a determinism probe. Both return plain
result lists so the CLI and the test suite share one implementation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vtrl.contrastive import (
    AugmentedPair,
    ContrastiveConfig,
    RepresentationModel,
    augment_views,
    combined_loss,
    compute_keys,
    contrastive_terms,
    info_nce,
)
from vtrl.numerics import tensor as T
from vtrl.numerics.checkpoint import load_checkpoint, save_checkpoint
from vtrl.numerics.gradcheck import grad_check
from vtrl.numerics.layers import Conv2d, Dense
from vtrl.numerics.tensor import Parameter, as_tensor, grad_eval, zero_grads
from vtrl.rl import (
    AgentMode,
    PPOBatch,
    PPOConfig,
    SACAgent,
    SACConfig,
    Transition,
    gae_advantages,
    log_prob_of,
    ppo_clip_loss,
    sac_critic_loss,
)
from vtrl.sim import Observation, make_env


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "ok  " if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def _report_result(name: str, report) -> CheckResult:
    return CheckResult(name=name, passed=report.passed,
                       detail=report.summary())


def _tiny_model(crop: int = 12, embed: int = 8) -> tuple:
    # small enough that perturbing every parameter twice stays cheap
    cfg = ContrastiveConfig(embed_dim=embed, head_hidden=12, crop_size=crop,
                            tau=0.1)
    model = RepresentationModel.create(np.random.default_rng(5), cfg)
    return model, cfg


def run_gradcheck() -> list[CheckResult]:
    """Finite-difference checks over layers, heads, encoders, pipeline."""
    results = []
    rng = np.random.default_rng(17)

    dense = Dense.create(rng, 4, 3, "dense")
    x = as_tensor(rng.normal(size=(5, 4)))
    results.append(_report_result(
        "affine", grad_check(lambda: T.tsum(T.tanh(dense(x))),
                             dense.parameters(), tolerance=1e-4)))

    conv = Conv2d.create(rng, 1, 2, 3, 2, "conv")
    img = as_tensor(rng.normal(size=(2, 1, 7, 7)))
    results.append(_report_result(
        "conv2d", grad_check(lambda: T.tsum(T.mul(conv(img), conv(img))),
                             conv.parameters(), tolerance=1e-4)))

    l1 = Dense.create(rng, 3, 6, "relu/l1")
    l2 = Dense.create(rng, 6, 1, "relu/l2")
    l1.bias.value += 0.2
    xr = as_tensor(rng.normal(size=(4, 3)))
    results.append(_report_result(
        "relu-mlp", grad_check(
            lambda: T.tsum(T.tanh(l2(T.relu_apply(l1(xr))))),
            l1.parameters() + l2.parameters(), tolerance=1e-4)))

    model, cfg = _tiny_model()
    codes_in = rng.normal(size=(3, cfg.embed_dim))
    head = model.head_vv
    # fixed projection keeps the loss sensitive to the head weights; a
    # plain sum of squares would be constant 1 per row after the L2
    # normalisation and its gradient would vanish identically
    probe = as_tensor(rng.normal(size=(3, cfg.embed_dim)))

    def head_loss():
        from vtrl.contrastive import head_apply
        out = head_apply(head, codes_in)
        return T.tsum(T.mul(out, probe))

    results.append(_report_result(
        "head", grad_check(head_loss, head.parameters(), tolerance=1e-4)))

    images = rng.integers(0, 256, size=(2, cfg.crop_size, cfg.crop_size),
                          dtype=np.uint8)

    def encoder_loss():
        from vtrl.contrastive import encode
        z = encode(model.online_visual, images)
        return T.tsum(T.mul(z, z))

    results.append(_report_result(
        "encoder", grad_check(encoder_loss, model.online_visual.parameters(),
                              tolerance=1e-4)))

    raw_v = rng.integers(0, 256, size=(3, 16, 16), dtype=np.uint8)
    raw_t = rng.integers(0, 256, size=(3, 16, 16), dtype=np.uint8)
    query = augment_views(raw_v, raw_t, cfg.crop_size, np.random.default_rng(7))
    key = augment_views(raw_v, raw_t, cfg.crop_size, np.random.default_rng(8))
    # keys are a stop-gradient input by definition, so they must be
    # frozen outside the loss closure; differencing through them would
    # measure a different function than the one the tape differentiates
    keys = compute_keys(model, key, cfg.lambdas)

    def pipeline_loss():
        terms = contrastive_terms(model, query, keys, cfg.tau)
        total = None
        for tag in ("vv", "tt", "vt", "tv"):
            total = terms[tag] if total is None else T.add(total, terms[tag])
        return total

    results.append(_report_result(
        "pipeline", grad_check(pipeline_loss, model.parameters(),
                               tolerance=1e-3)))
    return results


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _info_nce_oracle() -> CheckResult:
    rng = np.random.default_rng(3)
    q = rng.normal(size=(8, 8))
    k = rng.normal(size=(8, 8))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    k /= np.linalg.norm(k, axis=1, keepdims=True)
    tau = 0.1
    logits = q @ k.T / tau
    logZ = np.log(np.exp(logits - logits.max(axis=1, keepdims=True)).sum(axis=1))
    brute = float(np.mean(logZ + logits.max(axis=1) - np.diag(logits)))
    got = float(info_nce(q, k, tau).data)
    return _check("info-nce-oracle", abs(got - brute) < 1e-6,
                  f"|{got:.9f} - {brute:.9f}| vs brute force")


def _info_nce_identical_rows() -> CheckResult:
    rows = np.tile(np.array([[0.6, 0.8, 0.0, 0.0]]), (16, 1))
    got = float(info_nce(rows, rows, 0.07).data)
    want = math.log(16.0)
    return _check("info-nce-ln-b", abs(got - want) < 1e-9,
                  f"identical rows give {got:.12f}, ln B = {want:.12f}")


def _momentum_gradients() -> CheckResult:
    model, cfg = _tiny_model()
    rng = np.random.default_rng(11)
    raw_v = rng.integers(0, 256, size=(4, 16, 16), dtype=np.uint8)
    raw_t = rng.integers(0, 256, size=(4, 16, 16), dtype=np.uint8)
    aug = AugmentedPair(
        query_view=augment_views(raw_v, raw_t, cfg.crop_size,
                                 np.random.default_rng(1)),
        key_view=augment_views(raw_v, raw_t, cfg.crop_size,
                               np.random.default_rng(2)))
    zero_grads(model.all_parameters())
    loss, _ = combined_loss(model, aug, cfg)
    grad_eval(loss)
    worst = max(float(np.abs(p.grad).max())
                for p in model.momentum_parameters())
    return _check("momentum-no-grad", worst == 0.0,
                  f"max |grad| over momentum params = {worst}")


class _TDNets:
    def __init__(self):
        from vtrl.rl import GaussianPolicy, TwinCritics
        rng = np.random.default_rng(23)
        self.policy = GaussianPolicy.create(rng, 3, 2, 8, squash=True)
        self.critics = TwinCritics.create(rng, 3, 2, 8)
        self.model = None


def _td_identity() -> CheckResult:
    from vtrl.rl import SACFeatureBatch
    rng = np.random.default_rng(29)
    feats = rng.normal(size=(6, 3))
    batch = SACFeatureBatch(
        policy_features=feats, critic_features=feats,
        actions=rng.uniform(-1, 1, size=(6, 2)),
        rewards=-rng.uniform(0, 1, size=6),
        dones=np.zeros(6),
        next_policy_features=feats, next_critic_features=feats)
    cfg = SACConfig(gamma=0.0, batch_size=6)
    _, info = sac_critic_loss(batch, _TDNets(), cfg,
                              rng.standard_normal((6, 2)))
    err = float(np.abs(info["target"] - batch.rewards).max())
    return _check("gamma-zero-target", err < 1e-9,
                  f"max |target - r| = {err:.2e}")


def _gae_identity() -> CheckResult:
    from vtrl.rl import RolloutBuffer
    rng = np.random.default_rng(31)
    roll = RolloutBuffer()
    img = np.zeros((4, 4), dtype=np.uint8)
    rewards = -rng.uniform(0, 1, size=5)
    values = rng.normal(size=5)
    for r, v in zip(rewards, values):
        roll.add(Observation(img, img, np.zeros(2)), np.zeros(2), 0.0,
                 float(v), float(r), False)
    roll.bootstrap_value = 0.3
    cfg = PPOConfig(gamma=0.9, gae_lambda=0.0)
    adv, _ = gae_advantages(roll, cfg)
    next_v = np.append(values[1:], 0.3)
    err = float(np.abs(adv - (rewards + 0.9 * next_v - values)).max())
    return _check("gae-one-step-td", err < 1e-9, f"max |A - delta| = {err:.2e}")


def _ratio_one_identity() -> CheckResult:
    from vtrl.rl import GaussianPolicy
    from vtrl.numerics.layers import MLP

    class Nets:
        pass

    rng = np.random.default_rng(37)
    nets = Nets()
    nets.policy = GaussianPolicy.create(rng, 3, 2, 8, squash=False)
    nets.value = MLP.create(rng, (3, 8, 8, 1), "value")
    nets.model = None
    feats = rng.normal(size=(9, 3))
    actions = rng.uniform(-1, 1, size=(9, 2))
    adv = rng.normal(size=9)
    batch = PPOBatch(features=feats, actions=actions,
                     old_log_probs=log_prob_of(nets.policy, feats, actions).data,
                     advantages=adv, returns=rng.normal(size=9))
    _, parts = ppo_clip_loss(batch, nets, PPOConfig())
    err = abs(parts["loss_actor"] - (-float(np.mean(adv))))
    return _check("ratio-one-surrogate", err < 1e-9,
                  f"|surrogate + mean(adv)| = {err:.2e}")


def _determinism_probe() -> CheckResult:
    def metrics_trace() -> list:
        env = make_env("push", size=24, horizon=50)
        cfg = SACConfig(batch_size=8, hidden_dim=16, start_steps=0,
                        replay_capacity=64)
        contrastive = ContrastiveConfig(embed_dim=16, head_hidden=24,
                                        crop_size=20)
        agent = SACAgent(AgentMode("sac"), cfg, contrastive, 24, 9, seed=13)
        obs = env.reset(seed=4)
        rng = np.random.default_rng(5)
        for _ in range(10):
            action = rng.uniform(-1, 1, size=2)
            result = env.step(action)
            agent.observe(Transition(obs, action, result.reward,
                                     result.observation, result.done))
            obs = result.observation
        return [agent.update() for _ in range(2)]

    same = metrics_trace() == metrics_trace()
    return _check("determinism", same,
                  "two identically seeded updates " +
                  ("agree exactly" if same else "diverged"))


def _checkpoint_roundtrip(tmp_dir=None) -> CheckResult:
    import tempfile
    from pathlib import Path
    rng = np.random.default_rng(41)
    params = [Parameter(rng.normal(size=(3, 4)), "a"),
              Parameter(rng.normal(size=(2,)), "b")]
    with tempfile.TemporaryDirectory(dir=tmp_dir) as tmp:
        base = Path(tmp) / "ck"
        save_checkpoint(params, base)
        first = (base.with_suffix(".json").read_bytes(),
                 base.with_suffix(".bin").read_bytes())
        load_checkpoint(params, base)
        save_checkpoint(params, base)
        second = (base.with_suffix(".json").read_bytes(),
                  base.with_suffix(".bin").read_bytes())
    return _check("checkpoint-roundtrip", first == second,
                  "save-load-save bytes " +
                  ("identical" if first == second else "differ"))


def run_selfcheck() -> list[CheckResult]:
    """Fast oracle and determinism probes; seconds, not minutes."""
    return [
        _info_nce_oracle(),
        _info_nce_identical_rows(),
        _momentum_gradients(),
        _td_identity(),
        _gae_identity(),
        _ratio_one_identity(),
        _determinism_probe(),
        _checkpoint_roundtrip(),
    ]
