"""Intra- and inter-modality InfoNCE losses.

Queries always come from the online encoders; keys come from the
momentum encoders and are detached, so no gradient ever reaches the
momentum branch.  Heads on the key path reuse the online head weights
under detachment (there are no momentum copies of the heads).

Key-code computation is split out of the loss so callers that need the
keys as fixed constants (finite-difference checks, logging-only passes)
can reuse the exact production path.
"""

from __future__ import annotations

import numpy as np

from vtrl.errors import ConfigError, ContractError
from vtrl.numerics import (
    Tensor,
    as_tensor,
    constant,
    diagonal,
    exp,
    log,
    matmul,
    mul,
    sub,
    tmean,
    tsum,
)
from vtrl.contrastive.augment import AugmentedPair, ViewBatch
from vtrl.contrastive.config import ContrastiveConfig
from vtrl.contrastive.model import RepresentationModel, encode, head_apply

_LOSS_TAGS = ("vv", "tt", "vt", "tv")


def _check_codes(arr: np.ndarray, label: str) -> None:
    if arr.ndim != 2:
        raise ContractError(f"{label} must be a (B, d) matrix, got shape {arr.shape}")
    tol = 1e-6 if arr.dtype == np.float64 else 1e-5
    norms = np.sqrt((arr * arr).sum(axis=1))
    worst = float(np.abs(norms - 1.0).max())
    if worst > tol:
        raise ContractError(f"{label} rows must be unit-norm, worst deviation {worst:.3g}")


def info_nce(queries, keys, tau: float) -> Tensor:
    """Mean InfoNCE over a batch with in-batch negatives.

    Row i of `keys` is the positive for row i of `queries`; the
    denominator runs over the whole key batch.  `keys` is treated as a
    constant even if a live tensor is passed in.
    """
    if tau <= 0:
        raise ConfigError(f"tau must be positive, got {tau}")
    q = as_tensor(queries)
    k = keys.data if isinstance(keys, Tensor) else np.asarray(keys)
    _check_codes(q.data, "queries")
    _check_codes(k, "keys")
    if q.data.shape != k.shape:
        raise ContractError(
            f"queries {q.data.shape} and keys {k.shape} must match")
    if q.data.shape[0] < 2:
        raise ConfigError(f"need at least 2 samples, got {q.data.shape[0]}")
    logits = mul(matmul(q, constant(k.T)), constant(np.asarray(1.0 / tau)))
    # constant per-row shift for a stable log-sum-exp; it cancels in the
    # value and does not enter the gradient
    shift = constant(logits.data.max(axis=1, keepdims=True))
    z = sub(logits, shift)
    lse = log(tsum(exp(z), axis=1))
    positives = diagonal(z)
    return tmean(sub(lse, positives))


def compute_keys(model: RepresentationModel, key_view: ViewBatch,
                 lambdas: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0),
                 ) -> dict[str, np.ndarray]:
    """Detached key codes for each loss term with a positive weight.

    Returned dict is keyed by loss tag: keys["vt"] are the codes the
    visual->tactile queries are matched against (tactile momentum
    embedding through the tv head), and symmetrically for the others.
    """
    l_vv, l_tt, l_vt, l_tv = lambdas
    out: dict[str, np.ndarray] = {}
    if l_vv > 0 or l_tv > 0:
        emb_v = encode(model.momentum_visual, key_view.visual).detach()
        if l_vv > 0:
            out["vv"] = head_apply(model.head_vv, emb_v).data
        if l_tv > 0:
            out["tv"] = head_apply(model.head_vt, emb_v).data
    if l_tt > 0 or l_vt > 0:
        emb_t = encode(model.momentum_tactile, key_view.tactile).detach()
        if l_tt > 0:
            out["tt"] = head_apply(model.head_tt, emb_t).data
        if l_vt > 0:
            out["vt"] = head_apply(model.head_tv, emb_t).data
    return out


def contrastive_terms(model: RepresentationModel, query_view: ViewBatch,
                      keys: dict[str, np.ndarray], tau: float,
                      wanted: tuple[str, ...] = _LOSS_TAGS) -> dict[str, Tensor]:
    """Per-term losses as live tensors, given fixed key codes."""
    unknown = set(wanted) - set(_LOSS_TAGS)
    if unknown:
        raise ConfigError(f"unknown loss tags {sorted(unknown)}")
    emb_v = None
    emb_t = None
    if "vv" in wanted or "vt" in wanted:
        emb_v = encode(model.online_visual, query_view.visual)
    if "tt" in wanted or "tv" in wanted:
        emb_t = encode(model.online_tactile, query_view.tactile)
    heads = model.heads()
    sources = {"vv": emb_v, "vt": emb_v, "tt": emb_t, "tv": emb_t}
    terms: dict[str, Tensor] = {}
    for tag in _LOSS_TAGS:
        if tag not in wanted:
            continue
        if tag not in keys:
            raise ContractError(f"missing key codes for loss term {tag!r}")
        queries = head_apply(heads[tag], sources[tag])
        terms[tag] = info_nce(queries, keys[tag], tau)
    return terms


def intra_loss(model: RepresentationModel, aug: AugmentedPair, modality: str,
               tau: float | None = None) -> Tensor:
    """Same-modality loss: L_VV for visual, L_TT for tactile."""
    if modality not in ("visual", "tactile"):
        raise ConfigError(f"modality must be visual or tactile, got {modality!r}")
    tag = "vv" if modality == "visual" else "tt"
    return _single_term(model, aug, tag, tau)


def inter_loss(model: RepresentationModel, aug: AugmentedPair, direction: str,
               tau: float | None = None) -> Tensor:
    """Cross-modality loss: vt queries visual against tactile keys, tv the reverse."""
    if direction not in ("vt", "tv"):
        raise ConfigError(f"direction must be vt or tv, got {direction!r}")
    return _single_term(model, aug, direction, tau)


def _single_term(model: RepresentationModel, aug: AugmentedPair, tag: str,
                 tau: float | None) -> Tensor:
    if tau is None:
        tau = model.config.tau
    lambdas = tuple(1.0 if t == tag else 0.0 for t in _LOSS_TAGS)
    keys = compute_keys(model, aug.key_view, lambdas)
    terms = contrastive_terms(model, aug.query_view, keys, tau, wanted=(tag,))
    return terms[tag]


def combined_loss(model: RepresentationModel, aug: AugmentedPair,
                  cfg: ContrastiveConfig | None = None,
                  ) -> tuple[Tensor, dict[str, float]]:
    """Weighted multimodal loss L_MM plus a per-term record for logging.

    Terms with zero weight are skipped entirely (never evaluated) and
    reported as 0.0; the recorded components are unweighted.
    """
    if cfg is None:
        cfg = model.config
    weights = dict(zip(_LOSS_TAGS, cfg.lambdas, strict=True))
    wanted = tuple(tag for tag in _LOSS_TAGS if weights[tag] > 0)
    components = {f"loss_{tag}": 0.0 for tag in _LOSS_TAGS}
    if not wanted:
        zero = constant(np.asarray(0.0))
        components["loss_mm"] = 0.0
        return zero, components
    keys = compute_keys(model, aug.key_view, cfg.lambdas)
    terms = contrastive_terms(model, aug.query_view, keys, cfg.tau, wanted)
    total: Tensor | None = None
    for tag in wanted:
        components[f"loss_{tag}"] = float(terms[tag].data)
        weighted = mul(terms[tag], constant(np.asarray(weights[tag])))
        total = weighted if total is None else total + weighted
    components["loss_mm"] = float(total.data)
    return total, components


def momentum_update(model: RepresentationModel, alpha_ema: float | None = None) -> None:
    """EMA update of the momentum encoders toward the online encoders."""
    model.momentum_update(alpha_ema)
