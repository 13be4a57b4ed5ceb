"""Encoders and projection heads for the paired-modality learner.

Each modality (visual, tactile) has an online encoder trained by
backprop and a momentum encoder updated only as an exponential moving
average of the online weights.  Four projection heads map embeddings to
unit-norm codes: one per (query modality, key modality) combination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.errors import ContractError, DimensionError
from vtrl.numerics import (
    Conv2d,
    Dense,
    Parameter,
    Tensor,
    as_tensor,
    constant,
    div,
    relu_apply,
    sqrt,
    tsum,
)
from vtrl.contrastive.config import ContrastiveConfig


def conv_output_side(side: int, kernel: int = 3, stride: int = 2) -> int:
    if side < kernel:
        raise DimensionError(f"input side {side} smaller than kernel {kernel}")
    return (side - kernel) // stride + 1


@dataclass
class Encoder:
    """Two strided conv layers, flatten, one affine layer.

    Input is a (B, S, S) batch of single-channel images in [0, 1];
    output is a (B, embed_dim) batch of unnormalised embeddings.
    """

    conv1: Conv2d
    conv2: Conv2d
    fc: Dense
    crop_size: int
    embed_dim: int

    @classmethod
    def create(cls, rng: np.random.Generator, crop_size: int, embed_dim: int,
               name: str) -> "Encoder":
        s1 = conv_output_side(crop_size)
        s2 = conv_output_side(s1)
        flat = 16 * s2 * s2
        conv1 = Conv2d.create(rng, 1, 8, 3, stride=2, name=f"{name}/conv1")
        conv2 = Conv2d.create(rng, 8, 16, 3, stride=2, name=f"{name}/conv2")
        fc = Dense.create(rng, flat, embed_dim, name=f"{name}/fc")
        return cls(conv1=conv1, conv2=conv2, fc=fc,
                   crop_size=crop_size, embed_dim=embed_dim)

    def __call__(self, images) -> Tensor:
        x = as_tensor(images)
        if x.data.ndim != 3:
            raise DimensionError(
                f"encoder expects (B, S, S) images, got shape {x.data.shape}")
        if x.data.shape[1] != self.crop_size or x.data.shape[2] != self.crop_size:
            raise DimensionError(
                f"encoder built for {self.crop_size}x{self.crop_size} inputs, "
                f"got {x.data.shape[1]}x{x.data.shape[2]}")
        b = x.data.shape[0]
        h = x.reshape((b, 1, self.crop_size, self.crop_size))
        h = relu_apply(self.conv1(h))
        h = relu_apply(self.conv2(h))
        h = h.reshape((b, -1))
        return self.fc(h)

    def parameters(self) -> list[Parameter]:
        return self.conv1.parameters() + self.conv2.parameters() + self.fc.parameters()


@dataclass
class Head:
    """Two affine layers with a ReLU between, then row L2 normalisation."""

    fc1: Dense
    fc2: Dense

    @classmethod
    def create(cls, rng: np.random.Generator, embed_dim: int, hidden: int,
               name: str) -> "Head":
        fc1 = Dense.create(rng, embed_dim, hidden, name=f"{name}/fc1")
        fc2 = Dense.create(rng, hidden, embed_dim, name=f"{name}/fc2")
        return cls(fc1=fc1, fc2=fc2)

    def __call__(self, z) -> Tensor:
        h = self.fc2(relu_apply(self.fc1(as_tensor(z))))
        return normalize_rows(h)

    def parameters(self) -> list[Parameter]:
        return self.fc1.parameters() + self.fc2.parameters()


def normalize_rows(x: Tensor, eps: float = 1e-12) -> Tensor:
    """Scale each row of a (B, d) tensor to unit Euclidean norm."""
    x = as_tensor(x)
    if x.data.ndim != 2:
        raise DimensionError(f"expected (B, d) input, got shape {x.data.shape}")
    sq = tsum(x * x, axis=1, keepdims=True)
    norm = sqrt(sq + constant(np.full_like(sq.data, eps)))
    return div(x, norm)


def clone_encoder(src: Encoder, name: str) -> Encoder:
    """Structural copy with fresh parameters initialised to src's values."""

    def copy_dense(d: Dense, tag: str) -> Dense:
        return Dense(
            weight=Parameter(d.weight.value.copy(), name=f"{name}/{tag}/weight"),
            bias=Parameter(d.bias.value.copy(), name=f"{name}/{tag}/bias"),
        )

    def copy_conv(c: Conv2d, tag: str) -> Conv2d:
        return Conv2d(
            kernel=Parameter(c.kernel.value.copy(), name=f"{name}/{tag}/kernel"),
            bias=Parameter(c.bias.value.copy(), name=f"{name}/{tag}/bias"),
            stride=c.stride,
        )

    return Encoder(
        conv1=copy_conv(src.conv1, "conv1"),
        conv2=copy_conv(src.conv2, "conv2"),
        fc=copy_dense(src.fc, "fc"),
        crop_size=src.crop_size,
        embed_dim=src.embed_dim,
    )


@dataclass
class RepresentationModel:
    online_visual: Encoder
    online_tactile: Encoder
    momentum_visual: Encoder
    momentum_tactile: Encoder
    head_vv: Head
    head_vt: Head
    head_tt: Head
    head_tv: Head
    config: ContrastiveConfig

    @classmethod
    def create(cls, rng: np.random.Generator,
               config: ContrastiveConfig) -> "RepresentationModel":
        online_visual = Encoder.create(rng, config.crop_size, config.embed_dim,
                                       "online_visual")
        online_tactile = Encoder.create(rng, config.crop_size, config.embed_dim,
                                        "online_tactile")
        # momentum branches start as exact copies of the online weights
        momentum_visual = clone_encoder(online_visual, "momentum_visual")
        momentum_tactile = clone_encoder(online_tactile, "momentum_tactile")
        heads = {
            tag: Head.create(rng, config.embed_dim, config.head_hidden, f"head_{tag}")
            for tag in ("vv", "vt", "tt", "tv")
        }
        return cls(online_visual=online_visual, online_tactile=online_tactile,
                   momentum_visual=momentum_visual,
                   momentum_tactile=momentum_tactile,
                   head_vv=heads["vv"], head_vt=heads["vt"],
                   head_tt=heads["tt"], head_tv=heads["tv"], config=config)

    def heads(self) -> dict[str, Head]:
        return {"vv": self.head_vv, "vt": self.head_vt,
                "tt": self.head_tt, "tv": self.head_tv}

    def encoder_parameters(self) -> list[Parameter]:
        return self.online_visual.parameters() + self.online_tactile.parameters()

    def head_parameters(self) -> list[Parameter]:
        out: list[Parameter] = []
        for head in self.heads().values():
            out.extend(head.parameters())
        return out

    def parameters(self) -> list[Parameter]:
        """Parameters trained by gradient descent."""
        return self.encoder_parameters() + self.head_parameters()

    def momentum_parameters(self) -> list[Parameter]:
        return (self.momentum_visual.parameters()
                + self.momentum_tactile.parameters())

    def all_parameters(self) -> list[Parameter]:
        return self.parameters() + self.momentum_parameters()

    def momentum_update(self, alpha: float | None = None) -> None:
        """theta_m <- alpha * theta_m + (1 - alpha) * theta, in place."""
        if alpha is None:
            alpha = self.config.alpha_ema
        if not 0.0 <= alpha <= 1.0:
            raise ContractError(f"momentum coefficient must lie in [0, 1], got {alpha}")
        pairs = zip(self.encoder_parameters(), self.momentum_parameters(),
                    strict=True)
        for online, momentum in pairs:
            if online.value.shape != momentum.value.shape:
                raise ContractError(
                    f"mismatched shapes for {online.name} / {momentum.name}")
            if alpha == 0.0:
                momentum.value = online.value.copy()
            elif alpha != 1.0:
                momentum.value = alpha * momentum.value + (1.0 - alpha) * online.value


def encode(encoder: Encoder, images) -> Tensor:
    """Unnormalised embeddings for a (B, S, S) image batch."""
    return encoder(images)


def head_apply(head: Head, embeddings) -> Tensor:
    """Unit-norm codes for a (B, embed_dim) embedding batch."""
    return head(embeddings)
