"""Parameter containers for the small conv/MLP networks used everywhere.

Initialization is uniform in +-1/sqrt(fan_in) for weights and biases,
drawn from the numpy Generator handed in, so model construction order
fully determines the initial values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from vtrl.numerics import tensor as T
from vtrl.numerics.tensor import Parameter, Tensor


def _uniform_init(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


@dataclass
class Dense:
    weight: Parameter
    bias: Parameter

    @classmethod
    def create(cls, rng, n_in: int, n_out: int, name: str) -> "Dense":
        w = Parameter(_uniform_init(rng, (n_in, n_out), n_in), f"{name}/weight")
        b = Parameter(_uniform_init(rng, (n_out,), n_in), f"{name}/bias")
        return cls(w, b)

    def __call__(self, x) -> Tensor:
        return T.affine_apply(self.weight, self.bias, x)

    def parameters(self):
        return [self.weight, self.bias]


@dataclass
class Conv2d:
    kernel: Parameter
    bias: Parameter
    stride: int

    @classmethod
    def create(cls, rng, c_in: int, c_out: int, k: int, stride: int, name: str) -> "Conv2d":
        fan_in = c_in * k * k
        kern = Parameter(_uniform_init(rng, (c_out, c_in, k, k), fan_in), f"{name}/kernel")
        b = Parameter(_uniform_init(rng, (c_out,), fan_in), f"{name}/bias")
        return cls(kern, b, stride)

    def __call__(self, x) -> Tensor:
        return T.conv2d_apply(self.kernel, self.bias, x, self.stride)

    def parameters(self):
        return [self.kernel, self.bias]


@dataclass
class MLP:
    """Stack of Dense layers with ReLU between them (linear output)."""

    layers: list

    @classmethod
    def create(cls, rng, sizes, name: str) -> "MLP":
        layers = [
            Dense.create(rng, sizes[i], sizes[i + 1], f"{name}/fc{i}")
            for i in range(len(sizes) - 1)
        ]
        return cls(layers)

    def __call__(self, x) -> Tensor:
        h = x
        for i, layer in enumerate(self.layers):
            h = layer(h)
            if i < len(self.layers) - 1:
                h = T.relu_apply(h)
        return h

    def parameters(self):
        return [p for layer in self.layers for p in layer.parameters()]
