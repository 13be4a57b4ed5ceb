"""Adam with bias correction."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from vtrl.errors import ContractError
from vtrl.numerics.tensor import Parameter


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_param(cls, param: Parameter, learning_rate: float = 1e-3, **kw) -> "AdamState":
        return cls(
            first_moment=np.zeros_like(param.value),
            second_moment=np.zeros_like(param.value),
            learning_rate=learning_rate,
            **kw,
        )


def adam_step(param: Parameter, state: AdamState) -> None:
    """One Adam update of param.value in place from param.grad."""
    if state.first_moment.shape != param.value.shape:
        raise ContractError(
            f"Adam state shape {state.first_moment.shape} does not match "
            f"parameter {param.name} shape {param.value.shape}"
        )
    g = param.grad
    state.step_count += 1
    t = state.step_count
    state.first_moment = state.beta1 * state.first_moment + (1.0 - state.beta1) * g
    state.second_moment = state.beta2 * state.second_moment + (1.0 - state.beta2) * (g * g)
    m_hat = state.first_moment / (1.0 - state.beta1 ** t)
    v_hat = state.second_moment / (1.0 - state.beta2 ** t)
    param.value -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)


@dataclass
class Adam:
    """Per-parameter Adam states behind a step/zero_grads pair."""

    params: list
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    states: dict = field(init=False)

    def __post_init__(self):
        self.states = {
            p.name: AdamState.for_param(
                p, self.learning_rate, beta1=self.beta1, beta2=self.beta2, epsilon=self.epsilon
            )
            for p in self.params
        }
        if len(self.states) != len(self.params):
            raise ContractError("duplicate parameter names passed to Adam")

    def step(self) -> None:
        for p in self.params:
            adam_step(p, self.states[p.name])

    def zero_grads(self) -> None:
        for p in self.params:
            p.zero_grad()
