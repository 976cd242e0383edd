"""Adam optimizer with classic L2 weight decay (decay added to the gradient)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import Parameter


@dataclass
class OptimizerConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 1e-5


class Adam:
    def __init__(self, params: list[Parameter], config: OptimizerConfig | None = None):
        self.params = list(params)
        self.config = config or OptimizerConfig()
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.params]
        self._v = [np.zeros_like(p.data) for p in self.params]

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad = None

    def step(self) -> None:
        c = self.config
        self.t += 1
        bias1 = 1.0 - c.beta1 ** self.t
        bias2 = 1.0 - c.beta2 ** self.t
        for p, m, v in zip(self.params, self._m, self._v):
            if p.grad is None:
                continue
            g = p.grad
            if c.weight_decay > 0.0:
                g = g + c.weight_decay * p.data
            m *= c.beta1
            m += (1.0 - c.beta1) * g
            v *= c.beta2
            v += (1.0 - c.beta2) * (g * g)
            m_hat = m / bias1
            v_hat = v / bias2
            p.data -= (c.learning_rate * m_hat / (np.sqrt(v_hat) + c.eps)).astype(
                p.data.dtype)
