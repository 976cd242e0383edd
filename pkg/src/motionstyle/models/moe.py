"""Mixture-of-experts regression network.

A stack of expert-blend layers: every layer holds several affine expert
parameter sets and evaluates them under per-sample blend weights supplied
by a gating network. Hidden layers use ELU and dropout; the final layer is
linear. Blend weights arrive per layer, so gating schemes that share one
weight vector across layers just repeat it.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DimensionError, NumericError
from ..nn.layers import ExpertBlendLayer, Module, dropout, elu
from ..nn.tensor import Tensor

MOE_LAYERS_DEFAULT = 3
MOE_HIDDEN_DEFAULT = 256
DROPOUT_DEFAULT = 0.4


class MoeNetwork(Module):
    def __init__(self, rng: np.random.Generator, in_dim: int, out_dim: int,
                 n_experts: int, n_layers: int = MOE_LAYERS_DEFAULT,
                 hidden: int = MOE_HIDDEN_DEFAULT,
                 dropout_rate: float = DROPOUT_DEFAULT):
        if n_layers < 1:
            raise ConfigError(f"mixture network needs >= 1 layer, got {n_layers}")
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.n_experts = n_experts
        self.n_layers = n_layers
        self.dropout_rate = dropout_rate
        dims = [in_dim] + [hidden] * (n_layers - 1) + [out_dim]
        self.layers = [ExpertBlendLayer(rng, n_experts, dims[i], dims[i + 1])
                       for i in range(n_layers)]

    def forward(self, x: Tensor, blend: Tensor, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        """Run the stack; blend is (B, n_layers, n_experts)."""
        batch = x.shape[0]
        if blend.shape != (batch, self.n_layers, self.n_experts):
            raise DimensionError(
                f"blend weights must be ({batch}, {self.n_layers}, "
                f"{self.n_experts}), got {blend.shape}")
        if not np.all(np.isfinite(blend.data)):
            raise NumericError("non-finite expert blend weights reached the "
                               "mixture network")
        if training and self.dropout_rate > 0.0 and rng is None:
            raise ConfigError("training forward with dropout needs an rng")
        h = x
        for i, layer in enumerate(self.layers):
            weights = blend.narrow(1, i, 1).reshape(batch, self.n_experts)
            h = layer.forward(h, weights)
            if i < self.n_layers - 1:
                h = elu(h)
                h = dropout(h, self.dropout_rate, rng, training)
            if not np.all(np.isfinite(h.data)):
                raise NumericError(
                    f"non-finite activations after mixture layer {i}")
        return h
