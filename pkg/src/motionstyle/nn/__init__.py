from .tensor import Parameter, Tensor, concat, gradient_check, no_grad, stack
from .layers import (CausalConv1d, Dense, ExpertBlendLayer, Module,
                     causal_conv1d, dropout, elu, glorot_uniform, identity)
from .optim import Adam, OptimizerConfig

__all__ = [
    "Adam", "CausalConv1d", "Dense", "ExpertBlendLayer", "Module",
    "OptimizerConfig", "Parameter", "Tensor", "causal_conv1d", "concat",
    "dropout", "elu", "glorot_uniform", "gradient_check", "identity",
    "no_grad", "stack",
]
