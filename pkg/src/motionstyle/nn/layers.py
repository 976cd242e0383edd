"""Neural network building blocks on top of the autodiff Tensor.

Layers are small classes owning Parameters; stateless math lives in module
functions. All random decisions (init, dropout masks) take an explicit
numpy Generator so runs are reproducible from a seed.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError
from .tensor import Parameter, Tensor


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int,
                   shape: tuple[int, ...]) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(np.float32)


def elu(x: Tensor) -> Tensor:
    """Exponential linear unit: x for x > 0, exp(x) - 1 otherwise."""
    pos = x.data > 0
    # expm1 runs on every element before where() selects, so feed the
    # positive side zeros to keep large activations from overflowing
    out_data = np.where(pos, x.data, np.expm1(np.where(pos, 0.0, x.data)))

    def backward(g: np.ndarray) -> None:
        if x.requires_grad:
            x._accumulate(g * np.where(pos, 1.0, out_data + 1.0))

    return Tensor._make(out_data, (x,), backward)


def identity(x: Tensor) -> Tensor:
    return x


def dropout(x: Tensor, rate: float, rng: np.random.Generator,
            training: bool) -> Tensor:
    """Inverted dropout: zero a fraction `rate`, scale the rest by 1/(1-rate)."""
    if not training or rate <= 0.0:
        return x
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must be in [0, 1): {rate}")
    mask = (rng.random(x.shape) >= rate).astype(x.data.dtype) / (1.0 - rate)
    return x * Tensor(mask)


class Module:
    """Base with parameter discovery through attribute walk."""

    def named_parameters(self, prefix: str = "") -> dict[str, Parameter]:
        out: dict[str, Parameter] = {}
        for key, value in self.__dict__.items():
            name = f"{prefix}{key}"
            if isinstance(value, Parameter):
                out[name] = value
            elif isinstance(value, Module):
                out.update(value.named_parameters(f"{name}."))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Parameter):
                        out[f"{name}.{i}"] = item
                    elif isinstance(item, Module):
                        out.update(item.named_parameters(f"{name}.{i}."))
        return out

    def parameters(self) -> list[Parameter]:
        return list(self.named_parameters().values())


class Dense(Module):
    """Affine map y = x @ w + b with optional activation."""

    def __init__(self, rng: np.random.Generator, in_dim: int, out_dim: int):
        self.weight = Parameter(glorot_uniform(rng, in_dim, out_dim,
                                               (in_dim, out_dim)))
        self.bias = Parameter(np.zeros(out_dim, dtype=np.float32))

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 2 or x.shape[1] != self.weight.shape[0]:
            raise DimensionError(
                f"dense expects (B, {self.weight.shape[0]}), got {x.shape}")
        return x @ self.weight + self.bias


class ExpertBlendLayer(Module):
    """Mixture-of-experts affine layer.

    Holds N expert weight matrices and biases. The per-sample output is the
    expert outputs blended by coefficients alpha:

        y_b = sum_n alpha[b, n] * (x_b @ W_n + b_n)

    which equals applying the alpha-blended parameters as a single affine map.
    Both routes are implemented; `forward` (blend outputs, one GEMM over all
    experts) carries gradients for training, `forward_premixed` (blend the
    parameters, then apply once) is the plain-numpy reference used at runtime
    and in equivalence tests.
    """

    def __init__(self, rng: np.random.Generator, n_experts: int, in_dim: int,
                 out_dim: int):
        self.n_experts = n_experts
        self.in_dim = in_dim
        self.out_dim = out_dim
        w = np.stack([glorot_uniform(rng, in_dim, out_dim, (in_dim, out_dim))
                      for _ in range(n_experts)], axis=1)
        # stored as (in_dim, n_experts * out_dim) so one matmul evaluates all
        # experts at once
        self.weight = Parameter(w.reshape(in_dim, n_experts * out_dim))
        self.bias = Parameter(np.zeros((n_experts, out_dim), dtype=np.float32))

    def forward(self, x: Tensor, alpha: Tensor) -> Tensor:
        batch = x.shape[0]
        if alpha.shape != (batch, self.n_experts):
            raise DimensionError(
                f"alpha must be ({batch}, {self.n_experts}), got {alpha.shape}")
        pre = (x @ self.weight).reshape(batch, self.n_experts, self.out_dim)
        pre = pre + self.bias
        return (pre * alpha.reshape(batch, self.n_experts, 1)).sum(axis=1)

    def forward_premixed(self, x: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        w = self.weight.data.reshape(self.in_dim, self.n_experts, self.out_dim)
        w_mix = np.einsum("bn,ino->bio", alpha, w)
        y = np.einsum("bio,bi->bo", w_mix, x)
        return y + alpha @ self.bias.data


class CausalConv1d(Module):
    """1-D convolution over time that only looks backward.

    Input (B, T, C_in), kernel (K, C_in, C_out). Output frame t is
    sum_k x[t - k] @ w[k], with x[t] = 0 for t < 0, so output length equals
    input length and frame t never depends on frames after t.
    """

    def __init__(self, rng: np.random.Generator, in_dim: int, out_dim: int,
                 kernel: int, bias: bool = True):
        self.kernel = kernel
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.weight = Parameter(glorot_uniform(
            rng, kernel * in_dim, kernel * out_dim, (kernel, in_dim, out_dim)))
        self.bias = Parameter(np.zeros(out_dim, dtype=np.float32)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        out = causal_conv1d(x, self.weight)
        if self.bias is not None:
            out = out + self.bias
        return out


def causal_conv1d(x: Tensor, w: Tensor) -> Tensor:
    """out[b, t, o] = sum_{k, i} x[b, t-k, i] * w[k, i, o], zero-padded past."""
    if x.ndim != 3 or w.ndim != 3:
        raise DimensionError("causal_conv1d expects x (B, T, C_in), w (K, C_in, C_out)")
    batch, steps, c_in = x.shape
    kernel, w_in, c_out = w.shape
    if w_in != c_in:
        raise DimensionError(f"channel mismatch: x has {c_in}, kernel has {w_in}")

    padded = np.zeros((batch, steps + kernel - 1, c_in), dtype=x.data.dtype)
    padded[:, kernel - 1:] = x.data
    # windows[b, t, i, k] = padded[b, t + k, i]; kernel index k multiplies
    # frame t - k, i.e. windows reversed along k
    windows = np.lib.stride_tricks.sliding_window_view(padded, kernel, axis=1)
    col = windows[..., ::-1].transpose(0, 1, 3, 2).reshape(
        batch * steps, kernel * c_in)
    col = np.ascontiguousarray(col)
    w_flat = w.data.reshape(kernel * c_in, c_out)
    out_data = (col @ w_flat).reshape(batch, steps, c_out)

    def backward(g: np.ndarray) -> None:
        g_flat = g.reshape(batch * steps, c_out)
        if w.requires_grad:
            w._accumulate((col.T @ g_flat).reshape(kernel, c_in, c_out))
        if x.requires_grad:
            dcol = (g_flat @ w_flat.T).reshape(batch, steps, kernel, c_in)
            dpadded = np.zeros_like(padded)
            for k in range(kernel):
                dpadded[:, kernel - 1 - k:kernel - 1 - k + steps] += dcol[:, :, k]
            x._accumulate(dpadded[:, kernel - 1:])

    return Tensor._make(out_data, (x, w), backward)
