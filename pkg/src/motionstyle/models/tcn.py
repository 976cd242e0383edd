"""Causal temporal-convolution encoder over a pose-channel window.

Summarizes the recent pose history into one feature vector: a stack of
causal 1-D convolutions runs over the window and the last timestep's
activations are the summary. Window edges are padded by replicating the
earliest frame, so a constant window stays constant through every layer
(and normalizes to exactly zero when window normalization is on).

With use_win set, each convolution's output passes window_instance_norm
before bias and activation. The window statistics make the feature scale
independent, which is what lets one encoder serve styles of very different
motion energy.
"""

from __future__ import annotations

import numpy as np

from ..errors import DimensionError, StateError
from ..nn.layers import CausalConv1d, Module, elu
from ..nn.tensor import Parameter, Tensor, concat
from .win import window_instance_norm

TCN_CHANNELS_DEFAULT = (128, 128, 64)
TCN_KERNEL_DEFAULT = 5


class _ConvBlock(Module):
    """One causal conv layer; bias applied after optional normalization."""

    def __init__(self, rng: np.random.Generator, in_dim: int, out_dim: int,
                 kernel: int):
        self.kernel = kernel
        self.conv = CausalConv1d(rng, in_dim, out_dim, kernel, bias=False)
        self.bias = Parameter(np.zeros(out_dim, dtype=np.float32))

    def forward(self, x: Tensor, use_win: bool, eps: float) -> Tensor:
        steps = x.shape[1]
        first = x.narrow(1, 0, 1)
        padded = concat([first] * (self.kernel - 1) + [x], axis=1)
        # the conv zero-pads internally; dropping the first kernel-1 output
        # positions leaves exactly the replicate-padded result for the window
        y = self.conv.forward(padded).narrow(1, self.kernel - 1, steps)
        if use_win:
            y = window_instance_norm(y, eps)
        return elu(y + self.bias)


class TcnEncoder(Module):
    """Stack of causal conv blocks; encode() returns the last-frame feature."""

    def __init__(self, rng: np.random.Generator, in_dim: int,
                 channels: tuple[int, ...] = TCN_CHANNELS_DEFAULT,
                 kernel: int = TCN_KERNEL_DEFAULT, use_win: bool = False,
                 eps: float = 0.3):
        if kernel < 1 or not channels:
            raise DimensionError("encoder needs kernel >= 1 and >= 1 layer")
        self.in_dim = in_dim
        self.out_dim = channels[-1]
        self.use_win = use_win
        self.eps = float(eps)
        dims = (in_dim,) + tuple(channels)
        self.blocks = [_ConvBlock(rng, dims[i], dims[i + 1], kernel)
                       for i in range(len(channels))]

    def features(self, window: Tensor) -> Tensor:
        """Full per-frame feature sequence (B, W, out_dim) for the window."""
        if window.ndim != 3 or window.shape[2] != self.in_dim:
            raise DimensionError(
                f"encoder expects (B, W, {self.in_dim}), got {window.shape}")
        if window.shape[1] == 0:
            raise StateError("encoder got an empty window")
        h = window
        for block in self.blocks:
            h = block.forward(h, self.use_win, self.eps)
        return h

    def encode(self, window: Tensor) -> Tensor:
        """Summary feature (B, out_dim) at the window's final frame."""
        h = self.features(window)
        steps = h.shape[1]
        return h.narrow(1, steps - 1, 1).reshape(h.shape[0], self.out_dim)


def window_from_history(history: np.ndarray, span: int) -> np.ndarray:
    """Last span+1 frames of history, front-filled with the earliest frame.

    history is (H, C) with H >= 1; the result is always (span+1, C). A short
    history replicates its first frame, a long one is truncated to the tail.
    """
    history = np.asarray(history, dtype=np.float32)
    if history.ndim != 2 or history.shape[0] == 0:
        raise StateError(
            f"history must be (H >= 1, C) to build a window, got "
            f"{history.shape}")
    length = span + 1
    tail = history[-length:]
    if tail.shape[0] == length:
        return tail
    pad = np.repeat(tail[:1], length - tail.shape[0], axis=0)
    return np.concatenate([pad, tail], axis=0)
