"""Style embeddings and modulation of expert blend weights.

A style is a vector over the style vocabulary: one-hot during training,
any convex combination at runtime (blending styles means blending their
embeddings). The modulator turns a style vector into a per-slot scale and
shift applied elementwise to the gating network's output, where a slot is
one (mixture layer, expert) pair. Freshly constructed it is the identity
(scale 1, shift 0), so an untrained modulator leaves the gating untouched
and the network behaves identically for every style.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DimensionError
from ..nn.layers import Module
from ..nn.tensor import Parameter, Tensor


class StyleModulator(Module):
    """Elementwise affine remap of gating outputs, driven by the style vector.

    scale(s) = s @ Ws + bs and shift(s) = s @ Wm + bm are single affine maps;
    with one-hot s each style owns one row of each weight matrix. Outputs are
    unconstrained reals on purpose: blend weights are not renormalized after
    modulation.
    """

    def __init__(self, n_styles: int, n_slots: int):
        if n_styles < 1 or n_slots < 1:
            raise ConfigError(
                f"modulator needs n_styles >= 1 and n_slots >= 1, "
                f"got {n_styles}, {n_slots}")
        self.n_styles = n_styles
        self.n_slots = n_slots
        zeros = np.zeros((n_styles, n_slots), dtype=np.float32)
        self.scale_weight = Parameter(zeros.copy())
        self.scale_bias = Parameter(np.ones(n_slots, dtype=np.float32))
        self.shift_weight = Parameter(zeros.copy())
        self.shift_bias = Parameter(np.zeros(n_slots, dtype=np.float32))

    def scale_shift(self, style: Tensor) -> tuple[Tensor, Tensor]:
        if style.ndim != 2 or style.shape[1] != self.n_styles:
            raise DimensionError(
                f"style batch must be (B, {self.n_styles}), got {style.shape}")
        scale = style @ self.scale_weight + self.scale_bias
        shift = style @ self.shift_weight + self.shift_bias
        return scale, shift

    def forward(self, blend: Tensor, style: Tensor) -> Tensor:
        """Apply scale(style) * blend + shift(style), blend (B, n_slots)."""
        if blend.ndim != 2 or blend.shape[1] != self.n_slots:
            raise DimensionError(
                f"blend batch must be (B, {self.n_slots}), got {blend.shape}")
        scale, shift = self.scale_shift(style)
        return scale * blend + shift


def blend_styles(s1: np.ndarray, s2: np.ndarray, lam: float) -> np.ndarray:
    """Convex combination (1 - lam) * s1 + lam * s2 of two style vectors."""
    s1 = np.asarray(s1, dtype=np.float32)
    s2 = np.asarray(s2, dtype=np.float32)
    if s1.shape != s2.shape:
        raise DimensionError(
            f"style vectors must share shape, got {s1.shape} and {s2.shape}")
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"style blend factor must be in [0, 1], got {lam}")
    return ((1.0 - lam) * s1 + lam * s2).astype(np.float32)


def phase_gait_input(phase: np.ndarray, gait: np.ndarray) -> np.ndarray:
    """Gating input: (sin 2*pi*p, cos 2*pi*p) Kronecker the gait block.

    phase (B,) and gait (B, G) give (B, 2G): the gait vector scaled by the
    sine component, then by the cosine component. Scalar phase with a 1-D
    gait vector returns the unbatched (2G,) form.
    """
    phase = np.asarray(phase, dtype=np.float32)
    gait = np.asarray(gait, dtype=np.float32)
    squeeze = phase.ndim == 0
    if squeeze:
        if gait.ndim != 1:
            raise DimensionError(
                f"scalar phase needs a 1-D gait vector, got {gait.shape}")
        phase = phase[None]
        gait = gait[None]
    if phase.ndim != 1 or gait.ndim != 2 or phase.shape[0] != gait.shape[0]:
        raise DimensionError(
            f"expected phase (B,) with gait (B, G), got {phase.shape} "
            f"and {gait.shape}")
    angle = 2.0 * np.pi * phase[:, None]
    out = np.concatenate([np.sin(angle) * gait, np.cos(angle) * gait], axis=1)
    out = out.astype(np.float32)
    return out[0] if squeeze else out
