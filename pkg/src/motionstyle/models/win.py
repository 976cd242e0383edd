"""Instance normalization over a sliding temporal window.

Normalizes each feature channel by the mean and sample standard deviation
computed across the frames of one window, with a floor on the deviation so
channels that barely move are damped toward zero instead of being amplified
to unit variance. That floor is what keeps low-energy styles (a shuffle, a
crouch) from being blown up to the scale of high-energy ones.
"""

from __future__ import annotations

from ..errors import ConfigError, DimensionError
from ..nn.tensor import Tensor

STD_FLOOR_DEFAULT = 0.3
# floor outside this band either stops damping small motion or crushes
# ordinary motion; enforced wherever a floor value enters from config
STD_FLOOR_RANGE = (0.1, 0.3)


def check_std_floor(eps: float) -> float:
    lo, hi = STD_FLOOR_RANGE
    if not lo <= eps <= hi:
        raise ConfigError(
            f"window-norm std floor must be in [{lo}, {hi}], got {eps}")
    return float(eps)


def window_instance_norm(f: Tensor, eps: float = STD_FLOOR_DEFAULT) -> Tensor:
    """Normalize (T, C) or (B, T, C) features per channel over the T axis.

    out = (f - mean) / max(sample_std, eps), sample_std with denominator
    T - 1. A single-frame window has no spread, so it normalizes to zero.
    """
    if eps <= 0.0:
        raise ConfigError(f"window-norm std floor must be positive, got {eps}")
    if f.ndim not in (2, 3):
        raise DimensionError(
            f"window_instance_norm expects (T, C) or (B, T, C), got {f.shape}")
    axis = f.ndim - 2
    steps = f.shape[axis]
    if steps == 0:
        raise DimensionError("window_instance_norm got an empty window")
    mean = f.sum(axis=axis, keepdims=True) * (1.0 / steps)
    centered = f - mean
    if steps == 1:
        return centered * (1.0 / eps)
    var = centered.square().sum(axis=axis, keepdims=True) * (1.0 / (steps - 1))
    return centered / var.sqrt().clip_min(eps)
