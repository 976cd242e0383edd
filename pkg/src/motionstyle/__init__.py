"""Online multi-style motion synthesis.

Style-conditioned next-frame motion models (phase-gated mixture of experts
and temporal-convolution gating, with optional window normalization), a BVH
data pipeline with retargeting, a scheduled-sampling trainer, evaluation
harness, and a real-time interactive runtime.
"""

__version__ = "0.1.0"

__all__ = ["MotionSynthesizer", "__version__"]


def __getattr__(name):
    if name == "MotionSynthesizer":
        from .estimator import MotionSynthesizer
        return MotionSynthesizer
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
