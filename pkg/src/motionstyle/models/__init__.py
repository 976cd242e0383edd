"""Synthesizer model variants, style modulation, and checkpointing."""

from .checkpoint import (load_checkpoint, read_checkpoint, save_checkpoint,
                         write_checkpoint)
from .moe import MoeNetwork
from .modulation import StyleModulator, blend_styles, phase_gait_input
from .tcn import TcnEncoder, window_from_history
from .variants import (VARIANTS, ConvGatedSynthesizer, GatingNetwork,
                       ModelConfig, ModelMeta, PhaseGatedSynthesizer,
                       build_model, model_from_dataset)
from .win import STD_FLOOR_DEFAULT, STD_FLOOR_RANGE, window_instance_norm

__all__ = [
    "VARIANTS", "ModelConfig", "ModelMeta", "MoeNetwork", "StyleModulator",
    "TcnEncoder", "PhaseGatedSynthesizer", "ConvGatedSynthesizer",
    "GatingNetwork", "blend_styles", "phase_gait_input", "build_model",
    "model_from_dataset", "window_from_history", "window_instance_norm",
    "STD_FLOOR_DEFAULT", "STD_FLOOR_RANGE", "save_checkpoint",
    "load_checkpoint", "write_checkpoint", "read_checkpoint",
]
