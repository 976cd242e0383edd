"""The synthesizer model variants and their single-frame step functions.

All variants share the same mixture-of-experts regressor over the current
frame's normalized pose and control-trajectory channels, and differ only in
where the expert blend weights come from:

  phase     gating reads the locomotion phase (sin/cos encoded) crossed
            with the trajectory's gait block; one weight vector is shared
            by every mixture layer
  tcn       gating reads a causal-convolution summary of the recent pose
            window and emits separate weights per mixture layer
  tcn_win   tcn with window instance normalization inside the encoder

In every case the raw blend weights pass through the style modulator, so
one set of experts serves all styles with per-style scale and shift. Steps
take raw (de-normalized) channels and return raw channels; dataset
statistics are applied at this boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError, DimensionError, NumericError
from ..features.dataset import DatasetStats, MotionDataset
from ..features.pose_channels import pose_dim as skeleton_pose_dim
from ..features.trajectory import GAIT_DIM, N_SAMPLES, gait_block
from ..motion.skeleton import Skeleton
from ..nn.layers import Dense, Module, elu
from ..nn.tensor import Tensor, no_grad, stack
from .moe import DROPOUT_DEFAULT, MOE_HIDDEN_DEFAULT, MOE_LAYERS_DEFAULT, MoeNetwork
from .modulation import StyleModulator, phase_gait_input
from .tcn import (TCN_CHANNELS_DEFAULT, TCN_KERNEL_DEFAULT, TcnEncoder,
                  window_from_history)
from .win import check_std_floor

VARIANTS = ("phase", "tcn", "tcn_win")

GATING_HIDDEN_DEFAULT = 128
HISTORY_FRAMES_DEFAULT = 30


@dataclass(frozen=True)
class ModelConfig:
    variant: str = "phase"
    n_experts: int = 4
    n_moe_layers: int = MOE_LAYERS_DEFAULT
    moe_hidden: int = MOE_HIDDEN_DEFAULT
    gating_hidden: int = GATING_HIDDEN_DEFAULT
    dropout_rate: float = DROPOUT_DEFAULT
    tcn_channels: tuple[int, ...] = TCN_CHANNELS_DEFAULT
    tcn_kernel: int = TCN_KERNEL_DEFAULT
    history_frames: int = HISTORY_FRAMES_DEFAULT
    win_std_floor: float = 0.3

    def validated(self) -> "ModelConfig":
        if self.variant not in VARIANTS:
            raise ConfigError(
                f"unknown variant {self.variant!r}, expected one of {VARIANTS}")
        for name in ("n_experts", "n_moe_layers", "moe_hidden",
                     "gating_hidden", "tcn_kernel", "history_frames"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not self.tcn_channels:
            raise ConfigError("tcn_channels must name at least one layer")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(
                f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        check_std_floor(self.win_std_floor)
        return replace(self, tcn_channels=tuple(self.tcn_channels))


@dataclass(frozen=True)
class ModelMeta:
    """Dataset-derived context a model carries around for inference."""
    stats: DatasetStats
    style_names: tuple[str, ...]
    skeleton: Skeleton
    fps: float
    walk_phase_rate: float

    @property
    def n_styles(self) -> int:
        return len(self.style_names)

    @property
    def pose_dim(self) -> int:
        return skeleton_pose_dim(self.skeleton)

    @property
    def input_dim(self) -> int:
        return len(self.stats.input_mean)

    @property
    def traj_dim(self) -> int:
        return self.input_dim - self.pose_dim

    @staticmethod
    def from_dataset(ds: MotionDataset) -> "ModelMeta":
        return ModelMeta(stats=ds.stats, style_names=tuple(ds.style_names),
                         skeleton=ds.skeleton, fps=float(ds.fps),
                         walk_phase_rate=float(ds.walk_phase_rate))


class GatingNetwork(Module):
    """Two ELU hidden layers to a linear blend-weight output."""

    def __init__(self, rng: np.random.Generator, in_dim: int, hidden: int,
                 out_dim: int):
        self.hidden1 = Dense(rng, in_dim, hidden)
        self.hidden2 = Dense(rng, hidden, hidden)
        self.out = Dense(rng, hidden, out_dim)

    def forward(self, x: Tensor) -> Tensor:
        h = elu(self.hidden1.forward(x))
        h = elu(self.hidden2.forward(h))
        return self.out.forward(h)


def _as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(np.asarray(x, dtype=np.float32))


class _SynthesizerBase(Module):
    variant = ""

    def __init__(self, config: ModelConfig, meta: ModelMeta,
                 rng: np.random.Generator):
        self.config = config
        self.meta = meta
        self.moe = MoeNetwork(
            rng, in_dim=len(meta.stats.input_mean),
            out_dim=len(meta.stats.target_mean), n_experts=config.n_experts,
            n_layers=config.n_moe_layers, hidden=config.moe_hidden,
            dropout_rate=config.dropout_rate)

    # -- shared plumbing ---------------------------------------------------

    def check_style(self, style: np.ndarray) -> np.ndarray:
        style = np.asarray(style, dtype=np.float32)
        if style.shape != (self.meta.n_styles,):
            raise DimensionError(
                f"style vector must have shape ({self.meta.n_styles},) for "
                f"styles {self.meta.style_names}, got {style.shape}")
        return style

    def regress(self, x: Tensor, blend: Tensor, training: bool = False,
                rng: np.random.Generator | None = None) -> Tensor:
        return self.moe.forward(x, blend, training=training, rng=rng)

    def _finish_step(self, x_norm: np.ndarray, blend: Tensor
                     ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        y = self.moe.forward(_as_tensor(x_norm[None]), blend)
        y_raw = self.meta.stats.denormalize_target(y.numpy()[0])
        if not np.all(np.isfinite(y_raw)):
            raise NumericError("non-finite de-normalized model output")
        split = self.meta.pose_dim
        return (y_raw[:split].astype(np.float32),
                y_raw[split:].astype(np.float32),
                blend.numpy()[0].copy())

    def normalize_pose_window(self, window: np.ndarray) -> np.ndarray:
        split = self.meta.pose_dim
        mean = self.meta.stats.input_mean[:split]
        std = self.meta.stats.input_std[:split]
        return ((window - mean) / std).astype(np.float32)


class PhaseGatedSynthesizer(_SynthesizerBase):
    """Blend weights from phase and gait; shared across mixture layers."""

    variant = "phase"

    def __init__(self, config: ModelConfig, meta: ModelMeta,
                 rng: np.random.Generator):
        super().__init__(config, meta, rng)
        gating_in = 2 * GAIT_DIM * N_SAMPLES
        self.gating = GatingNetwork(rng, gating_in, config.gating_hidden,
                                    config.n_experts)
        self.modulator = StyleModulator(meta.n_styles, config.n_experts)

    def blend_weights(self, phase: np.ndarray, gait: np.ndarray,
                      style: np.ndarray) -> Tensor:
        """(B,), (B, G), (B, S) -> modulated weights (B, n_layers, n_experts)."""
        raw = self.gating.forward(_as_tensor(phase_gait_input(phase, gait)))
        mod = self.modulator.forward(raw, _as_tensor(style))
        return stack([mod] * self.config.n_moe_layers, axis=1)

    def step(self, pose: np.ndarray, traj: np.ndarray, phase: float,
             style: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """One generation step from raw channels.

        Returns (next pose channels, next trajectory channels, blend-weight
        telemetry of shape (n_layers, n_experts)).
        """
        style = self.check_style(style)
        pose = np.asarray(pose, dtype=np.float32)
        traj = np.asarray(traj, dtype=np.float32)
        if pose.shape != (self.meta.pose_dim,) or traj.shape != (self.meta.traj_dim,):
            raise DimensionError(
                f"expected pose ({self.meta.pose_dim},) and trajectory "
                f"({self.meta.traj_dim},), got {pose.shape} and {traj.shape}")
        x_norm = self.meta.stats.normalize_input(np.concatenate([pose, traj]))
        with no_grad():
            blend = self.blend_weights(
                np.array([phase], dtype=np.float32), gait_block(traj)[None],
                style[None])
            return self._finish_step(x_norm, blend)


class ConvGatedSynthesizer(_SynthesizerBase):
    """Blend weights from an encoded pose-history window, per mixture layer."""

    def __init__(self, config: ModelConfig, meta: ModelMeta,
                 rng: np.random.Generator, use_win: bool):
        super().__init__(config, meta, rng)
        self.variant = "tcn_win" if use_win else "tcn"
        self.encoder = TcnEncoder(
            rng, meta.pose_dim, channels=config.tcn_channels,
            kernel=config.tcn_kernel, use_win=use_win,
            eps=config.win_std_floor)
        n_slots = config.n_moe_layers * config.n_experts
        self.gating = GatingNetwork(rng, self.encoder.out_dim,
                                    config.gating_hidden, n_slots)
        self.modulator = StyleModulator(meta.n_styles, n_slots)

    def blend_weights(self, window, style: np.ndarray) -> Tensor:
        """(B, W, pose_dim) normalized window -> (B, n_layers, n_experts)."""
        raw = self.gating.forward(self.encoder.encode(_as_tensor(window)))
        mod = self.modulator.forward(raw, _as_tensor(style))
        return mod.reshape(mod.shape[0], self.config.n_moe_layers,
                           self.config.n_experts)

    def step(self, history: np.ndarray, traj: np.ndarray, style: np.ndarray
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """One generation step from a raw pose-history buffer.

        history is (H, pose_dim) oldest-first with H >= 1; its last row is
        the current pose. The caller owns the buffer and appends the
        returned pose itself. Returns the same triple as the phase variant.
        """
        style = self.check_style(style)
        history = np.asarray(history, dtype=np.float32)
        traj = np.asarray(traj, dtype=np.float32)
        if history.ndim != 2 or history.shape[1] != self.meta.pose_dim:
            raise DimensionError(
                f"history must be (H, {self.meta.pose_dim}), got {history.shape}")
        if traj.shape != (self.meta.traj_dim,):
            raise DimensionError(
                f"trajectory must be ({self.meta.traj_dim},), got {traj.shape}")
        window = window_from_history(history, self.config.history_frames)
        x_norm = self.meta.stats.normalize_input(
            np.concatenate([history[-1], traj]))
        with no_grad():
            blend = self.blend_weights(
                self.normalize_pose_window(window)[None], style[None])
            return self._finish_step(x_norm, blend)


def build_model(config: ModelConfig, meta: ModelMeta, seed: int = 0):
    """Construct an untrained synthesizer of the configured variant."""
    config = config.validated()
    rng = np.random.default_rng(seed)
    if config.variant == "phase":
        return PhaseGatedSynthesizer(config, meta, rng)
    return ConvGatedSynthesizer(config, meta, rng,
                                use_win=config.variant == "tcn_win")


def model_from_dataset(config: ModelConfig, ds: MotionDataset, seed: int = 0):
    return build_model(config, ModelMeta.from_dataset(ds), seed=seed)
