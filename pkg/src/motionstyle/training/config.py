"""Training configuration and the per-run report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..errors import ConfigError
from ..models import ModelConfig
from ..nn.optim import OptimizerConfig


@dataclass(frozen=True)
class SamplingSchedule:
    """Per-epoch probability of feeding ground truth during rollouts.

    The probability moves linearly from p_start at epoch 0 to p_end at
    epoch ramp_epochs and holds there. The default fades ground truth out
    (1 down to 0), easing the model onto its own predictions. reverse=True
    runs the ramp the other way, p_end to p_start, which with the default
    endpoints grows the ground-truth probability from 0 to 1.
    """

    p_start: float = 1.0
    p_end: float = 0.0
    ramp_epochs: int = 10
    reverse: bool = False

    def validated(self) -> "SamplingSchedule":
        for name in ("p_start", "p_end"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if self.ramp_epochs < 1:
            raise ConfigError(
                f"ramp_epochs must be >= 1, got {self.ramp_epochs}")
        return self

    def probability(self, epoch: int) -> float:
        start, end = (self.p_end, self.p_start) if self.reverse \
            else (self.p_start, self.p_end)
        if epoch >= self.ramp_epochs:
            return end
        return start + (end - start) * (epoch / self.ramp_epochs)


@dataclass(frozen=True)
class TrainConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    batch_size: int = 64
    epochs: int = 100
    rollout_length: int = 8
    schedule: SamplingSchedule = field(default_factory=SamplingSchedule)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 0

    def validated(self) -> "TrainConfig":
        if self.rollout_length < 2:
            raise ConfigError(
                f"rollout_length must be >= 2, got {self.rollout_length}")
        for name in ("batch_size", "epochs"):
            if getattr(self, name) < 1:
                raise ConfigError(
                    f"{name} must be >= 1, got {getattr(self, name)}")
        self.schedule.validated()
        return replace(self, model=self.model.validated())


@dataclass
class TrainReport:
    """Summary of one training run; losses are per-epoch batch means."""

    epoch_loss: list
    epoch_p: list
    wall_seconds: float
    checkpoint_path: str | None = None
