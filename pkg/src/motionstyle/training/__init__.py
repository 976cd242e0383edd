"""Scheduled-sampling training for the synthesizer variants."""

from .config import SamplingSchedule, TrainConfig, TrainReport
from .rollout import (RolloutData, RolloutPlan, SegmentBatch, epoch_segments,
                      rollout_batches, rollout_plan, scheduled_rollout)
from .trainer import TELEMETRY_COLUMNS, train

__all__ = [
    "RolloutData",
    "RolloutPlan",
    "SamplingSchedule",
    "SegmentBatch",
    "TELEMETRY_COLUMNS",
    "TrainConfig",
    "TrainReport",
    "epoch_segments",
    "rollout_batches",
    "rollout_plan",
    "scheduled_rollout",
    "train",
]
