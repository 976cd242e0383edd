"""Scheduled-sampling rollouts over dataset segments.

A rollout steps a synthesizer through a short stretch of consecutive
frames. Control channels (trajectory, phase, gait, style) always come from
the recording; the pose fed at each step is drawn per segment from a
Bernoulli: with probability p the recorded pose, otherwise the model's own
previous output. Per-step losses accumulate over the rollout and
backpropagate in one pass, so gradients flow through the fed-back poses.

The driver `scheduled_rollout` is variant-agnostic; it consumes a
RolloutPlan built by `rollout_plan`, which closes over a model and one
batch of segments. Tests exercise the driver's branch arithmetic with
hand-built one-parameter plans. Feeding an output back means mapping it
from target-normalized to input-normalized space, a per-channel affine
precomputed from the dataset statistics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import ConfigError, NumericError, StateError
from ..features.dataset import MotionDataset
from ..features.pose_channels import pose_dim as skeleton_pose_dim
from ..features.trajectory import gait_block
from ..nn.tensor import Tensor, concat, stack


class RolloutData:
    """Normalized per-frame views of a dataset, shared across batches."""

    def __init__(self, ds: MotionDataset):
        self.ds = ds
        self.pose_dim = skeleton_pose_dim(ds.skeleton)
        full = np.concatenate([ds.pose, ds.traj], axis=1)
        self.in_norm = ds.stats.normalize_input(full).astype(np.float32)
        self.tgt_norm = ds.stats.normalize_target(full).astype(np.float32)
        self.phase = ds.phase.astype(np.float32)
        self.gait = np.stack([gait_block(row) for row in ds.traj])
        self.frame_style = ds.frame_style()
        # first frame of the owning clip, per frame
        self.clip_start = np.empty(ds.n_frames, dtype=np.int64)
        for c in range(ds.n_clips):
            lo, hi = int(ds.clip_offsets[c]), int(ds.clip_offsets[c + 1])
            self.clip_start[lo:hi] = lo

    @property
    def n_styles(self) -> int:
        return self.ds.n_styles


def epoch_segments(data: RolloutData, rollout_length: int,
                   rng: np.random.Generator) -> np.ndarray:
    """Shuffled segment start frames for one epoch.

    Segments tile each clip end to end with a fresh random offset, so over
    epochs every transition is trained on about once per pass without the
    cost of enumerating every possible start. A clip too short to fit a
    tiled segment after the offset still contributes one from its first
    frame.
    """
    offsets = data.ds.clip_offsets
    starts: list = []
    for c in range(data.ds.n_clips):
        lo, hi = int(offsets[c]), int(offsets[c + 1])
        last = hi - 1 - rollout_length     # frame t + rollout_length must exist
        if last < lo:
            continue
        first = lo + int(rng.integers(rollout_length))
        starts.extend(list(range(first, last + 1, rollout_length)) or [lo])
    if not starts:
        raise ConfigError(
            f"no clip is long enough for rollout_length {rollout_length}")
    out = np.asarray(starts, dtype=np.int64)
    rng.shuffle(out)
    return out


@dataclass
class SegmentBatch:
    """A batch of equal-length segments, addressed by start frame."""

    data: RolloutData
    starts: np.ndarray      # (B,) first frame t of each segment
    length: int             # steps per rollout

    @property
    def size(self) -> int:
        return len(self.starts)

    def fed_pose(self, k: int) -> np.ndarray:
        """(B, P) input-normalized recorded pose at frame t + k."""
        return self.data.in_norm[self.starts + k, :self.data.pose_dim]

    def traj(self, k: int) -> np.ndarray:
        return self.data.in_norm[self.starts + k, self.data.pose_dim:]

    def target(self, k: int) -> np.ndarray:
        """(B, D) target-normalized full channel row at frame t + k + 1."""
        return self.data.tgt_norm[self.starts + k + 1]

    def phase(self, k: int) -> np.ndarray:
        return self.data.phase[self.starts + k]

    def gait(self, k: int) -> np.ndarray:
        return self.data.gait[self.starts + k]

    def style(self) -> np.ndarray:
        out = np.zeros((self.size, self.data.n_styles), dtype=np.float32)
        out[np.arange(self.size),
            self.data.frame_style[self.starts]] = 1.0
        return out

    def seed_rows(self, span: int) -> np.ndarray:
        """(B, span, P) normalized poses for frames t - span .. t - 1.

        Frames before the segment's clip replicate the clip's first frame,
        matching the front-fill the window builder applies at inference.
        """
        p = self.data.pose_dim
        first = self.data.clip_start[self.starts]
        out = np.empty((self.size, span, p), dtype=np.float32)
        for j in range(span):
            idx = np.maximum(self.starts - (span - j), first)
            out[:, j] = self.data.in_norm[idx, :p]
        return out


def rollout_batches(data: RolloutData, starts: np.ndarray,
                    rollout_length: int, batch_size: int):
    """Chunk shuffled starts into SegmentBatch objects."""
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")
    for i in range(0, len(starts), batch_size):
        yield SegmentBatch(data, starts[i:i + batch_size], rollout_length)


@dataclass
class RolloutPlan:
    """Everything one scheduled rollout needs, normalized spaces throughout.

    gt_fed[k] is the recorded pose input for step k and targets[k] the
    regression target; step_fn maps (k, fed pose) to the model output and
    feedback_fn maps an output back to the next step's pose input. Plans
    that carry internal state (the conv window) are single use.
    """

    steps: int
    gt_fed: list
    targets: list
    step_fn: Callable[[int, Tensor], Tensor]
    feedback_fn: Callable[[Tensor], Tensor]


def scheduled_rollout(plan: RolloutPlan, p: float,
                      rng: np.random.Generator) -> Tensor:
    """Run one rollout; returns the summed per-step mean-squared loss.

    Each step draws per segment: with probability p it consumes the
    recorded pose, otherwise the previous model output. Step 0 always
    consumes the recorded pose (there is no output yet) but still burns
    its draws so the stream position does not depend on branch history.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigError(
            f"ground-truth probability must be in [0, 1], got {p}")
    total = None
    prev: Tensor | None = None
    for k in range(plan.steps):
        gt = plan.gt_fed[k]
        keep = rng.random(gt.shape[0]) < p      # True: feed recorded pose
        if prev is None or bool(keep.all()):
            fed = Tensor(gt)
        elif not keep.any():
            fed = prev
        else:
            mix = np.broadcast_to(keep[:, None], gt.shape).astype(gt.dtype)
            fed = prev * (1.0 - mix) + gt * mix
        y = plan.step_fn(k, fed)
        step_loss = (y - plan.targets[k]).square().mean()
        if not np.isfinite(step_loss.data):
            raise NumericError(f"non-finite rollout loss at step {k}")
        total = step_loss if total is None else total + step_loss
        if k + 1 < plan.steps:
            prev = plan.feedback_fn(y)
    return total


def _feedback_affine(meta) -> tuple[np.ndarray, np.ndarray]:
    # outputs are target-normalized, the next input wants input-normalized
    # pose channels; de-normalize then normalize collapses to one affine
    p = meta.pose_dim
    s = meta.stats
    scale = (s.target_std[:p] / s.input_std[:p]).astype(np.float32)
    shift = ((s.target_mean[:p] - s.input_mean[:p])
             / s.input_std[:p]).astype(np.float32)
    return scale, shift


def _make_feedback(meta) -> Callable[[Tensor], Tensor]:
    p = meta.pose_dim
    scale, shift = _feedback_affine(meta)

    def feedback_fn(y: Tensor) -> Tensor:
        return y.narrow(1, 0, p) * scale + shift

    return feedback_fn


def rollout_plan(model, batch: SegmentBatch, training: bool = False,
                 rng: np.random.Generator | None = None) -> RolloutPlan:
    """Build the plan for one batch of segments on the model's variant."""
    if model.variant == "phase":
        return _phase_plan(model, batch, training, rng)
    return _conv_plan(model, batch, training, rng)


def _phase_plan(model, batch, training, rng):
    steps = batch.length
    style = batch.style()
    trajs = [batch.traj(k) for k in range(steps)]
    # gating reads only control channels, so all blends are known up front
    blends = [model.blend_weights(batch.phase(k), batch.gait(k), style)
              for k in range(steps)]

    def step_fn(k: int, fed: Tensor) -> Tensor:
        x = concat([fed, Tensor(trajs[k])], axis=1)
        return model.regress(x, blends[k], training=training, rng=rng)

    return RolloutPlan(steps, [batch.fed_pose(k) for k in range(steps)],
                       [batch.target(k) for k in range(steps)],
                       step_fn, _make_feedback(model.meta))


def _conv_plan(model, batch, training, rng):
    steps = batch.length
    span = model.config.history_frames
    style = batch.style()
    trajs = [batch.traj(k) for k in range(steps)]
    seed = batch.seed_rows(span)
    rows = [Tensor(np.ascontiguousarray(seed[:, j])) for j in range(span)]

    def step_fn(k: int, fed: Tensor) -> Tensor:
        if len(rows) != span + k:
            raise StateError("conv rollout plan is single use")
        window = stack(rows[k:] + [fed], axis=1)
        rows.append(fed)
        blend = model.blend_weights(window, style)
        x = concat([fed, Tensor(trajs[k])], axis=1)
        return model.regress(x, blend, training=training, rng=rng)

    return RolloutPlan(steps, [batch.fed_pose(k) for k in range(steps)],
                       [batch.target(k) for k in range(steps)],
                       step_fn, _make_feedback(model.meta))
