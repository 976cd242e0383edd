"""Stylized motion replay: autoregressive reconstruction of corpus clips.

The model is seeded with a clip's first frame and stepped to the clip's
end with ground-truth control channels; only pose feeds back. The error
series e(t) is the per-channel mean squared error of the de-normalized
pose prediction against the ground-truth frame it displaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..features.dataset import MotionDataset
from .drive import ControlScript, drive

DIVERGENCE_LIMIT = 1e4


@dataclass
class ReplayResult:
    style: str
    variant: str
    clip_name: str
    errors: np.ndarray  # (T,) float64, e(t) for predicted frames 1..T
    mse: float
    diverged: bool


def replay_eval(model, ds: MotionDataset, clip_index: int) -> ReplayResult:
    """Replay one clip; divergence is recorded, never raised."""
    if not 0 <= clip_index < ds.n_clips:
        raise ConfigError(
            f"clip index {clip_index} out of range for {ds.n_clips} clips")
    lo = int(ds.clip_offsets[clip_index])
    hi = int(ds.clip_offsets[clip_index + 1])
    if hi - lo < 2:
        raise ConfigError(
            f"clip {ds.clip_names[clip_index]!r} is too short to replay")
    style_index = int(ds.clip_style[clip_index])
    onehot = ds.style_onehot(style_index)

    steps = hi - 1 - lo
    script = ControlScript(
        traj=ds.traj[lo:hi - 1], phase=ds.phase[lo:hi - 1],
        styles=np.broadcast_to(onehot, (steps, onehot.shape[0])))
    out = drive(model, ds.pose[lo], script)

    done = out.pose.shape[0]
    truth = ds.pose[lo + 1:lo + 1 + done].astype(np.float64)
    diff = out.pose.astype(np.float64) - truth
    errors = (diff * diff).mean(axis=1) if done else np.zeros(0)
    diverged = (not out.completed) or bool((errors > DIVERGENCE_LIMIT).any())
    mse = float(errors.mean()) if done else float("inf")
    return ReplayResult(
        style=ds.style_names[style_index], variant=model.variant,
        clip_name=ds.clip_names[clip_index], errors=errors, mse=mse,
        diverged=diverged)


def replay_suite(model, ds: MotionDataset) -> list:
    """One ReplayResult per clip, in dataset order."""
    return [replay_eval(model, ds, c) for c in range(ds.n_clips)]


def style_mse(results) -> dict:
    """Frame-weighted replay MSE per style name."""
    pooled: dict = {}
    for r in results:
        pooled.setdefault(r.style, []).append(r.errors)
    return {style: float(np.concatenate(chunks).mean())
            for style, chunks in pooled.items()}
