"""Free-running generation under a scripted control stream.

A control script fixes, per frame, the trajectory channels, the phase and
the style vector the model will see; only the pose autoregresses. Replay
scripts are whole-clip slices of ground-truth controls, transfer and
interpolation scripts are steady-walk slices with the style column edited.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, NumericError
from ..features.dataset import MotionDataset
from ..motion.skeleton import WALK


@dataclass(frozen=True)
class ControlScript:
    """Per-frame model inputs: raw trajectory rows, phase, style weights."""

    traj: np.ndarray    # (F, TRAJ_DIM)
    phase: np.ndarray   # (F,)
    styles: np.ndarray  # (F, S)

    @property
    def n_frames(self) -> int:
        return self.traj.shape[0]


@dataclass(frozen=True)
class WalkWindow:
    """A steady-walk control slice lifted from one corpus clip."""

    start_frame: int    # dataset frame index of the seed pose
    seed_pose: np.ndarray
    traj: np.ndarray
    phase: np.ndarray


@dataclass
class DriveResult:
    pose: np.ndarray    # (F_done, pose_dim) raw channels
    blends: np.ndarray  # (F_done, n_layers, n_experts) telemetry
    completed: bool     # False when the model went non-finite mid-run


def walking_script(ds: MotionDataset, style_index: int, n_frames: int,
                   margin_s: float = 0.5) -> WalkWindow:
    """Controls for `n_frames` of steady walking in the given style.

    Takes the style's first clip, trims `margin_s` seconds off each end of
    its walk segment to drop the speed-ramp frames, and returns the leading
    slice. The seed pose is the ground-truth frame just before the slice's
    first prediction target.
    """
    if n_frames < 1:
        raise ConfigError(f"script length must be >= 1, got {n_frames}")
    clip_ids = np.flatnonzero(ds.clip_style == style_index)
    if clip_ids.size == 0:
        raise ConfigError(f"no clips with style index {style_index}")
    c = int(clip_ids[0])
    lo, hi = int(ds.clip_offsets[c]), int(ds.clip_offsets[c + 1])
    walk = np.flatnonzero(ds.action[lo:hi] == WALK)
    if walk.size == 0:
        raise ConfigError(f"clip {ds.clip_names[c]!r} never walks")
    margin = int(round(margin_s * ds.fps))
    a = lo + int(walk[0]) + margin
    b = lo + int(walk[-1]) + 1 - margin
    if b - a < n_frames:
        raise ConfigError(
            f"style {ds.style_names[style_index]!r} has {max(b - a, 0)} "
            f"steady walk frames, need {n_frames}")
    return WalkWindow(start_frame=a, seed_pose=ds.pose[a],
                      traj=ds.traj[a:a + n_frames],
                      phase=ds.phase[a:a + n_frames])


def drive(model, seed_pose: np.ndarray, script: ControlScript) -> DriveResult:
    """Run the model for the script's length, feeding back its own poses.

    The seed pose fills the history; generated frame k is the model's
    prediction made under the script's frame-k controls. A non-finite model
    output truncates the run instead of raising, so evaluations can record
    the failure.
    """
    if script.n_frames == 0:
        raise ConfigError("empty control script")
    if script.phase.shape[0] != script.n_frames or \
            script.styles.shape[0] != script.n_frames:
        raise ConfigError(
            f"script arrays disagree on length: traj {script.n_frames}, "
            f"phase {script.phase.shape[0]}, styles {script.styles.shape[0]}")

    phase_gated = model.variant == "phase"
    history = [np.asarray(seed_pose, dtype=np.float32)]
    keep = 1 if phase_gated else int(model.config.history_frames) + 1
    poses, blends = [], []
    completed = True
    for k in range(script.n_frames):
        try:
            if phase_gated:
                pose, _, blend = model.step(history[-1], script.traj[k],
                                            float(script.phase[k]),
                                            script.styles[k])
            else:
                pose, _, blend = model.step(np.stack(history), script.traj[k],
                                            script.styles[k])
        except NumericError:
            completed = False
            break
        poses.append(pose)
        blends.append(blend)
        history.append(pose)
        del history[:-keep]

    if poses:
        return DriveResult(np.stack(poses), np.stack(blends), completed)
    width = seed_pose.shape[-1]
    return DriveResult(np.zeros((0, width), dtype=np.float32),
                       np.zeros((0, 0, 0), dtype=np.float32), completed)
