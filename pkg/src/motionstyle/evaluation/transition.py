"""Online style transfer: switch styles mid-walk and judge the seam.

The model walks a fixed control script in the source style; at a trigger
frame the style vector starts a linear one-second ramp toward the target.
The verdict needs both halves: the final stretch must be recognized as the
target style, and the ramp must not have torn the pose apart, measured as
the largest per-frame joint displacement against the pre-trigger baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..features.dataset import MotionDataset
from ..models.modulation import blend_styles
from .classifier import StyleClassifier
from .drive import ControlScript, drive, walking_script

CONTINUITY_FACTOR = 3.0
FINAL_WINDOW_SECONDS = 2.0


@dataclass
class TransitionResult:
    variant: str
    source: str
    target: str
    lambdas: np.ndarray      # (F,) ramp value the model saw at each frame
    continuity: float        # max joint displacement across the ramp
    steady_state: float      # same statistic over the pre-trigger second
    continuity_factor: float
    classified: str
    completed: bool
    passed: bool


def style_ramp(n_frames: int, trigger: int, fps: float,
               duration_s: float = 1.0) -> np.ndarray:
    """lambda per frame: 0 before the trigger, then k/(fps*duration) capped."""
    k = np.arange(n_frames, dtype=np.float64) - trigger
    return np.clip(k / (fps * duration_s), 0.0, 1.0)


def max_joint_displacement(pose: np.ndarray, n_joints: int) -> np.ndarray:
    """(F-1,) largest root-frame joint move between consecutive frames."""
    pos = np.asarray(pose, dtype=np.float64)[:, :3 * n_joints]
    pos = pos.reshape(pos.shape[0], n_joints, 3)
    return np.linalg.norm(pos[1:] - pos[:-1], axis=2).max(axis=1)


def _style_index(ds: MotionDataset, name: str) -> int:
    if name not in ds.style_names:
        raise ConfigError(
            f"unknown style {name!r}, dataset has {ds.style_names}")
    return ds.style_names.index(name)


def transition_eval(model, ds: MotionDataset, source: str, target: str,
                    classifier: StyleClassifier, trigger_s: float = 2.0,
                    settle_s: float = 1.0,
                    duration_s: float = 1.0) -> TransitionResult:
    """Walk in `source`, ramp to `target` over `duration_s`, judge the run.

    The script is steady-walk controls lifted from the source style's
    clip, long enough for a warm-up, a pre-trigger baseline second, the
    ramp, a settle gap and the classified final window.
    """
    i1 = _style_index(ds, source)
    i2 = _style_index(ds, target)
    fps = ds.fps
    trigger = int(round(trigger_s * fps))
    if trigger < 2:
        raise ConfigError(f"trigger_s {trigger_s} leaves no baseline frames")
    ramp = math.ceil(fps * duration_s)
    total = trigger + ramp + int(round(settle_s * fps)) + \
        int(round(FINAL_WINDOW_SECONDS * fps))

    window = walking_script(ds, i1, total)
    lambdas = style_ramp(total, trigger, fps, duration_s)
    o1, o2 = ds.style_onehot(i1), ds.style_onehot(i2)
    styles = np.stack([blend_styles(o1, o2, float(lam)) for lam in lambdas])
    script = ControlScript(traj=window.traj, phase=window.phase,
                           styles=styles)

    out = drive(model, window.seed_pose, script)
    completed = out.completed and out.pose.shape[0] == total
    if not completed:
        return TransitionResult(
            variant=model.variant, source=source, target=target,
            lambdas=lambdas, continuity=float("inf"),
            steady_state=float("inf"), continuity_factor=CONTINUITY_FACTOR,
            classified="", completed=False, passed=False)

    n_j = ds.skeleton.n_joints
    disp = max_joint_displacement(out.pose, n_j)
    # disp[i] is the move into frame i+1; the ramp touches frames
    # trigger+1 .. trigger+ramp, the baseline is the second before it
    baseline_lo = max(trigger - int(round(fps)), 0)
    steady = float(disp[baseline_lo:trigger].max())
    continuity = float(disp[trigger:trigger + ramp].max())

    tail = int(round(FINAL_WINDOW_SECONDS * fps))
    classified = classifier.classify_stream(out.pose[-tail:], n_j)
    passed = (classified == i2 and
              continuity < CONTINUITY_FACTOR * steady)
    return TransitionResult(
        variant=model.variant, source=source, target=target,
        lambdas=lambdas, continuity=continuity, steady_state=steady,
        continuity_factor=CONTINUITY_FACTOR,
        classified=ds.style_names[classified], completed=True, passed=passed)
