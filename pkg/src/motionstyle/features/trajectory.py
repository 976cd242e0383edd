"""Root/gait trajectory sampling around a frame.

13 samples spanning -1 s .. +1 s at 1/6 s spacing; sample 6 is the current
frame. Each sample carries planar position (2), planar facing direction (2),
and a gait one-hot over {stand, walk, run} (3), all in the current frame's
root coordinate. Out-of-clip samples clamp to the first/last frame.
"""

from __future__ import annotations

import numpy as np

from ..motion import quat
from ..motion.skeleton import MotionClip, STAND, WALK

N_SAMPLES = 13
CURRENT = 6
SAMPLE_SECONDS = 1.0 / 6.0
GAIT_DIM = 3
SAMPLE_DIM = 2 + 2 + GAIT_DIM
TRAJ_DIM = N_SAMPLES * SAMPLE_DIM


def gait_one_hot(action: int) -> np.ndarray:
    g = np.zeros(GAIT_DIM, dtype=np.float32)
    g[0 if action == STAND else 1 if action == WALK else 2] = 1.0
    return g


def extract_trajectory(clip: MotionClip, t: int) -> np.ndarray:
    """(13, 7) trajectory around frame t, rows [px, pz, dx, dz, g0, g1, g2]."""
    if clip.action_labels is None:
        raise ValueError("clip has no action labels")
    step = max(1, int(round(SAMPLE_SECONDS / clip.frame_time)))
    n = clip.n_frames
    yaw_t = float(quat.yaw_of(clip.local_quats[t, 0]))
    inv = quat.yaw_quat(-yaw_t)
    origin = clip.root_pos[t].copy()
    origin[1] = 0.0

    out = np.zeros((N_SAMPLES, SAMPLE_DIM), dtype=np.float32)
    for k in range(N_SAMPLES):
        f = int(np.clip(t + (k - CURRENT) * step, 0, n - 1))
        pos = clip.root_pos[f].copy()
        pos[1] = 0.0
        rel = quat.rotate(inv, pos - origin)
        fwd = quat.rotate(inv, quat.rotate(clip.local_quats[f, 0],
                                           np.array([0.0, 0.0, 1.0])))
        d = np.array([fwd[0], fwd[2]])
        norm = np.linalg.norm(d)
        d = d / norm if norm > 1e-8 else np.array([0.0, 1.0])
        out[k, 0:2] = [rel[0], rel[2]]
        out[k, 2:4] = d
        out[k, 4:] = gait_one_hot(int(clip.action_labels[f]))
    out[CURRENT, 0:2] = 0.0
    out[CURRENT, 2:4] = [0.0, 1.0]
    return out


def flatten_trajectory(traj: np.ndarray) -> np.ndarray:
    return np.asarray(traj, dtype=np.float32).reshape(-1)


def gait_block(traj_flat: np.ndarray) -> np.ndarray:
    """The 13x3 gait one-hots from a flattened trajectory, as one 39-vector."""
    rows = np.asarray(traj_flat).reshape(N_SAMPLES, SAMPLE_DIM)
    return rows[:, 4:].reshape(-1)
