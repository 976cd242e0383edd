"""Flattened pose channels for one frame.

Layout for a J-joint skeleton (9J + 3 channels):
  [0, 3J)        root-frame joint positions (x, y, z per joint; planar root
                 position removed, yaw removed, world height kept)
  [3J, 9J)       joint rotations as (forward, up) 6-vectors; joint 0 is the
                 root's orientation relative to its yaw frame, the rest are
                 local joint rotations
  [9J, 9J + 3)   root planar velocity: forward-frame (dx, dz) from the
                 previous frame plus yaw delta (radians); zeros at frame 0

The layout keeps every channel continuous under yaw-invariant motion so it
can be regressed directly.
"""

from __future__ import annotations

import numpy as np

from ..motion import quat
from ..motion.skeleton import MotionClip, Skeleton


def pose_dim(skeleton: Skeleton) -> int:
    return 9 * skeleton.n_joints + 3


def clip_pose_channels(clip: MotionClip) -> np.ndarray:
    """(F, 9J+3) float32 pose channels for every frame of a clip."""
    skeleton = clip.skeleton
    n_frames = clip.n_frames
    n_j = skeleton.n_joints
    world_p, _ = clip.world()
    root_quat = clip.local_quats[:, 0]
    yaw = quat.yaw_of(root_quat)

    inv_yaw = quat.yaw_quat(-yaw)
    planar = clip.root_pos.copy()
    planar[:, 1] = 0.0
    rel = quat.rotate(inv_yaw[:, None, :], world_p - planar[:, None, :])

    quats = clip.local_quats.copy()
    quats[:, 0] = quat.multiply(inv_yaw, root_quat)
    quats = quat.align_hemisphere(quats)
    sixd = quat.to_rot6d(quats)

    vel = np.zeros((n_frames, 3))
    if n_frames > 1:
        dpos = clip.root_pos[1:] - clip.root_pos[:-1]
        dpos[:, 1] = 0.0
        local = quat.rotate(inv_yaw[:-1], dpos)
        dyaw = np.arctan2(np.sin(yaw[1:] - yaw[:-1]),
                          np.cos(yaw[1:] - yaw[:-1]))
        vel[1:, 0] = local[:, 0]
        vel[1:, 1] = local[:, 2]
        vel[1:, 2] = dyaw

    out = np.concatenate([rel.reshape(n_frames, 3 * n_j),
                          sixd.reshape(n_frames, 6 * n_j), vel], axis=1)
    return out.astype(np.float32)


def split_pose(vec: np.ndarray, n_joints: int
               ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """pose vector -> (positions (J,3), rot6d (J,6), velocity (3,))."""
    p = vec[:3 * n_joints].reshape(n_joints, 3)
    r = vec[3 * n_joints:9 * n_joints].reshape(n_joints, 6)
    v = vec[9 * n_joints:9 * n_joints + 3]
    return p, r, v


def advance_root(x: float, z: float, yaw: float,
                 vel: np.ndarray) -> tuple[float, float, float]:
    """Integrate one frame of (dx, dz, dyaw) expressed in the current yaw frame."""
    fwd = quat.yaw_quat(yaw)
    d = quat.rotate(fwd, np.array([vel[0], 0.0, vel[1]]))
    return x + float(d[0]), z + float(d[2]), yaw + float(vel[2])


def pose_to_world(vec: np.ndarray, skeleton: Skeleton, x: float, z: float,
                  yaw: float) -> tuple[np.ndarray, np.ndarray]:
    """Decode a pose vector at a given root transform.

    Returns (world joint positions (J,3), local joint quats (J,4)); the
    root's quat is re-composed with the yaw frame.
    """
    n_j = skeleton.n_joints
    rel, sixd, _ = split_pose(vec, n_j)
    q_yaw = quat.yaw_quat(yaw)
    world = quat.rotate(q_yaw, rel.astype(np.float64)) + np.array([x, 0.0, z])
    local = quat.from_rot6d(sixd.astype(np.float64))
    local = quat.normalize(local)
    local[0] = quat.multiply(q_yaw, local[0])
    return world, local
