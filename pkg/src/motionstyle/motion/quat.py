"""Quaternion helpers.

Quaternions are stored (x, y, z, w) matching scipy.spatial.transform, unit
norm, Hamilton convention. Functions are vectorized over leading axes.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.transform import Rotation

IDENTITY = np.array([0.0, 0.0, 0.0, 1.0], dtype=np.float32)


def normalize(q: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(q, axis=-1, keepdims=True)
    return q / np.maximum(n, 1e-12)


def multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product a*b, scalar-last storage."""
    ax, ay, az, aw = np.moveaxis(a, -1, 0)
    bx, by, bz, bw = np.moveaxis(b, -1, 0)
    return np.stack([
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
        aw * bw - ax * bx - ay * by - az * bz,
    ], axis=-1)


def conjugate(q: np.ndarray) -> np.ndarray:
    out = np.array(q, copy=True)
    out[..., :3] *= -1
    return out


def rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vectors v by quaternions q (broadcasting over leading axes)."""
    qv = q[..., :3]
    w = q[..., 3:4]
    t = 2.0 * np.cross(qv, v)
    return v + w * t + np.cross(qv, t)


def from_euler_deg(order: str, angles_deg: np.ndarray) -> np.ndarray:
    return Rotation.from_euler(order, angles_deg, degrees=True).as_quat()


def to_euler_deg(order: str, q: np.ndarray) -> np.ndarray:
    return Rotation.from_quat(q).as_euler(order, degrees=True)


def from_rotvec(rv: np.ndarray) -> np.ndarray:
    return Rotation.from_rotvec(rv).as_quat()


def to_matrix(q: np.ndarray) -> np.ndarray:
    return Rotation.from_quat(np.reshape(q, (-1, 4))).as_matrix().reshape(
        q.shape[:-1] + (3, 3))


def from_matrix(m: np.ndarray) -> np.ndarray:
    return Rotation.from_matrix(np.reshape(m, (-1, 3, 3))).as_quat().reshape(
        m.shape[:-2] + (4,))


def yaw_of(q: np.ndarray) -> np.ndarray:
    """Heading angle about +Y of the rotated forward axis (+Z), radians."""
    f = rotate(q, np.array([0.0, 0.0, 1.0]))
    return np.arctan2(f[..., 0], f[..., 2])


def yaw_quat(yaw) -> np.ndarray:
    """Rotation about +Y by `yaw` radians."""
    yaw = np.asarray(yaw)
    half = yaw / 2.0
    zeros = np.zeros_like(half)
    return np.stack([zeros, np.sin(half), zeros, np.cos(half)], axis=-1)


def align_hemisphere(quats: np.ndarray) -> np.ndarray:
    """Flip signs along the frame axis so consecutive quats have dot >= 0.

    quats: (F, ..., 4); q and -q encode the same rotation, the flip just
    makes the channel sequence continuous for regression.
    """
    out = np.array(quats, copy=True)
    for f in range(1, out.shape[0]):
        dots = np.sum(out[f] * out[f - 1], axis=-1, keepdims=True)
        out[f] = np.where(dots < 0, -out[f], out[f])
    return out


def to_rot6d(q: np.ndarray) -> np.ndarray:
    """Rotation as (forward, up) = (3rd, 2nd) matrix columns, 6 channels."""
    m = to_matrix(q)
    return np.concatenate([m[..., :, 2], m[..., :, 1]], axis=-1)


def from_rot6d(sixd: np.ndarray) -> np.ndarray:
    """Invert to_rot6d with Gram-Schmidt re-orthonormalization."""
    f = sixd[..., 0:3]
    u = sixd[..., 3:6]
    z = f / np.maximum(np.linalg.norm(f, axis=-1, keepdims=True), 1e-12)
    u = u - np.sum(u * z, axis=-1, keepdims=True) * z
    y = u / np.maximum(np.linalg.norm(u, axis=-1, keepdims=True), 1e-12)
    x = np.cross(y, z)
    m = np.stack([x, y, z], axis=-1)
    return from_matrix(m)
