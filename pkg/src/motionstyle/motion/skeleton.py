"""Skeleton model, forward kinematics, motion clip container."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, MappingError
from . import quat

STAND, WALK = 0, 1
ACTION_NAMES = ("stand", "walk")
# contact label columns
L_HEEL, L_TOE, R_HEEL, R_TOE = 0, 1, 2, 3


@dataclass(frozen=True)
class Joint:
    name: str
    parent: int                      # -1 for the root
    offset: tuple[float, float, float]
    channels: tuple[str, ...] = ()   # BVH channel names, in file order


class Skeleton:
    """Ordered joint list, topologically sorted (parent index < own index)."""

    def __init__(self, joints: list[Joint],
                 end_sites: dict[int, tuple[float, float, float]] | None = None):
        if not joints or joints[0].parent != -1:
            raise MappingError("first joint must be the root (parent -1)")
        for i, j in enumerate(joints[1:], start=1):
            if not 0 <= j.parent < i:
                raise MappingError(
                    f"joint {j.name!r} parent index {j.parent} not before it")
        self.joints = list(joints)
        self.end_sites = dict(end_sites or {})
        self.names = [j.name for j in joints]
        self.parents = np.array([j.parent for j in joints], dtype=np.int64)
        self.offsets = np.array([j.offset for j in joints], dtype=np.float32)
        self._index = {j.name: i for i, j in enumerate(joints)}

    @property
    def n_joints(self) -> int:
        return len(self.joints)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise MappingError(f"no joint named {name!r}") from None

    def children(self, i: int) -> list[int]:
        return [j for j in range(self.n_joints) if self.parents[j] == i]

    def chain_to_root(self, i: int) -> list[int]:
        out = []
        while i >= 0:
            out.append(i)
            i = int(self.parents[i])
        return out

    def forward_kinematics(self, root_pos: np.ndarray,
                           local_quats: np.ndarray
                           ) -> tuple[np.ndarray, np.ndarray]:
        """World positions and orientations for every joint.

        root_pos (..., 3), local_quats (..., J, 4) -> ((..., J, 3), (..., J, 4)).
        """
        root_pos = np.asarray(root_pos, dtype=np.float64)
        local_quats = np.asarray(local_quats, dtype=np.float64)
        if local_quats.shape[-2] != self.n_joints:
            raise DimensionError(
                f"expected {self.n_joints} joints, got {local_quats.shape[-2]}")
        world_p = np.zeros(local_quats.shape[:-1] + (3,))
        world_q = np.zeros_like(local_quats)
        world_p[..., 0, :] = root_pos
        world_q[..., 0, :] = local_quats[..., 0, :]
        for j in range(1, self.n_joints):
            p = int(self.parents[j])
            world_q[..., j, :] = quat.multiply(world_q[..., p, :],
                                               local_quats[..., j, :])
            world_p[..., j, :] = world_p[..., p, :] + quat.rotate(
                world_q[..., p, :], self.offsets[j].astype(np.float64))
        return world_p, world_q


@dataclass
class MotionFrame:
    """One pose: root transform, per-joint local rotations, derived worlds."""
    root_pos: np.ndarray          # (3,)
    local_quats: np.ndarray       # (J, 4)
    world_pos: np.ndarray         # (J, 3), derived
    world_quats: np.ndarray       # (J, 4), derived

    @property
    def root_quat(self) -> np.ndarray:
        return self.local_quats[0]


@dataclass
class MotionClip:
    """A motion sequence on one skeleton, with optional labels."""
    skeleton: Skeleton
    root_pos: np.ndarray          # (F, 3)
    local_quats: np.ndarray       # (F, J, 4)
    frame_time: float
    name: str = ""
    style_label: str = ""
    action_labels: np.ndarray | None = None    # (F,) int, STAND/WALK
    contact_labels: np.ndarray | None = None   # (F, 4) bool
    _world: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, repr=False, compare=False)

    def __post_init__(self):
        self.root_pos = np.asarray(self.root_pos, dtype=np.float64)
        self.local_quats = np.asarray(self.local_quats, dtype=np.float64)
        if self.local_quats.ndim != 3 or self.local_quats.shape[2] != 4:
            raise DimensionError("local_quats must be (F, J, 4)")
        if self.root_pos.shape != (self.local_quats.shape[0], 3):
            raise DimensionError("root_pos must be (F, 3)")

    @property
    def n_frames(self) -> int:
        return self.root_pos.shape[0]

    @property
    def fps(self) -> float:
        return 1.0 / self.frame_time

    def world(self) -> tuple[np.ndarray, np.ndarray]:
        """Cached (world positions (F, J, 3), world quats (F, J, 4))."""
        if self._world is None:
            self._world = self.skeleton.forward_kinematics(self.root_pos,
                                                           self.local_quats)
        return self._world

    def invalidate(self) -> None:
        self._world = None

    def frame(self, i: int) -> MotionFrame:
        wp, wq = self.world()
        return MotionFrame(self.root_pos[i], self.local_quats[i], wp[i], wq[i])

    def copy(self) -> "MotionClip":
        return MotionClip(
            skeleton=self.skeleton,
            root_pos=self.root_pos.copy(),
            local_quats=self.local_quats.copy(),
            frame_time=self.frame_time,
            name=self.name,
            style_label=self.style_label,
            action_labels=None if self.action_labels is None
            else self.action_labels.copy(),
            contact_labels=None if self.contact_labels is None
            else self.contact_labels.copy(),
        )


def default_character() -> Skeleton:
    """The 18-joint target rig (root included), T-pose, meters, +Y up, +Z forward."""
    hip_h = 0.98
    j = [
        Joint("hips", -1, (0.0, hip_h, 0.0)),
        Joint("spine", 0, (0.0, 0.25, 0.0)),
        Joint("neck", 1, (0.0, 0.30, 0.0)),
        Joint("head", 2, (0.0, 0.15, 0.0)),
        Joint("left_shoulder", 1, (0.20, 0.25, 0.0)),
        Joint("left_elbow", 4, (0.28, 0.0, 0.0)),
        Joint("left_wrist", 5, (0.26, 0.0, 0.0)),
        Joint("right_shoulder", 1, (-0.20, 0.25, 0.0)),
        Joint("right_elbow", 7, (-0.28, 0.0, 0.0)),
        Joint("right_wrist", 8, (-0.26, 0.0, 0.0)),
        Joint("left_hip", 0, (0.10, -0.05, 0.0)),
        Joint("left_knee", 10, (0.0, -0.45, 0.0)),
        Joint("left_ankle", 11, (0.0, -0.40, 0.0)),
        Joint("left_toe", 12, (0.0, -0.08, 0.14)),
        Joint("right_hip", 0, (-0.10, -0.05, 0.0)),
        Joint("right_knee", 14, (0.0, -0.45, 0.0)),
        Joint("right_ankle", 15, (0.0, -0.40, 0.0)),
        Joint("right_toe", 16, (0.0, -0.08, 0.14)),
    ]
    ends = {3: (0.0, 0.15, 0.0), 6: (0.10, 0.0, 0.0), 9: (-0.10, 0.0, 0.0),
            13: (0.0, 0.0, 0.08), 17: (0.0, 0.0, 0.08)}
    return Skeleton(j, ends)


CONTACT_JOINTS = ("left_ankle", "left_toe", "right_ankle", "right_toe")
