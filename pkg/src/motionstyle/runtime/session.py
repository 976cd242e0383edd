"""Interactive generation session: one character driven by live controls.

A session owns everything one connected character needs: the pose history
the model feeds on, the integrated world root transform, the gait phase,
the active style ramp and the last control command. Each tick consumes the
current control state, builds the control trajectory, steps the model once
and appends the result, so identical command streams against the same
checkpoint and seed reproduce identical frame streams.

A numeric failure inside the model freezes the character: the session
enters a fault state, keeps emitting the last valid pose, and only a reset
clears it. Frozen frames keep the stream alive so a viewer shows a stuck
character instead of a dropped connection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DimensionError, NumericError
from ..features.pose_channels import advance_root, pose_to_world
from ..features.trajectory import (CURRENT, N_SAMPLES, SAMPLE_DIM,
                                   SAMPLE_SECONDS, gait_one_hot)
from ..models.modulation import blend_styles

GAITS = ("stand", "walk", "run")


@dataclass
class ControlState:
    """Latest steering command, in world coordinates."""

    direction: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 1.0]))  # unit planar (x, z)
    speed: float = 0.0
    gait: int = 0

    def __post_init__(self):
        self.direction = np.asarray(self.direction, dtype=np.float64)
        if self.direction.shape != (2,):
            raise DimensionError(
                f"direction must be a planar 2-vector, got "
                f"{self.direction.shape}")
        norm = float(np.linalg.norm(self.direction))
        if norm > 1e-8:
            self.direction = self.direction / norm
        if not 0 <= self.gait < len(GAITS):
            raise ConfigError(f"gait index {self.gait} out of range")
        if not self.speed >= 0.0:
            raise ConfigError(f"speed must be >= 0, got {self.speed}")


class StyleRamp:
    """Linear ramp between two style embeddings, advanced one tick at a time.

    After k ticks the blend factor is k / (fps * duration), capped at 1, so
    it reaches exactly 1 on tick ceil(fps * duration) and stays there.
    """

    def __init__(self, source: np.ndarray, target: np.ndarray, fps: float,
                 duration_s: float):
        if duration_s <= 0.0:
            raise ConfigError(f"duration_s must be > 0, got {duration_s}")
        self.source = np.asarray(source, dtype=np.float32)
        self.target = np.asarray(target, dtype=np.float32)
        self.denom = float(fps) * float(duration_s)
        self.ramp_frames = math.ceil(self.denom)
        self.ticks = 0

    @staticmethod
    def idle(style: np.ndarray) -> "StyleRamp":
        ramp = StyleRamp(style, style, fps=1.0, duration_s=1.0)
        ramp.ticks = ramp.ramp_frames
        return ramp

    @property
    def lam(self) -> float:
        return min(self.ticks / self.denom, 1.0)

    def advance(self) -> None:
        if self.ticks < self.ramp_frames:
            self.ticks += 1

    def value(self) -> np.ndarray:
        return blend_styles(self.source, self.target, self.lam)


@dataclass
class FrameUpdate:
    """One tick's output, ready to be serialized or recorded."""

    t: int
    pose: np.ndarray         # raw pose channels of the emitted frame
    root_pos: np.ndarray     # (3,) world
    root_quat: np.ndarray    # (4,) world
    joint_pos: np.ndarray    # (J, 3) world
    joint_quats: np.ndarray  # (J, 4) local, root row composed with yaw
    experts: np.ndarray      # (n_layers, n_experts) blend telemetry
    lam: float
    overruns: int
    faulted: bool = False
    fault: str = ""
    fault_is_new: bool = False


def _stationary_trajectory() -> np.ndarray:
    rows = np.zeros((N_SAMPLES, SAMPLE_DIM), dtype=np.float32)
    rows[:, 3] = 1.0
    rows[:, 4:] = gait_one_hot(0)
    return rows.reshape(-1)


class SessionState:
    """Mutable per-connection state; the model itself is shared read-only."""

    def __init__(self, model, fps: float | None = None, seed: int = 0):
        self.model = model
        self.fps = float(fps) if fps else float(model.meta.fps)
        if self.fps <= 0:
            raise ConfigError(f"fps must be > 0, got {self.fps}")
        self.seed = int(seed)
        # frames between trajectory samples at the serving rate
        self.sample_step = max(1, int(round(self.fps * SAMPLE_SECONDS)))
        # phase advance per tick, rescaled from the training frame rate
        self.phase_step = float(model.meta.walk_phase_rate) * \
            float(model.meta.fps) / self.fps
        self._restart(seed)

    def _restart(self, seed: int) -> None:
        meta = self.model.meta
        self.seed = int(seed)
        self.t = 0
        seed_pose = meta.stats.input_mean[:meta.pose_dim].astype(np.float32)
        seed_pose = seed_pose.copy()
        seed_pose[9 * meta.skeleton.n_joints:] = 0.0   # start standing still
        self.history = [seed_pose]
        self.history_cap = self.model.config.history_frames + 1
        self.root_x, self.root_z, self.root_yaw = 0.0, 0.0, 0.0
        self.phase = 0.0
        self.control = ControlState()
        self.ramp = StyleRamp.idle(self._one_hot(0))
        self.traj_pred = _stationary_trajectory()
        self.track = [(0.0, 0.0, 0.0, 0)]
        self.track_cap = CURRENT * self.sample_step + 1
        self.fault = ""
        self.fault_reported = False
        self.overruns = 0
        self.last_experts = np.zeros(
            (self.model.config.n_moe_layers, self.model.config.n_experts),
            dtype=np.float32)

    def _one_hot(self, index: int) -> np.ndarray:
        style = np.zeros(self.model.meta.n_styles, dtype=np.float32)
        style[index] = 1.0
        return style

    # -- commands ----------------------------------------------------------

    def apply_control(self, control: ControlState) -> None:
        if float(np.linalg.norm(control.direction)) <= 1e-8:
            # a zero steer keeps the current heading
            control.direction = self.control.direction.copy()
        self.control = control

    def apply_style(self, weights: np.ndarray, duration_s: float) -> None:
        weights = np.asarray(weights, dtype=np.float32)
        if weights.shape != (self.model.meta.n_styles,):
            raise DimensionError(
                f"style weights must have shape "
                f"({self.model.meta.n_styles},), got {weights.shape}")
        if (weights < 0.0).any() or not np.isfinite(weights).all():
            raise ConfigError("style weights must be finite and >= 0")
        total = float(weights.sum())
        if total <= 0.0:
            raise ConfigError("style weights must not all be zero")
        # ramp from whatever blend is active now, so chained commands stay
        # continuous
        self.ramp = StyleRamp(self.ramp.value(), weights / total, self.fps,
                              duration_s)

    def reset(self, seed: int) -> None:
        self._restart(seed)

    # -- per-tick work -----------------------------------------------------

    def predict_control_trajectory(self) -> np.ndarray:
        """(13, 7) control rows in the current root frame.

        Past samples replay the recorded root track; future samples blend
        the model's own last prediction toward the commanded heading and
        speed, halving the model's weight per sample step so near samples
        stay smooth and far samples obey the user.
        """
        rows = np.zeros((N_SAMPLES, SAMPLE_DIM), dtype=np.float32)
        cos_y = math.cos(self.root_yaw)
        sin_y = math.sin(self.root_yaw)

        def to_local(wx: float, wz: float) -> tuple[float, float]:
            # inverse yaw rotation about +Y applied to a planar vector
            return (cos_y * wx - sin_y * wz, sin_y * wx + cos_y * wz)

        for k in range(CURRENT):
            back = (CURRENT - k) * self.sample_step
            x, z, yaw, gait = self.track[max(len(self.track) - 1 - back, 0)]
            rows[k, 0:2] = to_local(x - self.root_x, z - self.root_z)
            dyaw = yaw - self.root_yaw
            rows[k, 2:4] = (math.sin(dyaw), math.cos(dyaw))
            rows[k, 4:] = gait_one_hot(gait)

        rows[CURRENT, 2:4] = (0.0, 1.0)
        rows[CURRENT, 4:] = gait_one_hot(self.control.gait)

        pred = self.traj_pred.reshape(N_SAMPLES, SAMPLE_DIM)
        target_dir = np.array(to_local(self.control.direction[0],
                                       self.control.direction[1]))
        if np.linalg.norm(target_dir) <= 1e-8:
            target_dir = np.array([0.0, 1.0])
        gait_row = gait_one_hot(self.control.gait)
        for k in range(CURRENT + 1, N_SAMPLES):
            ahead = k - CURRENT
            w = 0.5 ** ahead
            target_pos = target_dir * self.control.speed * \
                (ahead * SAMPLE_SECONDS)
            rows[k, 0:2] = w * pred[k, 0:2] + (1.0 - w) * target_pos
            d = w * pred[k, 2:4] + (1.0 - w) * target_dir
            norm = float(np.linalg.norm(d))
            rows[k, 2:4] = d / norm if norm > 1e-8 else (0.0, 1.0)
            rows[k, 4:] = gait_row
        return rows

    def _frozen_frame(self, fault_is_new: bool) -> FrameUpdate:
        pose = self.history[-1]
        world, local = pose_to_world(pose, self.model.meta.skeleton,
                                     self.root_x, self.root_z, self.root_yaw)
        self.t += 1
        return FrameUpdate(
            t=self.t, pose=pose.copy(), root_pos=world[0].copy(),
            root_quat=local[0].copy(), joint_pos=world, joint_quats=local,
            experts=self.last_experts.copy(), lam=self.ramp.lam,
            overruns=self.overruns, faulted=True, fault=self.fault,
            fault_is_new=fault_is_new)

    def tick(self) -> FrameUpdate:
        """Advance the session by one frame and return what to draw."""
        if self.fault:
            return self._frozen_frame(fault_is_new=False)

        self.ramp.advance()
        style = self.ramp.value()
        traj = self.predict_control_trajectory().reshape(-1)
        try:
            if self.model.variant == "phase":
                pose, traj_pred, blend = self.model.step(
                    self.history[-1], traj, float(self.phase), style)
            else:
                pose, traj_pred, blend = self.model.step(
                    np.stack(self.history), traj, style)
        except NumericError as exc:
            self.fault = str(exc)
            return self._frozen_frame(fault_is_new=True)

        self.history.append(pose)
        del self.history[:-self.history_cap]
        self.traj_pred = traj_pred
        self.last_experts = blend
        if GAITS[self.control.gait] != "stand":
            self.phase = (self.phase + self.phase_step) % 1.0

        meta = self.model.meta
        vel = pose[9 * meta.skeleton.n_joints:]
        self.root_x, self.root_z, self.root_yaw = advance_root(
            self.root_x, self.root_z, self.root_yaw, vel)
        self.track.append((self.root_x, self.root_z, self.root_yaw,
                           self.control.gait))
        del self.track[:-self.track_cap]
        self.t += 1

        world, local = pose_to_world(pose, meta.skeleton, self.root_x,
                                     self.root_z, self.root_yaw)
        return FrameUpdate(
            t=self.t, pose=pose.copy(), root_pos=world[0].copy(),
            root_quat=local[0].copy(), joint_pos=world, joint_quats=local,
            experts=blend.copy(), lam=self.ramp.lam, overruns=self.overruns)
