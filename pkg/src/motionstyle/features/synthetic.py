"""Procedural multi-style walking corpus on the 18-joint rig.

Each style yields two clips (counterclockwise and clockwise laps of a
circle) of `seconds_per_style` each: stand, ease into a cyclic walk with
planned footfalls, ease out, stand. Contact labels come from foot
height/speed thresholds on the generated motion; because stance feet are
planted exactly on their anchors the labels are clean.

Styles are parameterized by stride length, cadence, arm swing, torso lean,
and vertical bounce. A deterministic secondary oscillation (torso twist plus
shoulder sway) runs at an irrational multiple of the step frequency, so part
of each style's motion is predictable from recent frames but not from the
gait phase alone. Small seeded noise on the upper body adds variation
without touching contact timing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from ..motion import quat
from ..motion.skeleton import STAND, WALK, MotionClip, default_character

UPPER_LEG = 0.45
LOWER_LEG = 0.40
ANKLE_REST_Y = 0.08
HIP_LATERAL = 0.10
STAND_ROOT_Y = 0.95
WALK_ROOT_Y = 0.93
STEP_LIFT = 0.05
STANCE_DUTY = 0.6          # fraction of the per-foot cycle spent planted
ANCHOR_LEAD = 0.5          # footfall lands this many steps ahead of the root
STAND_PAD = 1.5            # seconds of stand at each clip end
EASE = 0.5                 # seconds to ramp walk speed in/out
SECONDARY_RATIO = 0.618    # secondary oscillation freq / step freq


@dataclass(frozen=True)
class StyleSpec:
    name: str
    stride_length: float   # meters advanced per step
    cadence: float         # steps per second
    arm_swing: float       # degrees of shoulder swing amplitude
    torso_lean: float      # degrees of constant forward spine lean
    bounce: float          # meters of vertical root oscillation


# the default styles share stride and cadence on purpose: their control
# trajectories and phase streams are then statistically identical, so the
# style vector is the only input that can explain how the poses differ
DEFAULT_STYLES = (
    StyleSpec("neutral", 0.50, 1.9, 25.0, 2.0, 0.025),
    StyleSpec("march", 0.50, 1.9, 60.0, 0.0, 0.060),
    StyleSpec("sneaky", 0.50, 1.9, 12.0, 18.0, 0.012),
    StyleSpec("proud", 0.50, 1.9, 40.0, -6.0, 0.040),
)


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def _rot_x(deg):
    return quat.from_euler_deg("X", float(deg))


def _solve_leg(hip_local: np.ndarray, ankle_local: np.ndarray
               ) -> tuple[np.ndarray, np.ndarray]:
    """Two-bone leg IK in the root frame (+Z forward, +X left, -Y down).

    Returns (hip quat, knee quat) with the knee hinging about local +X and
    the heel folding backward. Targets beyond reach are met by raising the
    ankle target vertically (a heel-rise), never by sliding it sideways.
    """
    target = ankle_local - hip_local
    max_len = UPPER_LEG + LOWER_LEG - 1e-4
    d2_planar = target[0] ** 2 + target[2] ** 2
    if d2_planar + target[1] ** 2 > max_len ** 2:
        drop = np.sqrt(max(max_len ** 2 - d2_planar, 1e-8))
        target = np.array([target[0], -drop, target[2]])
    d = max(float(np.linalg.norm(target)), 1e-6)

    cos_bend = (d * d - UPPER_LEG ** 2 - LOWER_LEG ** 2) / (
        2.0 * UPPER_LEG * LOWER_LEG)
    bend = float(np.arccos(np.clip(cos_bend, -1.0, 1.0)))
    # thigh deviates from the hip->ankle chord by gamma, toward the front
    gamma = float(np.arcsin(np.clip(LOWER_LEG * np.sin(bend) / d, -1.0, 1.0)))

    t_hat = target / d
    hinge = np.cross(np.array([0.0, 0.0, 1.0]), t_hat)
    n = np.linalg.norm(hinge)
    hinge = hinge / n if n > 1e-6 else np.array([1.0, 0.0, 0.0])
    thigh = quat.rotate(quat.from_rotvec(hinge * -gamma), t_hat)

    y_axis = -thigh
    x_axis = hinge - np.dot(hinge, y_axis) * y_axis
    x_axis /= max(np.linalg.norm(x_axis), 1e-9)
    z_axis = np.cross(x_axis, y_axis)
    q_hip = quat.from_matrix(np.stack([x_axis, y_axis, z_axis], axis=-1))
    q_knee = quat.from_euler_deg("X", float(np.degrees(bend)))
    return q_hip, q_knee


class _FootPlan:
    """Planted-anchor timeline for one foot, keyed by the step variable psi.

    psi advances by 1 per step. Foot `side` (0 left, 1 right) strikes at
    psi = side + 2k, holds for 2*STANCE_DUTY psi units, then swings to the
    next strike's anchor. Once the next strike would land past psi_total the
    foot stays planted, so the final stand inherits grounded feet.
    """

    def __init__(self, side: int, psi_total: float, stride: float):
        self.side = side
        self.stride = stride
        self.last_strike = side + 2.0 * np.floor((psi_total - side) / 2.0)

    def anchor_arc(self, strike_psi: float) -> float:
        return (strike_psi + ANCHOR_LEAD) * self.stride

    def state(self, psi: float) -> tuple[str, float, float, float]:
        """-> (kind, arc_from, arc_to, swing_progress)."""
        strike = self.side + 2.0 * np.floor((psi - self.side) / 2.0)
        cur = self.anchor_arc(strike)
        if strike >= self.last_strike:
            return "stance", cur, cur, 0.0
        release = strike + 2.0 * STANCE_DUTY
        if psi <= release:
            return "stance", cur, cur, 0.0
        u = (psi - release) / (2.0 - 2.0 * STANCE_DUTY)
        return "swing", cur, self.anchor_arc(strike + 2.0), float(min(u, 1.0))


def _generate_clip(spec: StyleSpec, seconds: float, fps: int, ccw: bool,
                   rng: np.random.Generator) -> MotionClip:
    sk = default_character()
    n = int(round(seconds * fps))
    dt = 1.0 / fps
    times = np.arange(n) * dt

    walk_start = STAND_PAD
    walk_end = seconds - STAND_PAD
    rho = np.minimum(_smoothstep((times - walk_start) / EASE),
                     _smoothstep((walk_end - times) / EASE))

    psi = np.concatenate([[0.0], np.cumsum(rho[:-1] * spec.cadence * dt)])
    psi_total = float(psi[-1])
    arc = psi * spec.stride_length
    radius = max(arc[-1] / (2.0 * np.pi), 1.0)
    turn = 1.0 if ccw else -1.0

    def path_point(a: float) -> tuple[np.ndarray, float]:
        # arc-length circle with tangent heading yaw(a) = turn * a / radius,
        # matching forward = (sin yaw, 0, cos yaw); starts at origin facing +Z
        phi = turn * a / radius
        pos = np.array([turn * radius * (1.0 - np.cos(phi)), 0.0,
                        turn * radius * np.sin(phi)])
        return pos, phi

    feet = [_FootPlan(0, psi_total, spec.stride_length),
            _FootPlan(1, psi_total, spec.stride_length)]

    noise_f = rng.uniform(0.2, 0.5, size=4)
    noise_p = rng.uniform(0.0, 2.0 * np.pi, size=4)
    sec_omega = 2.0 * np.pi * spec.cadence * SECONDARY_RATIO
    sec_phase = rng.uniform(0.0, 2.0 * np.pi)
    sec_amp = 4.0 * (spec.arm_swing / 45.0)

    root_pos = np.zeros((n, 3))
    local = np.zeros((n, sk.n_joints, 4))
    local[..., 3] = 1.0
    j = {name: sk.index(name) for name in sk.names}
    hip_off = {0: np.array([HIP_LATERAL, -0.05, 0.0]),
               1: np.array([-HIP_LATERAL, -0.05, 0.0])}
    x_axis = np.array([1.0, 0.0, 0.0])

    def plan_target(side, f):
        kind, a_from, a_to, u = feet[side].state(psi[f])
        if kind == "stance":
            anchor, a_yaw = path_point(a_from)
        else:
            p0, y0 = path_point(a_from)
            p1, y1 = path_point(a_to)
            s = float(_smoothstep(u))
            anchor = p0 + (p1 - p0) * s
            a_yaw = y0 + (y1 - y0) * s
        lateral = 1.0 if side == 0 else -1.0
        left_dir = quat.rotate(quat.yaw_quat(a_yaw), x_axis)
        ankle = anchor + lateral * HIP_LATERAL * left_dir
        ankle[1] = ANKLE_REST_Y
        if kind == "swing":
            ankle[1] += STEP_LIFT * np.sin(np.pi * u)
        return ankle, a_yaw

    def park_target(side, at_arc, at_yaw):
        lateral = 1.0 if side == 0 else -1.0
        base, _ = path_point(at_arc)
        left_dir = quat.rotate(quat.yaw_quat(at_yaw), x_axis)
        ankle = base + lateral * HIP_LATERAL * left_dir
        ankle[1] = ANKLE_REST_Y
        return ankle, at_yaw

    def glide(a, b, u):
        # ease between two grounded targets with a small lift if they differ
        s = float(_smoothstep(u))
        pos = a[0] + (b[0] - a[0]) * s
        if np.linalg.norm(b[0] - a[0]) > 0.01:
            pos = pos.copy()
            pos[1] += 0.03 * np.sin(np.pi * u)
        return pos, a[1] + (b[1] - a[1]) * s

    # feet walk the plan between f_in and f_out; outside it they settle to
    # parked positions beside the root so stands rest on both soles
    f_in = int(round(walk_start * fps))
    f_out = int(round(walk_end * fps))
    settle_n = max(int(round(0.4 * fps)), 1)
    yaw_final = turn * float(arc[-1]) / radius

    def make_foot(side):
        start_park = park_target(side, 0.0, 0.0)
        start_plan = plan_target(side, min(f_in, n - 1))
        end_plan = plan_target(side, min(f_out, n - 1))
        end_park = park_target(side, float(arc[-1]), yaw_final)

        def target(f):
            if f < f_in - settle_n:
                return start_park
            if f < f_in:
                return glide(start_park, start_plan,
                             (f - (f_in - settle_n)) / settle_n)
            if f < f_out:
                return plan_target(side, f)
            if f < f_out + settle_n:
                return glide(end_plan, end_park, (f - f_out) / settle_n)
            return end_park

        return target

    foot_targets = [make_foot(0), make_foot(1)]

    for f in range(n):
        t = times[f]
        p_step = (psi[f] % 2.0) / 2.0
        pos, yaw = path_point(arc[f])
        base_y = STAND_ROOT_Y + rho[f] * (WALK_ROOT_Y - STAND_ROOT_Y)
        pos[1] = base_y - rho[f] * 0.5 * spec.bounce * np.cos(
            4.0 * np.pi * p_step)
        root_pos[f] = pos
        q_root = quat.yaw_quat(yaw)
        local[f, 0] = q_root

        noise = [0.3 * np.sin(2 * np.pi * noise_f[i] * t + noise_p[i])
                 for i in range(4)]
        sec = np.sin(sec_omega * t + sec_phase)
        lean = spec.torso_lean + noise[0]
        local[f, j["spine"]] = quat.multiply(
            _rot_x(lean), quat.from_euler_deg("Y", sec_amp * sec))
        local[f, j["neck"]] = _rot_x(0.3 * lean + noise[1])
        local[f, j["head"]] = _rot_x(noise[2])

        swing = np.sin(2.0 * np.pi * p_step) * spec.arm_swing * rho[f]
        sway = 0.3 * sec_amp * sec * rho[f]
        for side, sign, jn in ((0, 1.0, "left"), (1, -1.0, "right")):
            arm = -swing if side == 0 else swing
            local[f, j[f"{jn}_shoulder"]] = quat.multiply(
                _rot_x(arm + sway + noise[3]),
                quat.from_euler_deg("Z", -sign * 80.0))
            local[f, j[f"{jn}_elbow"]] = quat.from_euler_deg("Z", -sign * 15.0)

        inv_root = quat.conjugate(q_root)
        for side, jn in ((0, "left"), (1, "right")):
            ankle_w, a_yaw = foot_targets[side](f)
            ankle_local = quat.rotate(inv_root, ankle_w - root_pos[f])
            q_hip, q_knee = _solve_leg(hip_off[side], ankle_local)
            local[f, j[f"{jn}_hip"]] = q_hip
            local[f, j[f"{jn}_knee"]] = q_knee
            # level foot facing the anchor heading
            knee_world = quat.multiply(q_root, quat.multiply(q_hip, q_knee))
            local[f, j[f"{jn}_ankle"]] = quat.multiply(
                quat.conjugate(knee_world), quat.yaw_quat(a_yaw))

    clip = MotionClip(skeleton=sk, root_pos=root_pos, local_quats=local,
                      frame_time=dt,
                      name=f"{spec.name}_{'ccw' if ccw else 'cw'}",
                      style_label=spec.name)
    clip.action_labels = np.where(rho > 1e-6, WALK, STAND).astype(np.int64)
    clip.contact_labels = label_contacts(clip)
    return clip


def label_contacts(clip: MotionClip) -> np.ndarray:
    """(F, 4) bool foot contacts from height and planar-speed thresholds.

    Heights are measured against each joint's grounded rest height (the
    ankle sits ANKLE_REST_Y above the sole). Thresholds: 2 cm, 0.1 m/s.
    """
    sk = clip.skeleton
    world_p, _ = clip.world()
    cols = [("left_ankle", ANKLE_REST_Y), ("left_toe", 0.0),
            ("right_ankle", ANKLE_REST_Y), ("right_toe", 0.0)]
    out = np.zeros((clip.n_frames, 4), dtype=bool)
    for c, (name, ref) in enumerate(cols):
        p = world_p[:, sk.index(name)]
        v = np.zeros(clip.n_frames)
        if clip.n_frames > 1:
            planar = p[:, [0, 2]]
            v[1:-1] = np.linalg.norm(planar[2:] - planar[:-2], axis=1) / (
                2 * clip.frame_time)
            v[0] = np.linalg.norm(planar[1] - planar[0]) / clip.frame_time
            v[-1] = np.linalg.norm(planar[-1] - planar[-2]) / clip.frame_time
        out[:, c] = (p[:, 1] - ref < 0.02) & (v < 0.1)
    return out


def generate_synthetic_corpus(style_specs=DEFAULT_STYLES,
                              seconds_per_style: float = 15.0, fps: int = 60,
                              seed: int = 0) -> list[MotionClip]:
    """Two circular-walk clips (ccw, cw) per style; deterministic in seed."""
    specs = list(style_specs)
    if len(specs) < 2:
        raise ConfigError("need at least 2 styles")
    if fps < 30:
        raise ConfigError("fps must be >= 30")
    if seconds_per_style < 2 * STAND_PAD + 2 * EASE:
        raise ConfigError("seconds_per_style too short for the stand padding")
    for s in specs:
        if s.stride_length <= 0.0 and s.cadence > 0.0:
            raise ConfigError(f"style {s.name!r}: zero stride with nonzero "
                              "cadence would walk in place")

    children = np.random.SeedSequence(seed).spawn(len(specs) * 2)
    clips = []
    for i, spec in enumerate(specs):
        for k, ccw in enumerate((True, False)):
            rng = np.random.default_rng(children[2 * i + k])
            clips.append(_generate_clip(spec, seconds_per_style, fps, ccw,
                                        rng))
    return clips
