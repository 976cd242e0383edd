"""Retargeting: bone scaling, damped least-squares IK, toe-height correction.

The pipeline maps a source clip onto a target rig in three passes: swap in
the target bone offsets (joint-size scaling) with root translation scaled by
the height ratio, pull mapped end effectors back to their scaled source
positions with damped-LS IK, then clamp contacting toes to the ground plane.
"""

from __future__ import annotations

import numpy as np

from ..errors import MappingError, NumericError, ParseError
from . import quat
from .skeleton import L_TOE, R_TOE, MotionClip, MotionFrame, Skeleton


def load_joint_map(text: str) -> dict[str, str]:
    """Parse `source_name = target_name` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"joint map line {ln}: expected 'source = target'")
        src, tgt = (part.strip() for part in line.split("=", 1))
        if not src or not tgt:
            raise ParseError(f"joint map line {ln}: empty name")
        out[src] = tgt
    return out


def _character_height(skeleton: Skeleton) -> float:
    """Rest height proxy: root offset y plus the longest downward chain."""
    world = np.zeros((skeleton.n_joints, 3))
    world[0] = skeleton.joints[0].offset
    for j in range(1, skeleton.n_joints):
        world[j] = world[skeleton.parents[j]] + skeleton.offsets[j]
    return float(world[0, 1] - world[:, 1].min()) or 1.0


def scale_skeleton(source: MotionClip, template: Skeleton,
                   joint_map: dict[str, str]) -> MotionClip:
    """Re-pose the template skeleton with the source clip's rotations.

    Every template joint must be covered by the map; root translation is
    scaled by the template/source height ratio. Frame count and frame_time
    are preserved.
    """
    inverse: dict[str, str] = {}
    for src_name, tgt_name in joint_map.items():
        if src_name not in source.skeleton._index:
            raise MappingError(f"source joint {src_name!r} not in source skeleton")
        if tgt_name not in template._index:
            raise MappingError(f"target joint {tgt_name!r} not in template")
        inverse[tgt_name] = src_name
    missing = [n for n in template.names if n not in inverse]
    if missing:
        raise MappingError(f"unmapped template joints: {', '.join(missing)}")

    scale = _character_height(template) / _character_height(source.skeleton)
    frames = source.n_frames
    local_quats = np.zeros((frames, template.n_joints, 4))
    local_quats[..., 3] = 1.0
    for ti, tgt_name in enumerate(template.names):
        si = source.skeleton.index(inverse[tgt_name])
        local_quats[:, ti] = source.local_quats[:, si]
    return MotionClip(
        skeleton=template,
        root_pos=source.root_pos * scale,
        local_quats=local_quats,
        frame_time=source.frame_time,
        name=source.name,
        style_label=source.style_label,
        action_labels=None if source.action_labels is None
        else source.action_labels.copy(),
        contact_labels=None if source.contact_labels is None
        else source.contact_labels.copy(),
    )


_LADDER = (0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0)
_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def ik_damped_ls(skeleton: Skeleton, frame: MotionFrame,
                 targets: list[tuple[str, np.ndarray]],
                 damping: float = 2.0, iterations: int = 20) -> MotionFrame:
    """Damped least-squares IK on joint rotations.

    Per iteration solves dtheta = J^T (J J^T + damping^2 I)^-1 e where e
    stacks the 3-vector position residuals of every target and J maps
    world-axis rotations of each ancestor joint to effector displacement.
    The step is applied scaled by a monotone line search along dtheta (the
    heavily damped direction needs amplification on small residual
    components; the search keeps ||e|| non-increasing by construction). The
    root translation is never moved; quaternions are re-normalized. Targets
    exactly anti-parallel to a fully extended chain sit at an unstable
    equilibrium (dtheta = 0) and stay put, as raw DLS would.
    """
    if damping <= 0:
        raise NumericError("damping must be > 0")
    target_idx = [skeleton.index(name) for name, _ in targets]
    target_pos = np.array([np.asarray(p, dtype=np.float64)
                           for _, p in targets])
    chains = [set(skeleton.chain_to_root(i)) for i in target_idx]

    local_quats = frame.local_quats.astype(np.float64).copy()
    root_pos = frame.root_pos.astype(np.float64).copy()
    n_j = skeleton.n_joints

    def residual(lq: np.ndarray) -> float:
        wp, _ = skeleton.forward_kinematics(root_pos, lq)
        return float(np.linalg.norm(target_pos - wp[target_idx]))

    def apply_step(lq: np.ndarray, world_q: np.ndarray, dtheta: np.ndarray,
                   scale: float) -> np.ndarray:
        out = lq.copy()
        for j in range(n_j):
            step = dtheta[j] * scale
            if np.dot(step, step) < 1e-24:
                continue
            dq = quat.from_rotvec(step)
            p = int(skeleton.parents[j])
            if p < 0:
                out[j] = quat.multiply(dq, out[j])
            else:
                pq = world_q[p]
                out[j] = quat.multiply(
                    quat.multiply(quat.conjugate(pq), quat.multiply(dq, pq)),
                    out[j])
            out[j] = quat.normalize(out[j])
        return out

    for _ in range(iterations):
        world_p, world_q = skeleton.forward_kinematics(root_pos, local_quats)
        e = (target_pos - world_p[target_idx]).reshape(-1)
        jac = np.zeros((3 * len(targets), 3 * n_j))
        for k, (ti, chain) in enumerate(zip(target_idx, chains)):
            for j in chain:
                lever = world_p[ti] - world_p[j]
                for a in range(3):
                    axis = np.zeros(3)
                    axis[a] = 1.0
                    jac[3 * k:3 * k + 3, 3 * j + a] = np.cross(axis, lever)
        gram = jac @ jac.T + (damping ** 2) * np.eye(3 * len(targets))
        try:
            dtheta = (jac.T @ np.linalg.solve(gram, e)).reshape(n_j, 3)
        except np.linalg.LinAlgError as exc:
            raise NumericError(f"IK solve failed: {exc}") from None

        cache: dict[float, tuple[float, np.ndarray]] = {}

        def try_scale(s: float) -> float:
            if s not in cache:
                lq = apply_step(local_quats, world_q, dtheta, s)
                cache[s] = (residual(lq), lq)
            return cache[s][0]

        best_err = float(np.linalg.norm(e))
        best_lq, best_scale = local_quats, 0.0
        for s in _LADDER:
            if try_scale(s) < best_err:
                best_err, best_lq, best_scale = cache[s][0], cache[s][1], s
        if best_scale > 0.0:
            lo, hi = best_scale / 2.0, best_scale * 2.0
            c = hi - _GOLDEN * (hi - lo)
            d = lo + _GOLDEN * (hi - lo)
            for _ in range(8):
                if try_scale(c) < try_scale(d):
                    hi = d
                else:
                    lo = c
                c = hi - _GOLDEN * (hi - lo)
                d = lo + _GOLDEN * (hi - lo)
            for s in (c, d):
                if try_scale(s) < best_err:
                    best_err, best_lq = cache[s][0], cache[s][1]
        local_quats = best_lq

    world_p, world_q = skeleton.forward_kinematics(root_pos, local_quats)
    return MotionFrame(root_pos, local_quats, world_p, world_q)


def fix_toe_height(clip: MotionClip, ground_height: float | None = None
                   ) -> MotionClip:
    """On toe-contact frames, shift the root vertically so the contacting
    toe sits at ground height. Ground defaults to the 5th percentile of the
    clip's toe heights. Non-contact frames are untouched.
    """
    sk = clip.skeleton
    try:
        toe_idx = [sk.index("left_toe"), sk.index("right_toe")]
    except MappingError:
        raise MappingError("clip skeleton has no left_toe/right_toe joints")
    if clip.contact_labels is None:
        return clip.copy()
    world_p, _ = clip.world()
    toe_y = world_p[:, toe_idx, 1]
    if ground_height is None:
        ground_height = float(np.percentile(toe_y, 5.0))
    out = clip.copy()
    contact = clip.contact_labels[:, [L_TOE, R_TOE]].astype(bool)
    for f in range(clip.n_frames):
        if not contact[f].any():
            continue
        err = ground_height - toe_y[f][contact[f]]
        out.root_pos[f, 1] += float(err.mean())
    out.invalidate()
    return out


def retarget_clip(source: MotionClip, template: Skeleton,
                  joint_map: dict[str, str], damping: float = 2.0,
                  iterations: int = 20,
                  effectors: tuple[str, ...] = ("left_ankle", "right_ankle")
                  ) -> MotionClip:
    """Full pipeline: scale, per-frame damped-LS IK on the ankle targets
    taken from the scaled source, then toe-height correction."""
    scaled = scale_skeleton(source, template, joint_map)
    inverse = {tgt: src for src, tgt in joint_map.items()}
    scale = _character_height(template) / _character_height(source.skeleton)
    src_world, _ = source.world()
    out = scaled.copy()
    for f in range(scaled.n_frames):
        targets = []
        for name in effectors:
            si = source.skeleton.index(inverse[name])
            targets.append((name, src_world[f, si] * scale))
        solved = ik_damped_ls(template, scaled.frame(f), targets,
                              damping=damping, iterations=iterations)
        out.local_quats[f] = solved.local_quats
    out.invalidate()
    return fix_toe_height(out)
