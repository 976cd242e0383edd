"""Retargeting oracles: uniform-scale, analytic 2-link IK, toe offsets."""

import numpy as np
import pytest

from motionstyle.errors import MappingError, ParseError
from motionstyle.motion import (Joint, MotionClip, Skeleton, default_character,
                                fix_toe_height, ik_damped_ls, load_joint_map,
                                retarget_clip, scale_skeleton)
from motionstyle.motion import quat


def two_link_arm():
    """Planar arm in the XY plane: base at origin, two unit bones along +X."""
    return Skeleton([
        Joint("base", -1, (0.0, 0.0, 0.0)),
        Joint("mid", 0, (1.0, 0.0, 0.0)),
        Joint("tip", 1, (1.0, 0.0, 0.0)),
    ])


def rest_frame(sk):
    q = np.zeros((sk.n_joints, 4))
    q[:, 3] = 1.0
    wp, wq = sk.forward_kinematics(np.zeros(3), q)
    from motionstyle.motion.skeleton import MotionFrame
    return MotionFrame(np.zeros(3), q, wp, wq)


def make_clip(sk, frames=4, frame_time=1 / 60):
    q = np.zeros((frames, sk.n_joints, 4))
    q[..., 3] = 1.0
    root = np.tile(np.asarray(sk.joints[0].offset, dtype=np.float64),
                   (frames, 1))
    return MotionClip(skeleton=sk, root_pos=root, local_quats=q,
                      frame_time=frame_time)


class TestJointMap:
    def test_parse_pairs_and_comments(self):
        text = "# comment\nHips = hips\n  LeftFoot=left_ankle # inline\n\n"
        assert load_joint_map(text) == {"Hips": "hips",
                                        "LeftFoot": "left_ankle"}

    def test_missing_equals_raises(self):
        with pytest.raises(ParseError):
            load_joint_map("Hips hips\n")


class TestScaleSkeleton:
    def test_identity_map_roundtrip(self):
        sk = default_character()
        clip = make_clip(sk)
        out = scale_skeleton(clip, sk, {n: n for n in sk.names})
        np.testing.assert_allclose(out.root_pos, clip.root_pos, atol=1e-6)
        np.testing.assert_allclose(out.local_quats, clip.local_quats, atol=1e-6)
        assert out.frame_time == clip.frame_time

    def test_uniform_double_scales_relative_positions(self):
        sk = default_character()
        big = Skeleton(
            [Joint(j.name, j.parent, tuple(np.array(j.offset) * 2.0),
                   j.channels) for j in sk.joints],
            {k: tuple(np.array(v) * 2.0) for k, v in sk.end_sites.items()})
        rng = np.random.default_rng(0)
        clip = make_clip(sk, frames=3)
        for f in range(3):
            for j in range(sk.n_joints):
                clip.local_quats[f, j] = quat.from_euler_deg(
                    "ZXY", rng.uniform(-40, 40, 3))
        out = scale_skeleton(clip, big, {n: n for n in sk.names})
        wp_src, _ = clip.world()
        wp_out, _ = out.world()
        rel_src = wp_src - wp_src[:, :1]
        rel_out = wp_out - wp_out[:, :1]
        np.testing.assert_allclose(rel_out, rel_src * 2.0, atol=1e-4)
        # root path scales with character height (exactly 2x here)
        np.testing.assert_allclose(out.root_pos, clip.root_pos * 2.0, atol=1e-6)

    def test_unmapped_joint_raises(self):
        sk = default_character()
        clip = make_clip(sk)
        partial = {n: n for n in sk.names if n != "head"}
        with pytest.raises(MappingError, match="head"):
            scale_skeleton(clip, sk, partial)


class TestDampedLsIk:
    def test_zero_residual_leaves_frame(self):
        sk = two_link_arm()
        frame = rest_frame(sk)
        out = ik_damped_ls(sk, frame, [("tip", frame.world_pos[2])],
                           damping=2.0, iterations=20)
        np.testing.assert_allclose(out.local_quats, frame.local_quats,
                                   atol=1e-6)

    def test_two_link_reachable_within_1e3(self):
        """Analytic 2-link solution: target distance 1.5 is reachable
        (elbow angle = arccos((d^2-2)/2)), so the solver must get the tip
        within 1e-3 using the reference settings."""
        sk = two_link_arm()
        target = 1.5 * np.array([np.cos(0.9), np.sin(0.9), 0.0])
        out = ik_damped_ls(sk, rest_frame(sk), [("tip", target)],
                           damping=2.0, iterations=20)
        err = np.linalg.norm(out.world_pos[2] - target)
        assert err < 1e-3, f"tip error {err:.5f}"

    def test_residual_non_increasing(self):
        sk = two_link_arm()
        target = 1.5 * np.array([np.cos(2.2), np.sin(2.2), 0.0])
        frame = rest_frame(sk)
        errs = []
        for its in range(21):
            out = ik_damped_ls(sk, frame, [("tip", target)], damping=2.0,
                               iterations=its)
            errs.append(np.linalg.norm(out.world_pos[2] - target))
        for a, b in zip(errs, errs[1:]):
            assert b <= a + 1e-6, f"residual rose {a:.6f} -> {b:.6f}"

    def test_unreachable_fully_extends_toward_target(self):
        """Target at distance 3 with total reach 2: the arm straightens
        along the target direction (within 1e-2 rad)."""
        sk = two_link_arm()
        direction = np.array([np.cos(0.6), np.sin(0.6), 0.0])
        out = ik_damped_ls(sk, rest_frame(sk), [("tip", 3.0 * direction)],
                           damping=2.0, iterations=200)
        tip = out.world_pos[2]
        reach = np.linalg.norm(tip)
        angle = np.arccos(np.clip(np.dot(tip / reach, direction), -1, 1))
        assert reach > 2.0 - 1e-3
        assert angle < 1e-2

    def test_bad_damping_raises(self):
        sk = two_link_arm()
        with pytest.raises(Exception):
            ik_damped_ls(sk, rest_frame(sk), [("tip", np.zeros(3))],
                         damping=0.0)

    def test_unknown_target_joint_raises(self):
        sk = two_link_arm()
        with pytest.raises(MappingError):
            ik_damped_ls(sk, rest_frame(sk), [("nope", np.zeros(3))])


class TestFixToeHeight:
    def _contact_clip(self, root_y_shift=0.0):
        sk = default_character()
        clip = make_clip(sk, frames=2)
        clip.root_pos[:, 1] += root_y_shift
        clip.contact_labels = np.zeros((2, 4), dtype=bool)
        clip.contact_labels[1] = [False, True, False, False]
        return clip

    def test_toes_at_ground_unchanged(self):
        clip = self._contact_clip()
        wp, _ = clip.world()
        ground = float(wp[1, clip.skeleton.index("left_toe"), 1])
        out = fix_toe_height(clip, ground)
        np.testing.assert_allclose(out.root_pos, clip.root_pos, atol=1e-9)

    def test_toe_at_5cm_clamped_to_ground(self):
        clip = self._contact_clip(root_y_shift=0.05)
        base = self._contact_clip(root_y_shift=0.0)
        wp, _ = base.world()
        ground = float(wp[1, base.skeleton.index("left_toe"), 1])
        out = fix_toe_height(clip, ground)
        wp_out, _ = out.world()
        toe_y = wp_out[1, out.skeleton.index("left_toe"), 1]
        assert abs(toe_y - ground) < 1e-4
        # the non-contact frame is untouched
        np.testing.assert_allclose(out.root_pos[0], clip.root_pos[0],
                                   atol=1e-9)

    def test_missing_toe_joint_raises(self):
        sk = two_link_arm()
        clip = make_clip(sk)
        clip.contact_labels = np.zeros((4, 4), dtype=bool)
        with pytest.raises(MappingError):
            fix_toe_height(clip, 0.0)


def test_retarget_preserves_frame_count_and_time():
    sk = default_character()
    clip = make_clip(sk, frames=5, frame_time=1 / 30)
    clip.contact_labels = np.zeros((5, 4), dtype=bool)
    out = retarget_clip(clip, sk, {n: n for n in sk.names})
    assert out.n_frames == 5
    assert out.frame_time == pytest.approx(1 / 30)
