"""BVH parse/write oracles: hand forward-kinematics and round trips."""

import numpy as np
import pytest

from motionstyle.errors import ParseError
from motionstyle.motion import MotionClip, default_character, parse_bvh, write_bvh
from motionstyle.motion import quat

MINIMAL = """
HIERARCHY
ROOT a
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT b
  {
    OFFSET 0 1 0
    CHANNELS 3 Zrotation Xrotation Yrotation
    End Site
    {
      OFFSET 0 1 0
    }
  }
}
MOTION
Frames: 1
Frame Time: 0.0166667
0 0 0 0 0 0 0 0 0
"""

THREE_JOINT = """
HIERARCHY
ROOT a
{
  OFFSET 0 0 0
  CHANNELS 6 Xposition Yposition Zposition Zrotation Xrotation Yrotation
  JOINT b
  {
    OFFSET 0 1 0
    CHANNELS 3 Zrotation Xrotation Yrotation
    JOINT c
    {
      OFFSET 0 1 0
      CHANNELS 3 Zrotation Xrotation Yrotation
      End Site
      {
        OFFSET 0 0.5 0
      }
    }
  }
}
MOTION
Frames: 2
Frame Time: 0.0166667
0 0 0 0 0 0 0 0 0 0 0 0
0 0 0 0 0 0 90 0 0 0 0 0
"""


class TestParse:
    def test_minimal_all_zero(self):
        clip = parse_bvh(MINIMAL)
        assert clip.skeleton.n_joints == 2
        assert clip.n_frames == 1
        assert clip.frame_time == pytest.approx(0.0166667)
        np.testing.assert_allclose(clip.root_pos[0], [0, 0, 0], atol=1e-9)
        np.testing.assert_allclose(clip.local_quats[0, :, 3], 1.0)
        np.testing.assert_allclose(clip.local_quats[0, :, :3], 0.0)

    def test_90deg_z_rotation_moves_child(self):
        """Joint b rotated 90 degrees about Z: c's offset (0,1,0) maps to
        (-1,0,0), so c's world position is b's (0,1,0) plus (-1,0,0)."""
        clip = parse_bvh(THREE_JOINT)
        world_p, _ = clip.world()
        np.testing.assert_allclose(world_p[0, 2], [0, 2, 0], atol=1e-9)
        np.testing.assert_allclose(world_p[1, 2], [-1, 1, 0], atol=1e-9)

    def test_end_site_offset_kept(self):
        clip = parse_bvh(THREE_JOINT)
        assert 2 in clip.skeleton.end_sites
        np.testing.assert_allclose(clip.skeleton.end_sites[2], (0, 0.5, 0))

    def test_channel_order_honored(self):
        """ZXY vs XYZ listings of the same angles give different rotations."""
        def with_order(order_line, angles):
            return f"""
HIERARCHY
ROOT a
{{
  OFFSET 0 0 0
  CHANNELS 3 {order_line}
  End Site
  {{
    OFFSET 0 1 0
  }}
}}
MOTION
Frames: 1
Frame Time: 0.05
{angles}
"""
        zxy = parse_bvh(with_order("Zrotation Xrotation Yrotation", "30 45 0"))
        xzy = parse_bvh(with_order("Xrotation Zrotation Yrotation", "45 30 0"))
        expect_zxy = quat.from_euler_deg("ZX", [30, 45])
        expect_xzy = quat.from_euler_deg("XZ", [45, 30])
        np.testing.assert_allclose(zxy.local_quats[0, 0], expect_zxy, atol=1e-9)
        np.testing.assert_allclose(xzy.local_quats[0, 0], expect_xzy, atol=1e-9)
        assert not np.allclose(zxy.local_quats[0, 0], xzy.local_quats[0, 0])

    def test_truncated_file_raises(self):
        with pytest.raises(ParseError):
            parse_bvh(MINIMAL.rsplit("\n", 3)[0])

    def test_bad_channel_raises(self):
        with pytest.raises(ParseError):
            parse_bvh(MINIMAL.replace("Zrotation", "Wrotation"))

    def test_wrong_value_count_raises(self):
        with pytest.raises(ParseError):
            parse_bvh(MINIMAL.replace("0 0 0 0 0 0 0 0 0", "0 0 0"))


def _quat_dist(a, b):
    """Rotation-space distance insensitive to the q/-q sign ambiguity."""
    return min(np.abs(a - b).max(), np.abs(a + b).max())


class TestRoundTrip:
    def test_parse_write_parse_within_1e4(self):
        rng = np.random.default_rng(0)
        sk = default_character()
        frames = 25
        local = np.zeros((frames, sk.n_joints, 4))
        angles = rng.uniform(-60, 60, (frames, sk.n_joints, 3))
        for f in range(frames):
            for j in range(sk.n_joints):
                local[f, j] = quat.from_euler_deg("ZXY", angles[f, j])
        root = rng.uniform(-1, 1, (frames, 3)) + np.array([0, 1, 0])
        clip = MotionClip(skeleton=sk, root_pos=root, local_quats=local,
                          frame_time=1 / 60)

        first = parse_bvh(write_bvh(clip))
        second = parse_bvh(write_bvh(first))
        np.testing.assert_allclose(second.root_pos, first.root_pos, atol=1e-4)
        assert second.frame_time == pytest.approx(first.frame_time, abs=1e-9)
        for f in range(frames):
            for j in range(sk.n_joints):
                assert _quat_dist(second.local_quats[f, j],
                                  first.local_quats[f, j]) < 1e-4

    def test_original_survives_one_trip(self):
        sk = default_character()
        local = np.zeros((3, sk.n_joints, 4))
        local[..., 3] = 1.0
        root = np.array([[0.0, 0.98, 0.0]] * 3)
        root[:, 2] = [0.0, 0.1, 0.2]
        clip = MotionClip(skeleton=sk, root_pos=root, local_quats=local,
                          frame_time=1 / 60)
        back = parse_bvh(write_bvh(clip))
        assert back.n_frames == 3
        assert back.skeleton.names == sk.names
        np.testing.assert_allclose(back.root_pos, clip.root_pos, atol=1e-4)
        for f in range(3):
            for j in range(sk.n_joints):
                assert _quat_dist(back.local_quats[f, j],
                                  clip.local_quats[f, j]) < 1e-4
