"""BVH (Biovision Hierarchy) reading and writing.

Euler channel order is honored per joint exactly as listed in the file:
rotations listed first-to-last are applied intrinsically in that order.
Labels on clips are not part of the format and parse back empty.
"""

from __future__ import annotations

import io

import numpy as np
from scipy.spatial.transform import Rotation

from ..errors import ParseError
from .skeleton import Joint, MotionClip, Skeleton

_ROT_AXIS = {"Xrotation": "X", "Yrotation": "Y", "Zrotation": "Z"}
_POS_INDEX = {"Xposition": 0, "Yposition": 1, "Zposition": 2}

DEFAULT_ROOT_CHANNELS = ("Xposition", "Yposition", "Zposition",
                         "Zrotation", "Xrotation", "Yrotation")
DEFAULT_JOINT_CHANNELS = ("Zrotation", "Xrotation", "Yrotation")


class _Tokens:
    def __init__(self, text: str):
        self.items = text.split()
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.items):
            raise ParseError("unexpected end of BVH file")
        tok = self.items[self.pos]
        self.pos += 1
        return tok

    def peek(self) -> str:
        if self.pos >= len(self.items):
            raise ParseError("unexpected end of BVH file")
        return self.items[self.pos]

    def expect(self, want: str) -> None:
        got = self.next()
        if got.upper() != want.upper():
            raise ParseError(f"expected {want!r}, got {got!r}")


def parse_bvh(text: str) -> MotionClip:
    toks = _Tokens(text)
    toks.expect("HIERARCHY")
    joints: list[Joint] = []
    end_sites: dict[int, tuple[float, float, float]] = {}

    def read_offset() -> tuple[float, float, float]:
        toks.expect("OFFSET")
        try:
            return (float(toks.next()), float(toks.next()), float(toks.next()))
        except ValueError as e:
            raise ParseError(f"bad OFFSET value: {e}") from None

    def read_joint(parent: int) -> None:
        kind = toks.next().upper()
        if kind == "END":
            toks.expect("Site")
            toks.expect("{")
            end_sites[parent] = read_offset()
            toks.expect("}")
            return
        if kind not in ("ROOT", "JOINT"):
            raise ParseError(f"expected ROOT/JOINT/End, got {kind!r}")
        name = toks.next()
        toks.expect("{")
        offset = read_offset()
        toks.expect("CHANNELS")
        try:
            n_chan = int(toks.next())
        except ValueError:
            raise ParseError("CHANNELS count is not an integer") from None
        channels = tuple(toks.next() for _ in range(n_chan))
        for c in channels:
            if c not in _ROT_AXIS and c not in _POS_INDEX:
                raise ParseError(f"unknown channel {c!r}")
        index = len(joints)
        joints.append(Joint(name, parent, offset, channels))
        while toks.peek() != "}":
            read_joint(index)
        toks.expect("}")

    read_joint(-1)
    if not joints:
        raise ParseError("no joints in hierarchy")

    toks.expect("MOTION")
    toks.expect("Frames:")
    try:
        n_frames = int(toks.next())
    except ValueError:
        raise ParseError("frame count is not an integer") from None
    toks.expect("Frame")
    toks.expect("Time:")
    try:
        frame_time = float(toks.next())
    except ValueError:
        raise ParseError("frame time is not a number") from None

    n_values = sum(len(j.channels) for j in joints)
    flat = toks.items[toks.pos:]
    if len(flat) != n_frames * n_values:
        raise ParseError(
            f"expected {n_frames * n_values} motion values, got {len(flat)}")
    try:
        values = np.array(flat, dtype=np.float64).reshape(n_frames, n_values)
    except ValueError:
        raise ParseError("non-numeric motion data") from None

    skeleton = Skeleton(joints, end_sites)
    root_pos = np.tile(np.asarray(joints[0].offset), (n_frames, 1))
    local_quats = np.zeros((n_frames, len(joints), 4))
    local_quats[..., 3] = 1.0
    col = 0
    for ji, joint in enumerate(joints):
        rot_order = ""
        rot_cols = []
        for ch in joint.channels:
            if ch in _POS_INDEX:
                if ji == 0:
                    root_pos[:, _POS_INDEX[ch]] = (joints[0].offset[_POS_INDEX[ch]]
                                                   + values[:, col])
                col += 1
            else:
                rot_order += _ROT_AXIS[ch]
                rot_cols.append(col)
                col += 1
        if rot_order:
            angles = values[:, rot_cols]
            local_quats[:, ji] = Rotation.from_euler(
                rot_order, angles, degrees=True).as_quat()

    return MotionClip(skeleton=skeleton, root_pos=root_pos,
                      local_quats=local_quats, frame_time=frame_time)


def write_bvh(clip: MotionClip) -> str:
    """Serialize a clip; joints without declared channels get ZXY defaults."""
    sk = clip.skeleton
    channels = [j.channels or (DEFAULT_ROOT_CHANNELS if i == 0
                               else DEFAULT_JOINT_CHANNELS)
                for i, j in enumerate(sk.joints)]
    out = io.StringIO()
    out.write("HIERARCHY\n")

    def write_joint(ji: int, depth: int) -> None:
        pad = "  " * depth
        kw = "ROOT" if ji == 0 else "JOINT"
        out.write(f"{pad}{kw} {sk.names[ji]}\n{pad}{{\n")
        ox, oy, oz = sk.joints[ji].offset
        out.write(f"{pad}  OFFSET {ox:.6f} {oy:.6f} {oz:.6f}\n")
        ch = channels[ji]
        out.write(f"{pad}  CHANNELS {len(ch)} {' '.join(ch)}\n")
        kids = sk.children(ji)
        if kids:
            for k in kids:
                write_joint(k, depth + 1)
        if ji in sk.end_sites or not kids:
            ex, ey, ez = sk.end_sites.get(ji, (0.0, 0.0, 0.0))
            out.write(f"{pad}  End Site\n{pad}  {{\n")
            out.write(f"{pad}    OFFSET {ex:.6f} {ey:.6f} {ez:.6f}\n")
            out.write(f"{pad}  }}\n")
        out.write(f"{pad}}}\n")

    write_joint(0, 0)
    out.write("MOTION\n")
    out.write(f"Frames: {clip.n_frames}\n")
    out.write(f"Frame Time: {clip.frame_time:.8f}\n")

    for f in range(clip.n_frames):
        row: list[str] = []
        for ji in range(sk.n_joints):
            ch = channels[ji]
            rot_order = "".join(_ROT_AXIS[c] for c in ch if c in _ROT_AXIS)
            angles = None
            if rot_order:
                angles = Rotation.from_quat(clip.local_quats[f, ji]).as_euler(
                    rot_order, degrees=True)
            ri = 0
            for c in ch:
                if c in _POS_INDEX:
                    k = _POS_INDEX[c]
                    v = clip.root_pos[f, k] - sk.joints[0].offset[k] if ji == 0 else 0.0
                    row.append(f"{v:.6f}")
                else:
                    row.append(f"{angles[ri]:.6f}")
                    ri += 1
        out.write(" ".join(row) + "\n")
    return out.getvalue()
