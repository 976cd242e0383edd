from .skeleton import (ACTION_NAMES, CONTACT_JOINTS, Joint, MotionClip,
                       MotionFrame, Skeleton, STAND, WALK, default_character)
from .bvh import parse_bvh, write_bvh
from .retarget import (fix_toe_height, ik_damped_ls, load_joint_map,
                       retarget_clip, scale_skeleton)

__all__ = [
    "ACTION_NAMES", "CONTACT_JOINTS", "Joint", "MotionClip", "MotionFrame",
    "STAND", "Skeleton", "WALK", "default_character", "fix_toe_height",
    "ik_damped_ls", "load_joint_map", "parse_bvh", "retarget_clip",
    "scale_skeleton", "write_bvh",
]
