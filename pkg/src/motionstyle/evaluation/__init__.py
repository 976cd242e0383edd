"""Replay, transfer and interpolation evaluations with report artifacts."""

from .classifier import StyleClassifier, rotation_window_features
from .drive import ControlScript, DriveResult, WalkWindow, drive, \
    walking_script
from .interpolation import InterpolationResult, corpus_pose_bounds, \
    interpolation_eval, margin_verdict, positions_within, scale_bounds
from .replay import DIVERGENCE_LIMIT, ReplayResult, replay_eval, \
    replay_suite, style_mse
from .report import AbilityMatrix, DEFAULT_THRESHOLDS, config_hash, \
    format_matrix, make_run_dir, write_ability_matrix, write_mse_table, \
    write_replay_csv
from .transition import CONTINUITY_FACTOR, TransitionResult, \
    max_joint_displacement, style_ramp, transition_eval

__all__ = [
    "AbilityMatrix", "CONTINUITY_FACTOR", "ControlScript",
    "DEFAULT_THRESHOLDS", "DIVERGENCE_LIMIT", "DriveResult",
    "InterpolationResult", "ReplayResult", "StyleClassifier",
    "TransitionResult", "WalkWindow", "config_hash", "corpus_pose_bounds",
    "drive", "format_matrix", "interpolation_eval", "make_run_dir",
    "margin_verdict", "max_joint_displacement", "positions_within",
    "replay_eval",
    "replay_suite", "rotation_window_features", "scale_bounds", "style_mse",
    "style_ramp", "transition_eval", "walking_script", "write_ability_matrix",
    "write_mse_table", "write_replay_csv",
]
