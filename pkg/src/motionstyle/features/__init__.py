"""Featurization: phase, pose channels, trajectories, datasets, corpus."""

from .dataset import (DatasetStats, MotionDataset, TrainingSample,
                      build_dataset, dataset_from_bytes, dataset_to_bytes,
                      load_dataset, save_dataset)
from .phase import compute_phase
from .pose_channels import (advance_root, clip_pose_channels, pose_dim,
                            pose_to_world, split_pose)
from .synthetic import (DEFAULT_STYLES, StyleSpec, generate_synthetic_corpus,
                        label_contacts)
from .trajectory import (GAIT_DIM, N_SAMPLES, SAMPLE_DIM, TRAJ_DIM,
                         extract_trajectory, flatten_trajectory, gait_block,
                         gait_one_hot)

__all__ = [
    "DatasetStats", "MotionDataset", "TrainingSample", "build_dataset",
    "dataset_from_bytes", "dataset_to_bytes", "load_dataset", "save_dataset",
    "compute_phase", "advance_root", "clip_pose_channels", "pose_dim",
    "pose_to_world", "split_pose", "DEFAULT_STYLES", "StyleSpec",
    "generate_synthetic_corpus", "label_contacts", "GAIT_DIM", "N_SAMPLES",
    "SAMPLE_DIM", "TRAJ_DIM", "extract_trajectory", "flatten_trajectory",
    "gait_block", "gait_one_hot",
]
