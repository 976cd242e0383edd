"""Training tensors from labeled clips, plus the dataset container format.

A dataset concatenates per-frame pose channels, control trajectories, phase
and action labels across clips. Training samples are consecutive-frame pairs
that do not straddle a clip boundary: input = [pose_t, traj_t], target =
[pose_{t+1}, traj_{t+1}], stored unnormalized with normalization statistics
alongside.

Container format: 8-byte magic "MSTY0001", a little-endian uint32 byte
length, a UTF-8 JSON header (sorted keys) declaring shapes and order, then
raw little-endian float32 array blobs. Integer arrays ride as float32; the
values are small enough to be exact.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, LabelingError, ParseError
from ..motion.skeleton import STAND, Joint, MotionClip, Skeleton
from .phase import compute_phase
from .pose_channels import clip_pose_channels, pose_dim
from .trajectory import TRAJ_DIM, extract_trajectory, flatten_trajectory

MAGIC = b"MSTY0001"
STD_FLOOR = 1e-6


@dataclass
class DatasetStats:
    input_mean: np.ndarray
    input_std: np.ndarray
    target_mean: np.ndarray
    target_std: np.ndarray

    @staticmethod
    def from_arrays(inputs: np.ndarray, targets: np.ndarray) -> "DatasetStats":
        def mean_std(a):
            m = a.mean(axis=0)
            s = np.maximum(a.std(axis=0), STD_FLOOR)
            return m.astype(np.float32), s.astype(np.float32)

        im, istd = mean_std(inputs)
        tm, tstd = mean_std(targets)
        return DatasetStats(im, istd, tm, tstd)

    def normalize_input(self, x: np.ndarray) -> np.ndarray:
        return (x - self.input_mean) / self.input_std

    def normalize_target(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / self.target_std

    def denormalize_target(self, y: np.ndarray) -> np.ndarray:
        return y * self.target_std + self.target_mean


@dataclass
class TrainingSample:
    pose: np.ndarray           # (pose_dim,) at t
    trajectory: np.ndarray     # (TRAJ_DIM,) at t
    phase: float
    style_onehot: np.ndarray
    target_pose: np.ndarray    # at t+1
    target_trajectory: np.ndarray


@dataclass
class MotionDataset:
    fps: int
    style_names: tuple
    skeleton: Skeleton
    pose: np.ndarray          # (F, pose_dim) float32
    traj: np.ndarray          # (F, TRAJ_DIM) float32
    phase: np.ndarray         # (F,) float32
    action: np.ndarray        # (F,) int64
    clip_offsets: np.ndarray  # (C+1,) int64, last entry = F
    clip_style: np.ndarray    # (C,) int64
    clip_names: tuple
    stats: DatasetStats
    walk_phase_rate: float    # mean phase advance per frame while walking
    bbox: np.ndarray          # (2, 3) float32 world-position min/max
    sample_frames: np.ndarray = field(init=False)  # (S,) frame index t

    def __post_init__(self):
        # a frame starts a sample unless its successor begins another clip
        ends = set(int(e) for e in self.clip_offsets[1:])
        self.sample_frames = np.array(
            [t for t in range(self.pose.shape[0] - 1) if t + 1 not in ends],
            dtype=np.int64)

    @property
    def n_frames(self) -> int:
        return self.pose.shape[0]

    @property
    def n_clips(self) -> int:
        return len(self.clip_style)

    @property
    def n_styles(self) -> int:
        return len(self.style_names)

    @property
    def n_samples(self) -> int:
        return len(self.sample_frames)

    def frame_style(self) -> np.ndarray:
        """(F,) style index per frame."""
        out = np.empty(self.n_frames, dtype=np.int64)
        for c in range(self.n_clips):
            out[self.clip_offsets[c]:self.clip_offsets[c + 1]] = \
                self.clip_style[c]
        return out

    def style_onehot(self, index: int) -> np.ndarray:
        v = np.zeros(self.n_styles, dtype=np.float32)
        v[index] = 1.0
        return v

    def input_matrix(self) -> np.ndarray:
        """(S, pose_dim + TRAJ_DIM) unnormalized inputs at sample frames."""
        t = self.sample_frames
        return np.concatenate([self.pose[t], self.traj[t]], axis=1)

    def target_matrix(self) -> np.ndarray:
        t = self.sample_frames + 1
        return np.concatenate([self.pose[t], self.traj[t]], axis=1)

    def sample(self, i: int) -> TrainingSample:
        t = int(self.sample_frames[i])
        style = int(self.frame_style()[t])
        return TrainingSample(
            pose=self.pose[t], trajectory=self.traj[t],
            phase=float(self.phase[t]),
            style_onehot=self.style_onehot(style),
            target_pose=self.pose[t + 1],
            target_trajectory=self.traj[t + 1])


def build_dataset(clips: list) -> MotionDataset:
    """Featurize labeled clips; stats cover all consecutive-pair samples."""
    if not clips:
        raise ConfigError("no clips given")
    fps = int(round(1.0 / clips[0].frame_time))
    skeleton = clips[0].skeleton

    style_names: list = []
    pose_rows, traj_rows, phase_rows, action_rows = [], [], [], []
    offsets = [0]
    clip_style, clip_names = [], []
    lo = np.full(3, np.inf)
    hi = np.full(3, -np.inf)

    for clip in clips:
        if clip.action_labels is None or clip.contact_labels is None:
            raise LabelingError(f"clip {clip.name!r} is missing labels")
        if not clip.style_label:
            raise LabelingError(f"clip {clip.name!r} has no style label")
        if clip.style_label not in style_names:
            style_names.append(clip.style_label)
        clip_style.append(style_names.index(clip.style_label))
        clip_names.append(clip.name)

        pose_rows.append(clip_pose_channels(clip).astype(np.float32))
        traj_rows.append(np.stack(
            [flatten_trajectory(extract_trajectory(clip, t))
             for t in range(clip.n_frames)]).astype(np.float32))
        phase_rows.append(compute_phase(clip.contact_labels,
                                        clip.action_labels))
        action_rows.append(np.asarray(clip.action_labels, dtype=np.int64))
        offsets.append(offsets[-1] + clip.n_frames)
        world_p, _ = clip.world()
        lo = np.minimum(lo, world_p.reshape(-1, 3).min(axis=0))
        hi = np.maximum(hi, world_p.reshape(-1, 3).max(axis=0))

    pose = np.concatenate(pose_rows)
    traj = np.concatenate(traj_rows)
    phase = np.concatenate(phase_rows)
    action = np.concatenate(action_rows)
    clip_offsets = np.asarray(offsets, dtype=np.int64)

    ends = set(int(e) for e in clip_offsets[1:])
    sample_t = np.array([t for t in range(pose.shape[0] - 1)
                         if t + 1 not in ends], dtype=np.int64)
    inputs = np.concatenate([pose[sample_t], traj[sample_t]], axis=1)
    targets = np.concatenate([pose[sample_t + 1], traj[sample_t + 1]], axis=1)
    stats = DatasetStats.from_arrays(inputs, targets)

    walk_pair = (action[sample_t] != STAND) & (action[sample_t + 1] != STAND)
    if walk_pair.any():
        delta = (phase[sample_t + 1] - phase[sample_t] + 0.5) % 1.0 - 0.5
        rate = float(np.mean(delta[walk_pair]))
    else:
        rate = 0.0

    return MotionDataset(
        fps=fps, style_names=tuple(style_names), skeleton=skeleton,
        pose=pose, traj=traj, phase=phase.astype(np.float32), action=action,
        clip_offsets=clip_offsets,
        clip_style=np.asarray(clip_style, dtype=np.int64),
        clip_names=tuple(clip_names), stats=stats, walk_phase_rate=rate,
        bbox=np.stack([lo, hi]).astype(np.float32))


def _skeleton_header(sk: Skeleton) -> dict:
    return {
        "joints": [{"name": j.name, "parent": j.parent,
                    "offset": list(j.offset),
                    "channels": list(j.channels)} for j in sk.joints],
        "end_sites": {str(k): list(v) for k, v in sk.end_sites.items()},
    }


def _skeleton_from_header(h: dict) -> Skeleton:
    joints = [Joint(name=j["name"], parent=j["parent"],
                    offset=tuple(j["offset"]),
                    channels=tuple(j["channels"])) for j in h["joints"]]
    end_sites = {int(k): tuple(v) for k, v in h.get("end_sites", {}).items()}
    return Skeleton(joints, end_sites=end_sites)


_ARRAY_ORDER = ("pose", "traj", "phase", "action", "clip_offsets",
                "clip_style", "input_mean", "input_std", "target_mean",
                "target_std", "bbox")
_INT_ARRAYS = {"action", "clip_offsets", "clip_style"}


def dataset_to_bytes(ds: MotionDataset) -> bytes:
    arrays = {
        "pose": ds.pose, "traj": ds.traj, "phase": ds.phase,
        "action": ds.action, "clip_offsets": ds.clip_offsets,
        "clip_style": ds.clip_style,
        "input_mean": ds.stats.input_mean, "input_std": ds.stats.input_std,
        "target_mean": ds.stats.target_mean,
        "target_std": ds.stats.target_std, "bbox": ds.bbox,
    }
    header = {
        "fps": ds.fps,
        "styles": list(ds.style_names),
        "clip_names": list(ds.clip_names),
        "skeleton": _skeleton_header(ds.skeleton),
        "walk_phase_rate": ds.walk_phase_rate,
        "arrays": [{"name": k, "shape": list(arrays[k].shape)}
                   for k in _ARRAY_ORDER],
    }
    blob = json.dumps(header, sort_keys=True,
                      separators=(",", ":")).encode("utf-8")
    parts = [MAGIC, struct.pack("<I", len(blob)), blob]
    for k in _ARRAY_ORDER:
        parts.append(np.ascontiguousarray(
            arrays[k], dtype="<f4").tobytes())
    return b"".join(parts)


def dataset_from_bytes(data: bytes) -> MotionDataset:
    if data[:8] != MAGIC:
        raise ParseError("bad dataset magic")
    (hlen,) = struct.unpack_from("<I", data, 8)
    try:
        header = json.loads(data[12:12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"bad dataset header: {exc}") from exc

    arrays = {}
    off = 12 + hlen
    for entry in header["arrays"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape)) if shape else 1
        a = np.frombuffer(data, dtype="<f4", count=count,
                          offset=off).reshape(shape).copy()
        off += count * 4
        name = entry["name"]
        arrays[name] = a.astype(np.int64) if name in _INT_ARRAYS else a
    missing = [k for k in _ARRAY_ORDER if k not in arrays]
    if missing:
        raise ParseError(f"dataset header missing arrays: {missing}")

    stats = DatasetStats(arrays["input_mean"], arrays["input_std"],
                         arrays["target_mean"], arrays["target_std"])
    return MotionDataset(
        fps=int(header["fps"]), style_names=tuple(header["styles"]),
        skeleton=_skeleton_from_header(header["skeleton"]),
        pose=arrays["pose"], traj=arrays["traj"], phase=arrays["phase"],
        action=arrays["action"], clip_offsets=arrays["clip_offsets"],
        clip_style=arrays["clip_style"],
        clip_names=tuple(header["clip_names"]), stats=stats,
        walk_phase_rate=float(header["walk_phase_rate"]),
        bbox=arrays["bbox"])


def save_dataset(ds: MotionDataset, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dataset_to_bytes(ds))


def load_dataset(path) -> MotionDataset:
    with open(path, "rb") as fh:
        return dataset_from_bytes(fh.read())
