"""Nearest-centroid style classifier over windowed rotation statistics.

Generated motion has no labels, so transfer and interpolation verdicts need
an observer that was built from the training corpus alone: per style, the
centroid and diagonal variance of (mean, std) features of the rotation
channels over one-second windows. Only windows of uninterrupted walking
count, because the corpus styles are walking styles and every style stands
identically. Distances are Mahalanobis under the style's own variance,
regularized by the global variance plus an absolute floor so channels that
are constant across the corpus cannot dominate.

The classifier must re-classify its own training windows almost perfectly;
otherwise no verdict about generated motion is trustworthy and fitting
aborts instead of handing back a weak observer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, EvaluationError
from ..features.dataset import MotionDataset
from ..motion.skeleton import WALK

WINDOW_SECONDS = 1.0
ACCURACY_GATE = 0.95
VARIANCE_FLOOR = 1e-2


def window_starts(n_frames: int, window: int, hop: int) -> range:
    if window < 1 or hop < 1:
        raise ConfigError(f"window and hop must be >= 1, got {window}, {hop}")
    return range(0, n_frames - window + 1, hop)


def rotation_window_features(pose: np.ndarray, n_joints: int, window: int,
                             hop: int) -> np.ndarray:
    """(N, 12J) per-window mean and std of the pose rotation channels.

    Windows start every `hop` frames and must fit entirely inside the
    stream; a stream shorter than one window yields an empty (0, 12J)
    array.
    """
    rot = np.asarray(pose, dtype=np.float64)[:, 3 * n_joints:9 * n_joints]
    feats = []
    for s in window_starts(rot.shape[0], window, hop):
        seg = rot[s:s + window]
        feats.append(np.concatenate([seg.mean(axis=0), seg.std(axis=0)]))
    if not feats:
        return np.zeros((0, 2 * rot.shape[1]))
    return np.stack(feats)


@dataclass
class StyleClassifier:
    style_names: tuple
    centroids: np.ndarray      # (S, D) float64
    variances: np.ndarray      # (S, D) raw per-style diagonal variance
    metric_var: np.ndarray     # (S, D) regularized variance used in distances
    window_frames: int
    hop_frames: int
    self_accuracy: float
    window_counts: np.ndarray  # (S,) training windows behind each centroid

    @property
    def n_styles(self) -> int:
        return len(self.style_names)

    def distances(self, feats: np.ndarray) -> np.ndarray:
        """(N, D) features -> (N, S) Mahalanobis distance to each centroid."""
        feats = np.asarray(feats, dtype=np.float64)
        if feats.ndim != 2 or feats.shape[1] != self.centroids.shape[1]:
            raise ConfigError(
                f"features must be (N, {self.centroids.shape[1]}), "
                f"got {feats.shape}")
        diff = feats[:, None, :] - self.centroids[None, :, :]
        return np.sqrt((diff * diff / self.metric_var[None]).sum(axis=2))

    def predict(self, feats: np.ndarray) -> np.ndarray:
        return self.distances(feats).argmin(axis=1)

    def classify_stream(self, pose: np.ndarray, n_joints: int) -> int:
        """Style index whose centroid is nearest on average over windows."""
        feats = rotation_window_features(pose, n_joints, self.window_frames,
                                         self.hop_frames)
        if feats.shape[0] == 0:
            raise EvaluationError(
                f"stream of {pose.shape[0]} frames is shorter than one "
                f"classifier window ({self.window_frames})")
        return int(self.distances(feats).mean(axis=0).argmin())

    @staticmethod
    def fit(ds: MotionDataset,
            window_seconds: float = WINDOW_SECONDS) -> "StyleClassifier":
        n_j = ds.skeleton.n_joints
        window = max(int(round(ds.fps * window_seconds)), 1)
        hop = max(window // 2, 1)

        feats, labels = [], []
        for c in range(ds.n_clips):
            lo, hi = int(ds.clip_offsets[c]), int(ds.clip_offsets[c + 1])
            f = rotation_window_features(ds.pose[lo:hi], n_j, window, hop)
            walking = np.array(
                [bool((ds.action[lo + s:lo + s + window] == WALK).all())
                 for s in window_starts(hi - lo, window, hop)])
            feats.append(f[walking] if f.shape[0] else f)
            labels.append(np.full(int(walking.sum()) if f.shape[0] else 0,
                                  ds.clip_style[c]))
        feats = np.concatenate(feats)
        labels = np.concatenate(labels)

        n_styles = ds.n_styles
        dim = feats.shape[1]
        centroids = np.zeros((n_styles, dim))
        variances = np.zeros((n_styles, dim))
        for s in range(n_styles):
            own = feats[labels == s]
            if own.shape[0] == 0:
                raise EvaluationError(
                    f"style {ds.style_names[s]!r} yielded no classifier "
                    f"windows")
            centroids[s] = own.mean(axis=0)
            variances[s] = own.var(axis=0)
        metric_var = variances + feats.var(axis=0)[None] + VARIANCE_FLOOR

        counts = np.array([(labels == s).sum() for s in range(n_styles)])
        clf = StyleClassifier(
            style_names=tuple(ds.style_names), centroids=centroids,
            variances=variances, metric_var=metric_var,
            window_frames=window, hop_frames=hop, self_accuracy=0.0,
            window_counts=counts)
        acc = float((clf.predict(feats) == labels).mean())
        clf.self_accuracy = acc
        if acc < ACCURACY_GATE:
            raise EvaluationError(
                f"style classifier is inconclusive: self accuracy {acc:.3f} "
                f"is below the {ACCURACY_GATE} gate, styles are not "
                f"separable in window statistics")
        return clf
