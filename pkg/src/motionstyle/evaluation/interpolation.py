"""Style interpolation: generate under the midpoint of two style embeddings.

The blended style never appears in training, so there is no ground truth;
the checks are indirect. Bounded: every generated root-frame joint position
stays inside the corpus bounding box scaled about its center. Intermediate:
the generation must sit closer to each parent's centroid than the parents
sit to each other, under each parent's own metric. With identical parents
the midpoint is the parent itself and the verdict reduces to single-style
generation being recognized as that style.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..features.dataset import MotionDataset
from ..models.modulation import blend_styles
from .classifier import StyleClassifier, rotation_window_features
from .drive import ControlScript, drive, walking_script
from .transition import _style_index

BBOX_FACTOR = 1.5


@dataclass
class InterpolationResult:
    variant: str
    parent_a: str
    parent_b: str
    bounded: bool
    margins: tuple           # mean window distance to each parent centroid
    references: tuple        # the parents' inter-centroid distances
    classified: str
    completed: bool
    passed: bool


def corpus_pose_bounds(ds: MotionDataset) -> np.ndarray:
    """(2, 3) min/max of root-frame joint positions over the corpus."""
    n_j = ds.skeleton.n_joints
    pos = ds.pose[:, :3 * n_j].reshape(-1, 3).astype(np.float64)
    return np.stack([pos.min(axis=0), pos.max(axis=0)])


def scale_bounds(bounds: np.ndarray, factor: float) -> np.ndarray:
    center = bounds.mean(axis=0)
    half = (bounds[1] - bounds[0]) / 2.0
    return np.stack([center - factor * half, center + factor * half])


def positions_within(pose: np.ndarray, n_joints: int,
                     bounds: np.ndarray) -> bool:
    pos = np.asarray(pose, dtype=np.float64)[:, :3 * n_joints]
    pos = pos.reshape(-1, 3)
    if not np.isfinite(pos).all():
        return False
    return bool(((pos >= bounds[0]) & (pos <= bounds[1])).all())


def _steady_features(pose: np.ndarray, n_joints: int,
                     clf: StyleClassifier) -> np.ndarray:
    # skip one window of warm-up when the run is long enough to afford it
    w = clf.window_frames
    start = w if pose.shape[0] >= 2 * w else 0
    return rotation_window_features(pose[start:], n_joints, w,
                                    clf.hop_frames)


def margin_verdict(classifier: StyleClassifier, i1: int, i2: int,
                   dists: np.ndarray) -> tuple:
    """((d1, d2), (r1, r2), ok) for distinct parents.

    d_i is the generation's mean distance to parent i, r_i the other
    parent's centroid distance under the same metric; intermediate means
    beating both references.
    """
    d1, d2 = float(dists[i1]), float(dists[i2])
    r1 = float(classifier.distances(classifier.centroids[i2][None])[0, i1])
    r2 = float(classifier.distances(classifier.centroids[i1][None])[0, i2])
    return (d1, d2), (r1, r2), d1 < r1 and d2 < r2


def interpolation_eval(model, ds: MotionDataset, parent_a: str,
                       parent_b: str, classifier: StyleClassifier,
                       duration: int) -> InterpolationResult:
    """Generate `duration` frames at the 50/50 style blend and judge them."""
    i1 = _style_index(ds, parent_a)
    i2 = _style_index(ds, parent_b)
    blended = blend_styles(ds.style_onehot(i1), ds.style_onehot(i2), 0.5)

    window = walking_script(ds, i1, duration)
    script = ControlScript(
        traj=window.traj, phase=window.phase,
        styles=np.broadcast_to(blended, (duration, blended.shape[0])))
    out = drive(model, window.seed_pose, script)
    completed = out.completed and out.pose.shape[0] == duration

    n_j = ds.skeleton.n_joints
    bounds = scale_bounds(corpus_pose_bounds(ds), BBOX_FACTOR)
    bounded = completed and positions_within(out.pose, n_j, bounds)
    if not completed:
        return InterpolationResult(
            variant=model.variant, parent_a=parent_a, parent_b=parent_b,
            bounded=False, margins=(float("inf"), float("inf")),
            references=(0.0, 0.0), classified="", completed=False,
            passed=False)

    feats = _steady_features(out.pose, n_j, classifier)
    dists = classifier.distances(feats).mean(axis=0)
    classified = int(dists.argmin())
    if i1 == i2:
        # the midpoint of a style with itself is that style
        d = float(dists[i1])
        margins, references = (d, d), (0.0, 0.0)
        passed = bounded and classified == i1
    else:
        margins, references, intermediate = margin_verdict(
            classifier, i1, i2, dists)
        passed = bounded and intermediate
    return InterpolationResult(
        variant=model.variant, parent_a=parent_a, parent_b=parent_b,
        bounded=bounded, margins=margins, references=references,
        classified=ds.style_names[classified], completed=True, passed=passed)
