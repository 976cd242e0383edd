import numpy as np
import pytest

from motionstyle.errors import ConfigError, EvaluationError
from motionstyle.evaluation import StyleClassifier, rotation_window_features
from motionstyle.evaluation.classifier import (ACCURACY_GATE, window_starts)
from motionstyle.features.dataset import build_dataset
from motionstyle.features.synthetic import StyleSpec, generate_synthetic_corpus
from motionstyle.motion.skeleton import WALK


def hand_classifier(centroids, metric_var, names=("a", "b"), window=2, hop=1):
    centroids = np.asarray(centroids, dtype=np.float64)
    return StyleClassifier(
        style_names=tuple(names), centroids=centroids,
        variances=np.zeros_like(centroids),
        metric_var=np.asarray(metric_var, dtype=np.float64),
        window_frames=window, hop_frames=hop, self_accuracy=1.0,
        window_counts=np.ones(centroids.shape[0], dtype=int))


class TestWindowFeatures:
    def test_mean_and_std_by_hand(self):
        # one joint: pose width 12, rotation channels are columns 3..8
        pose = np.zeros((4, 12))
        pose[:, 3] = [1.0, 2.0, 3.0, 4.0]
        f = rotation_window_features(pose, 1, window=2, hop=2)
        assert f.shape == (2, 12)
        assert f[0, 0] == 1.5    # mean of rotation channel 0, frames 0..1
        assert f[1, 0] == 3.5
        assert f[0, 6] == 0.5    # std of the same channel and window
        assert (f[:, 1:6] == 0.0).all() and (f[:, 7:] == 0.0).all()

    def test_short_stream_is_empty(self):
        f = rotation_window_features(np.zeros((3, 12)), 1, window=4, hop=1)
        assert f.shape == (0, 12)

    def test_window_starts(self):
        assert list(window_starts(10, 4, 2)) == [0, 2, 4, 6]
        assert list(window_starts(3, 4, 2)) == []
        with pytest.raises(ConfigError, match=">= 1"):
            window_starts(10, 0, 2)
        with pytest.raises(ConfigError, match=">= 1"):
            window_starts(10, 4, 0)


class TestDistances:
    def test_mahalanobis_by_hand(self):
        clf = hand_classifier([[0.0, 0.0], [4.0, 0.0]],
                              [[1.0, 1.0], [4.0, 4.0]])
        d = clf.distances(np.array([[2.4, 0.0]]))
        np.testing.assert_allclose(d, [[2.4, 0.8]])
        assert clf.predict(np.array([[2.4, 0.0]])).tolist() == [1]

    def test_metric_overrides_euclidean_order(self):
        # (1.6, 0) is closer to centroid a in plain distance, but a's
        # tight variance makes b the Mahalanobis winner
        clf = hand_classifier([[0.0, 0.0], [4.0, 0.0]],
                              [[1.0, 1.0], [4.0, 4.0]])
        d = clf.distances(np.array([[1.6, 0.0]]))
        np.testing.assert_allclose(d, [[1.6, 1.2]])
        assert clf.predict(np.array([[1.6, 0.0]])).tolist() == [1]

    def test_feature_width_checked(self):
        clf = hand_classifier([[0.0, 0.0], [4.0, 0.0]],
                              [[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(ConfigError, match="features must be"):
            clf.distances(np.zeros((3, 5)))


class TestClassifyStream:
    def _twelve_dim(self):
        centroids = np.zeros((2, 12))
        centroids[1, 0] = 10.0   # style b swings rotation channel 0 high
        return hand_classifier(centroids, np.ones((2, 12)), window=2, hop=2)

    def test_nearest_style_wins(self):
        clf = self._twelve_dim()
        pose = np.zeros((4, 12))
        pose[:, 3] = 10.0
        assert clf.classify_stream(pose, 1) == 1
        assert clf.classify_stream(np.zeros((4, 12)), 1) == 0

    def test_short_stream_rejected(self):
        clf = self._twelve_dim()
        with pytest.raises(EvaluationError, match="shorter than one"):
            clf.classify_stream(np.zeros((1, 12)), 1)


class TestFit:
    def test_separates_default_styles(self, eval_corpus, style_classifier):
        clf = style_classifier
        assert clf.style_names == eval_corpus.style_names
        assert clf.self_accuracy >= ACCURACY_GATE
        assert clf.window_frames == 30
        assert clf.hop_frames == 15
        assert (clf.metric_var > 0.0).all()

    def test_fit_is_deterministic(self, eval_corpus, style_classifier):
        again = StyleClassifier.fit(eval_corpus)
        np.testing.assert_array_equal(again.centroids,
                                      style_classifier.centroids)
        np.testing.assert_array_equal(again.metric_var,
                                      style_classifier.metric_var)
        assert again.self_accuracy == style_classifier.self_accuracy

    def test_counts_only_pure_walking_windows(self, eval_corpus,
                                              style_classifier):
        ds = eval_corpus
        clf = style_classifier
        expected = 0
        for c in range(ds.n_clips):
            lo, hi = int(ds.clip_offsets[c]), int(ds.clip_offsets[c + 1])
            for s in range(0, hi - lo - clf.window_frames + 1,
                           clf.hop_frames):
                if (ds.action[lo + s:lo + s + clf.window_frames]
                        == WALK).all():
                    expected += 1
        assert int(clf.window_counts.sum()) == expected
        assert (clf.window_counts > 0).all()

    def test_indistinguishable_styles_abort(self):
        twins = (StyleSpec("a", 0.50, 1.9, 25.0, 2.0, 0.025),
                 StyleSpec("b", 0.50, 1.9, 25.0, 2.0, 0.025))
        ds = build_dataset(generate_synthetic_corpus(
            twins, seconds_per_style=6.0, fps=30, seed=3))
        with pytest.raises(EvaluationError, match="inconclusive"):
            StyleClassifier.fit(ds)
