import numpy as np
import pytest

from motionstyle.errors import ConfigError, NumericError
from motionstyle.evaluation import (corpus_pose_bounds, interpolation_eval,
                                    margin_verdict, max_joint_displacement,
                                    positions_within, scale_bounds,
                                    style_ramp, transition_eval)
from test_evaluation_classifier import hand_classifier


class _DiesImmediately:
    variant = "phase"

    def step(self, pose, traj, phase, style):
        raise NumericError("non-finite de-normalized model output")


class _Explodes:
    """Finite output that grows without bound: completes but leaves the box."""

    variant = "phase"

    def step(self, pose, traj, phase, style):
        return pose + 1000.0, traj, np.zeros((1, 1), dtype=np.float32)


class TestStyleRamp:
    def test_piecewise_values_exact(self):
        lam = style_ramp(180, trigger=60, fps=30.0)
        assert (lam[:61] == 0.0).all()
        for k in range(0, 120):
            assert lam[60 + k] == min(k / 30.0, 1.0)
        assert lam[89] < 1.0
        assert lam[90] == 1.0

    def test_duration_scales_ramp(self):
        lam = style_ramp(100, trigger=10, fps=30.0, duration_s=0.5)
        assert lam[10 + 15] == 1.0
        assert lam[10 + 14] < 1.0


class TestDisplacement:
    def test_hand_oracle_two_joints(self):
        pose = np.zeros((3, 24))
        pose[1, 0:3] = [1.0, 2.0, 2.0]    # joint 0 moves norm 3
        pose[1, 3:6] = [0.0, 0.0, 1.0]    # joint 1 moves norm 1
        pose[2, 0:3] = [1.0, 2.0, 2.0]    # joint 0 holds
        pose[2, 3:6] = [0.0, 4.0, 1.0]    # joint 1 moves norm 4
        pose[:, 6:18] = np.random.default_rng(0).normal(
            scale=100.0, size=(3, 12))    # rotations must not matter
        disp = max_joint_displacement(pose, 2)
        np.testing.assert_allclose(disp, [3.0, 4.0])


class TestTransition:
    def test_identity_transition_passes(self, eval_corpus, trained_phase,
                                        style_classifier):
        res = transition_eval(trained_phase, eval_corpus, "neutral",
                              "neutral", style_classifier)
        assert res.completed
        assert res.classified == "neutral"
        assert res.passed
        assert res.continuity < res.continuity_factor * res.steady_state

    def test_cross_transition_structure(self, eval_corpus, trained_phase,
                                        style_classifier):
        res = transition_eval(trained_phase, eval_corpus, "neutral", "march",
                              style_classifier)
        assert res.completed
        assert res.source == "neutral" and res.target == "march"
        np.testing.assert_array_equal(res.lambdas, style_ramp(180, 60, 30.0))
        assert res.classified in eval_corpus.style_names
        assert 0.0 < res.steady_state < np.inf
        assert 0.0 < res.continuity < np.inf

    def test_failed_run_reported_not_raised(self, eval_corpus,
                                            style_classifier):
        res = transition_eval(_DiesImmediately(), eval_corpus, "neutral",
                              "march", style_classifier)
        assert not res.completed
        assert not res.passed
        assert res.continuity == np.inf
        assert res.classified == ""

    def test_unknown_style_rejected(self, eval_corpus, trained_phase,
                                    style_classifier):
        with pytest.raises(ConfigError, match="unknown style"):
            transition_eval(trained_phase, eval_corpus, "neutral", "heroic",
                            style_classifier)

    def test_short_trigger_rejected(self, eval_corpus, trained_phase,
                                    style_classifier):
        with pytest.raises(ConfigError, match="baseline"):
            transition_eval(trained_phase, eval_corpus, "neutral", "march",
                            style_classifier, trigger_s=0.0)


class TestBounds:
    def test_scale_about_center(self):
        bounds = np.array([[0.0, 0.0, 0.0], [2.0, 4.0, 6.0]])
        scaled = scale_bounds(bounds, 1.5)
        np.testing.assert_allclose(scaled, [[-0.5, -1.0, -1.5],
                                            [2.5, 5.0, 7.5]])

    def test_positions_within(self):
        bounds = np.array([[-1.0, -1.0, -1.0], [1.0, 1.0, 1.0]])
        pose = np.zeros((2, 12))
        pose[:, 6:] = 1e6   # only position channels are judged
        assert positions_within(pose, 1, bounds)
        pose[0, 0] = 5.0
        assert not positions_within(pose, 1, bounds)
        pose[0, 0] = np.nan
        assert not positions_within(pose, 1, bounds)

    def test_corpus_bounds_cover_corpus(self, eval_corpus):
        ds = eval_corpus
        bounds = corpus_pose_bounds(ds)
        assert bounds.shape == (2, 3)
        assert positions_within(ds.pose, ds.skeleton.n_joints, bounds)


class TestInterpolation:
    def test_margin_verdict_by_hand(self):
        clf = hand_classifier([[0.0, 0.0], [4.0, 0.0]],
                              [[1.0, 1.0], [4.0, 4.0]])
        margins, refs, ok = margin_verdict(clf, 0, 1, np.array([3.0, 1.5]))
        assert refs == (4.0, 2.0)
        assert margins == (3.0, 1.5)
        assert ok
        _, _, ok = margin_verdict(clf, 0, 1, np.array([5.0, 1.0]))
        assert not ok

    def test_identical_parents_pass(self, eval_corpus, trained_phase,
                                    style_classifier):
        res = interpolation_eval(trained_phase, eval_corpus, "neutral",
                                 "neutral", style_classifier, duration=90)
        assert res.completed and res.bounded
        assert res.classified == "neutral"
        assert res.references == (0.0, 0.0)
        assert res.margins[0] == res.margins[1]
        assert res.passed

    def test_cross_parents_structure(self, eval_corpus, trained_phase,
                                     style_classifier):
        res = interpolation_eval(trained_phase, eval_corpus, "neutral",
                                 "march", style_classifier, duration=90)
        assert res.completed and res.bounded
        assert res.margins[0] > 0.0 and res.margins[1] > 0.0
        assert res.references[0] > 0.0 and res.references[1] > 0.0
        assert res.classified in eval_corpus.style_names

    def test_escaping_the_box_fails(self, eval_corpus, style_classifier):
        res = interpolation_eval(_Explodes(), eval_corpus, "neutral",
                                 "march", style_classifier, duration=90)
        assert res.completed
        assert not res.bounded
        assert not res.passed

    def test_dead_model_reported(self, eval_corpus, style_classifier):
        res = interpolation_eval(_DiesImmediately(), eval_corpus, "neutral",
                                 "march", style_classifier, duration=90)
        assert not res.completed
        assert res.margins == (np.inf, np.inf)
        assert not res.passed
