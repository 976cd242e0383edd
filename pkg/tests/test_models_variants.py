"""Variant step functions and checkpointing: determinism, style-identity
collapse, blend continuity, and container round trips."""

import json
import struct

import numpy as np
import pytest

from motionstyle.errors import (CheckpointError, ConfigError, DimensionError,
                                NumericError)
from motionstyle.features.dataset import build_dataset
from motionstyle.features.synthetic import DEFAULT_STYLES, generate_synthetic_corpus
from motionstyle.models import (ModelConfig, blend_styles, build_model,
                                load_checkpoint, model_from_dataset,
                                save_checkpoint)
from motionstyle.models.checkpoint import MAGIC


@pytest.fixture(scope="module")
def ds():
    clips = generate_synthetic_corpus(DEFAULT_STYLES[:2], seconds_per_style=5.0,
                                      fps=30, seed=11)
    return build_dataset(clips)


def make(ds, variant, seed=7, **overrides):
    return model_from_dataset(ModelConfig(variant=variant, **overrides), ds,
                              seed=seed)


def one_hot(i, n=2):
    v = np.zeros(n, dtype=np.float32)
    v[i] = 1.0
    return v


def run_step(model, ds, style, t=40):
    if model.variant == "phase":
        return model.step(ds.pose[t], ds.traj[t], float(ds.phase[t]), style)
    return model.step(ds.pose[:t + 1], ds.traj[t], style)


def perturb_modulator(model, seed=99):
    rng = np.random.default_rng(seed)
    for p in (model.modulator.scale_weight, model.modulator.shift_weight):
        p.data = (rng.standard_normal(p.data.shape) * 0.5).astype(np.float32)


class TestSteps:
    @pytest.mark.parametrize("variant", ["phase", "tcn", "tcn_win"])
    def test_shapes_and_determinism(self, ds, variant):
        a = make(ds, variant)
        b = make(ds, variant)
        style = one_hot(0)
        pose1, traj1, blend1 = run_step(a, ds, style)
        pose2, traj2, blend2 = run_step(a, ds, style)
        pose3, traj3, blend3 = run_step(b, ds, style)
        assert pose1.shape == (ds.pose.shape[1],)
        assert traj1.shape == (ds.traj.shape[1],)
        assert blend1.shape == (3, 4)
        assert np.all(np.isfinite(pose1)) and np.all(np.isfinite(traj1))
        for x, y in ((pose1, pose2), (traj1, traj2), (blend1, blend2),
                     (pose1, pose3), (traj1, traj3), (blend1, blend3)):
            np.testing.assert_array_equal(x, y)

    @pytest.mark.parametrize("variant", ["phase", "tcn", "tcn_win"])
    def test_identity_modulator_collapses_styles(self, ds, variant):
        """Fresh modulators are the identity, so a fresh model is style
        agnostic: outputs for different styles are bit-identical."""
        model = make(ds, variant)
        outs = [run_step(model, ds, one_hot(i)) for i in range(2)]
        for field in range(3):
            np.testing.assert_array_equal(outs[0][field], outs[1][field])

    @pytest.mark.parametrize("variant", ["phase", "tcn"])
    def test_distinct_modulator_rows_give_distinct_blends(self, ds, variant):
        model = make(ds, variant)
        perturb_modulator(model)
        _, _, blend_a = run_step(model, ds, one_hot(0))
        _, _, blend_b = run_step(model, ds, one_hot(1))
        assert not np.array_equal(blend_a, blend_b)

    @pytest.mark.parametrize("variant", ["phase", "tcn_win"])
    def test_blend_continuity_in_lambda(self, ds, variant):
        """Pose output is continuous in the style mix: a 1e-3 nudge of
        lambda moves the pose far less than a 0.1 jump."""
        model = make(ds, variant)
        perturb_modulator(model)
        s = lambda lam: blend_styles(one_hot(0), one_hot(1), lam)
        base = run_step(model, ds, s(0.5))[0]
        near = run_step(model, ds, s(0.5 + 1e-3))[0]
        far = run_step(model, ds, s(0.5 + 0.1))[0]
        d_near = float(np.linalg.norm(near - base))
        d_far = float(np.linalg.norm(far - base))
        assert 0.0 < d_near < d_far
        assert d_near < 0.05 * d_far

    def test_single_frame_history_is_valid(self, ds):
        """First step after a reset: one frame of history, left-padding
        fills the window."""
        model = make(ds, "tcn_win")
        pose, traj, blend = model.step(ds.pose[:1], ds.traj[0], one_hot(0))
        assert np.all(np.isfinite(pose)) and np.all(np.isfinite(traj))

    def test_long_history_equals_truncated_history(self, ds):
        """Only the trailing window feeds the encoder: a 200-frame buffer
        and its last 31 frames agree bit for bit."""
        model = make(ds, "tcn")
        span = model.config.history_frames
        full = model.step(ds.pose[:200], ds.traj[199], one_hot(1))
        cut = model.step(ds.pose[199 - span:200], ds.traj[199], one_hot(1))
        for a, b in zip(full, cut):
            np.testing.assert_array_equal(a, b)

    def test_input_validation(self, ds):
        phase_model = make(ds, "phase")
        conv_model = make(ds, "tcn")
        with pytest.raises(DimensionError):
            phase_model.step(ds.pose[0][:-1], ds.traj[0], 0.0, one_hot(0))
        with pytest.raises(DimensionError):
            phase_model.step(ds.pose[0], ds.traj[0][:-1], 0.0, one_hot(0))
        with pytest.raises(DimensionError):
            phase_model.step(ds.pose[0], ds.traj[0], 0.0, one_hot(0, n=3))
        with pytest.raises(DimensionError):
            conv_model.step(ds.pose[0], ds.traj[0], one_hot(0))

    def test_non_finite_output_names_layer(self, ds):
        model = make(ds, "phase")
        model.moe.layers[1].weight.data[0, 0] = np.nan
        with pytest.raises(NumericError, match="mixture layer 1"):
            run_step(model, ds, one_hot(0))


class TestConfig:
    def test_bad_values_rejected(self):
        with pytest.raises(ConfigError):
            ModelConfig(variant="gru").validated()
        with pytest.raises(ConfigError):
            ModelConfig(win_std_floor=0.05).validated()
        with pytest.raises(ConfigError):
            ModelConfig(dropout_rate=1.0).validated()
        with pytest.raises(ConfigError):
            ModelConfig(history_frames=0).validated()
        with pytest.raises(ConfigError):
            ModelConfig(tcn_channels=()).validated()

    def test_defaults_validate(self):
        cfg = ModelConfig().validated()
        assert cfg.variant == "phase"
        assert cfg.n_experts == 4 and cfg.n_moe_layers == 3


def tamper(blob, edit_header=None, drop_tail_bytes=0):
    """Re-pack a checkpoint after editing its JSON header in place."""
    (head_len,) = struct.unpack_from("<I", blob, len(MAGIC))
    start = len(MAGIC) + 4
    header = json.loads(blob[start:start + head_len])
    if edit_header is not None:
        edit_header(header)
    body = blob[start + head_len:]
    if drop_tail_bytes:
        body = body[:-drop_tail_bytes]
    head = json.dumps(header, sort_keys=True, separators=(",", ":")).encode()
    return MAGIC + struct.pack("<I", len(head)) + head + body


class TestCheckpoint:
    @pytest.mark.parametrize("variant", ["phase", "tcn", "tcn_win"])
    def test_save_load_save_bytes_identical(self, ds, variant):
        model = make(ds, variant)
        blob = save_checkpoint(model)
        again = save_checkpoint(load_checkpoint(blob))
        assert blob == again

    @pytest.mark.parametrize("variant", ["phase", "tcn_win"])
    def test_loaded_model_outputs_bit_identical(self, ds, variant):
        model = make(ds, variant)
        perturb_modulator(model)
        loaded = load_checkpoint(save_checkpoint(model))
        style = blend_styles(one_hot(0), one_hot(1), 0.3)
        for a, b in zip(run_step(model, ds, style), run_step(loaded, ds, style)):
            np.testing.assert_array_equal(a, b)

    def test_loaded_metadata_round_trips(self, ds):
        model = make(ds, "tcn_win")
        loaded = load_checkpoint(save_checkpoint(model))
        assert loaded.variant == "tcn_win"
        assert loaded.meta.style_names == model.meta.style_names
        assert loaded.meta.fps == model.meta.fps
        assert loaded.meta.walk_phase_rate == model.meta.walk_phase_rate
        assert loaded.meta.skeleton.names == model.meta.skeleton.names
        np.testing.assert_array_equal(loaded.meta.stats.input_mean,
                                      model.meta.stats.input_mean)
        assert loaded.config == model.config

    def test_bad_magic_rejected(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        with pytest.raises(CheckpointError, match="magic"):
            load_checkpoint(b"XCKP9999" + blob[8:])

    def test_unsupported_version_names_field(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        def bump(h):
            h["format_version"] = 99
        with pytest.raises(CheckpointError, match="format_version"):
            load_checkpoint(tamper(blob, bump))

    def test_missing_header_field_named(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        def drop(h):
            del h["fps"]
        with pytest.raises(CheckpointError, match="'fps'"):
            load_checkpoint(tamper(blob, drop))

    def test_wrong_style_vocabulary_size_rejected(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        def grow(h):
            h["styles"] = h["styles"] + ["extra_style"]
        with pytest.raises(CheckpointError, match="modulator"):
            load_checkpoint(tamper(blob, grow))

    def test_unknown_parameter_name_rejected(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        def rename(h):
            h["params"][0]["name"] = "no_such.weight"
        with pytest.raises(CheckpointError, match="no_such.weight"):
            load_checkpoint(tamper(blob, rename))

    def test_missing_parameter_rejected(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        last_shape = None
        def drop_last(h):
            nonlocal last_shape
            last_shape = h["params"][-1]["shape"]
            h["params"] = h["params"][:-1]
        edited = tamper(blob, drop_last)
        nbytes = 4 * int(np.prod(last_shape))
        with pytest.raises(CheckpointError, match="missing parameter"):
            load_checkpoint(edited[:-nbytes])

    def test_truncated_blob_rejected(self, ds):
        blob = save_checkpoint(make(ds, "phase"))
        with pytest.raises(CheckpointError, match="truncated"):
            load_checkpoint(tamper(blob, drop_tail_bytes=4))

    def test_header_must_be_json(self):
        junk = MAGIC + struct.pack("<I", 4) + b"{a:," + b"\x00" * 8
        with pytest.raises(CheckpointError, match="JSON"):
            load_checkpoint(junk)
