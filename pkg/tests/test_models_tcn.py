"""Encoder oracles: brute-force convolution reference with replicate
padding, constant-window behavior under window normalization, causal
window selection, and history padding."""

import numpy as np
import pytest

from motionstyle.errors import DimensionError, StateError
from motionstyle.models.tcn import TcnEncoder, window_from_history
from motionstyle.models.win import window_instance_norm
from motionstyle.nn import Tensor, causal_conv1d, gradient_check, no_grad
from motionstyle.nn.tensor import concat


def encoder_reference(window: np.ndarray, enc: TcnEncoder) -> np.ndarray:
    """Per-layer loop: replicate-pad, slide the kernel by hand, optional
    window norm, bias, ELU. Returns the full feature sequence."""
    h = window.astype(np.float64)
    for block in enc.blocks:
        w = block.conv.weight.data.astype(np.float64)
        kernel = w.shape[0]
        padded = np.concatenate([np.repeat(h[:1], kernel - 1, axis=0), h])
        out = np.zeros((h.shape[0], w.shape[2]))
        for t in range(h.shape[0]):
            for k in range(kernel):
                out[t] += padded[t + kernel - 1 - k] @ w[k]
        if enc.use_win:
            mu = out.mean(axis=0, keepdims=True)
            sd = out.std(axis=0, ddof=1, keepdims=True) if h.shape[0] > 1 \
                else np.zeros((1, out.shape[1]))
            out = (out - mu) / np.maximum(sd, enc.eps)
        out = out + block.bias.data.astype(np.float64)
        h = np.where(out > 0, out, np.expm1(out))
    return h


@pytest.fixture(scope="module")
def small_encoders():
    make = lambda use_win: TcnEncoder(np.random.default_rng(8), in_dim=6,
                                      channels=(5, 4), kernel=3,
                                      use_win=use_win, eps=0.3)
    return make(False), make(True)


class TestReference:
    def test_matches_loop_oracle(self, small_encoders):
        for enc in small_encoders:
            for seed in range(5):
                rng = np.random.default_rng(seed)
                window = rng.standard_normal((9, 6)).astype(np.float32)
                got = enc.features(Tensor(window[None])).numpy()[0]
                want = encoder_reference(window, enc)
                np.testing.assert_allclose(got, want, rtol=1e-4, atol=1e-5)

    def test_encode_is_last_feature_row(self, small_encoders):
        enc = small_encoders[0]
        rng = np.random.default_rng(9)
        window = Tensor(rng.standard_normal((1, 7, 6)).astype(np.float32))
        seq = enc.features(window).numpy()
        vec = enc.encode(window).numpy()
        np.testing.assert_array_equal(vec[0], seq[0, -1])


class TestConstantWindow:
    def test_replicate_padding_keeps_constant_windows_constant(self, small_encoders):
        """With replicate padding a constant input stays constant through
        the stack: every output frame is bit-identical, no edge transient."""
        enc = small_encoders[0]
        window = np.tile(np.linspace(-1, 1, 6, dtype=np.float32), (8, 1))
        seq = enc.features(Tensor(window[None])).numpy()[0]
        for t in range(1, 8):
            np.testing.assert_array_equal(seq[t], seq[0])

    def test_window_norm_zeroes_constant_windows(self, small_encoders):
        """Constant window + window norm: no spread, so the normalized
        features are zero (sigma=0 branch), biases are zero-initialized and
        ELU(0)=0, so the stack outputs zero. Float32 rounding of the window
        mean leaves at most ~1 ulp of feature scale."""
        enc = small_encoders[1]
        window = np.tile(np.linspace(-1, 1, 6, dtype=np.float32), (8, 1))
        out = enc.encode(Tensor(window[None])).numpy()
        np.testing.assert_allclose(out, np.zeros_like(out), atol=1e-6)

    def test_plain_encoder_not_zero_on_constant_window(self, small_encoders):
        out = small_encoders[0].encode(
            Tensor(np.ones((1, 8, 6), dtype=np.float32))).numpy()
        assert np.abs(out).max() > 1e-3


class TestWindowSelection:
    def test_future_frames_leave_feature_bit_identical(self, small_encoders):
        """The feature for time t is a function of the window ending at t;
        appending frames to the history must not change it."""
        span = 5
        rng = np.random.default_rng(10)
        history = rng.standard_normal((12, 6)).astype(np.float32)
        longer = np.concatenate(
            [history, rng.standard_normal((4, 6)).astype(np.float32)])
        for enc in small_encoders:
            a = enc.encode(Tensor(window_from_history(history, span)[None]))
            b = enc.encode(Tensor(
                window_from_history(longer[:12], span)[None]))
            np.testing.assert_array_equal(a.numpy(), b.numpy())

    def test_window_matches_truncated_full_history(self, small_encoders):
        """Features from the runtime ring buffer equal features from the
        full history cut to the same window, bit for bit."""
        span = 5
        rng = np.random.default_rng(11)
        full = rng.standard_normal((40, 6)).astype(np.float32)
        ring = full[-(span + 1):]
        for enc in small_encoders:
            a = enc.encode(Tensor(window_from_history(ring, span)[None]))
            b = enc.encode(Tensor(full[-(span + 1):][None]))
            np.testing.assert_array_equal(a.numpy(), b.numpy())


class TestHistoryPadding:
    def test_single_frame_history_replicates(self):
        frame = np.arange(4, dtype=np.float32)[None]
        window = window_from_history(frame, span=6)
        assert window.shape == (7, 4)
        for t in range(7):
            np.testing.assert_array_equal(window[t], frame[0])

    def test_short_history_front_filled_with_earliest(self):
        hist = np.arange(8, dtype=np.float32).reshape(4, 2)
        window = window_from_history(hist, span=6)
        np.testing.assert_array_equal(window[:3], np.tile(hist[0], (3, 1)))
        np.testing.assert_array_equal(window[3:], hist)

    def test_long_history_truncated_to_tail(self):
        hist = np.arange(40, dtype=np.float32).reshape(20, 2)
        window = window_from_history(hist, span=6)
        np.testing.assert_array_equal(window, hist[-7:])

    def test_empty_history_rejected(self):
        with pytest.raises(StateError):
            window_from_history(np.zeros((0, 3), dtype=np.float32), span=6)


class TestValidation:
    def test_empty_window_rejected(self, small_encoders):
        with pytest.raises(StateError):
            small_encoders[0].features(Tensor(np.zeros((1, 0, 6), np.float32)))

    def test_wrong_channel_count_rejected(self, small_encoders):
        with pytest.raises(DimensionError):
            small_encoders[0].features(Tensor(np.zeros((1, 5, 7), np.float32)))


class TestGradients:
    def test_conv_window_norm_stack_gradients(self):
        """Replicate-padded conv + window norm under a random linear
        readout, validated with directional derivatives (training through
        the encoder relies on this composition). Directions keep the probe
        at the gradient's own scale; per-element differences on this stack
        drown small-gradient entries in truncation error."""
        worst = 0.0
        h = 1e-3
        dirs = np.random.default_rng(1234)
        for seed in range(20):
            rng = np.random.default_rng(seed)
            x = Tensor(rng.standard_normal((1, 6, 3)), requires_grad=True)
            w = Tensor(rng.standard_normal((3, 3, 4)), requires_grad=True)
            readout = Tensor(rng.standard_normal((1, 6, 4)))

            def fn(x, w):
                first = x.narrow(1, 0, 1)
                padded = concat([first, first, x], axis=1)
                y = causal_conv1d(padded, w).narrow(1, 2, 6)
                return (window_instance_norm(y, 0.3) * readout).sum()

            fn(x, w).backward()
            for t in (x, w):
                grad = t.grad.copy()
                for _ in range(5):
                    u = dirs.standard_normal(t.data.shape)
                    u /= np.linalg.norm(u)
                    orig = t.data.copy()
                    t.data = orig + h * u
                    with no_grad():
                        hi = fn(x, w).item()
                    t.data = orig - h * u
                    with no_grad():
                        lo = fn(x, w).item()
                    t.data = orig
                    numeric = (hi - lo) / (2.0 * h)
                    analytic = float((grad * u).sum())
                    # error relative to the gradient's own scale; a single
                    # direction may have a near-zero derivative by chance
                    scale = max(float(np.linalg.norm(grad)), 1e-8)
                    worst = max(worst, abs(analytic - numeric) / scale)
        assert worst < 1e-4
