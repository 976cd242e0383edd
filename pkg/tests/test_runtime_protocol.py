import json

import numpy as np
import pytest

from motionstyle.errors import ParseError
from motionstyle.runtime import (ControlState, SessionState,
                                 control_from_payload, encode, error_message,
                                 frame_message, hello_message,
                                 parse_client_message)


class TestHello:
    def test_structure(self, trained_phase):
        msg = hello_message(trained_phase.meta, 60.0)
        assert msg["type"] == "hello"
        assert msg["fps"] == 60.0
        assert msg["styles"] == list(trained_phase.meta.style_names)
        joints = msg["skeleton"]["joints"]
        sk = trained_phase.meta.skeleton
        assert [j["name"] for j in joints] == sk.names
        assert joints[0]["parent"] == -1
        assert all(len(j["offset"]) == 3 for j in joints)
        json.loads(encode(msg))   # must serialize cleanly


class TestFrame:
    def test_fields_from_live_tick(self, trained_phase):
        s = SessionState(trained_phase, seed=0)
        s.apply_control(ControlState(direction=np.array([0.0, 1.0]),
                                     speed=0.95, gait=1))
        msg = frame_message(s.tick())
        n_j = trained_phase.meta.skeleton.n_joints
        assert msg["type"] == "frame"
        assert msg["t"] == 1
        assert len(msg["root"]["pos"]) == 3
        assert len(msg["root"]["quat"]) == 4
        assert len(msg["joints"]["pos"]) == n_j
        assert all(len(p) == 3 for p in msg["joints"]["pos"])
        assert all(len(q) == 4 for q in msg["joints"]["quat"])
        cfg = trained_phase.config
        assert len(msg["experts"]) == cfg.n_moe_layers
        assert all(len(row) == cfg.n_experts for row in msg["experts"])
        assert msg["lambda"] == 1.0
        assert msg["overrun_count"] == 0
        flat = (msg["root"]["pos"] + msg["root"]["quat"]
                + [v for p in msg["joints"]["pos"] for v in p]
                + [v for q in msg["joints"]["quat"] for v in q]
                + [v for row in msg["experts"] for v in row])
        assert np.isfinite(flat).all()
        back = json.loads(encode(msg))
        assert back == msg

    def test_error_message(self):
        msg = error_message("bad_value", "speed must be >= 0")
        assert msg == {"type": "error", "code": "bad_value",
                       "message": "speed must be >= 0"}


class TestParseControl:
    def test_valid(self):
        out = parse_client_message(json.dumps(
            {"type": "control", "dir": [0, 1], "speed": 1.2,
             "gait": "walk"}))
        assert out == {"type": "control", "dir": [0.0, 1.0], "speed": 1.2,
                       "gait": 1}

    def test_payload_to_state(self):
        out = parse_client_message(json.dumps(
            {"type": "control", "dir": [3, 4], "speed": 0.5,
             "gait": "run"}))
        state = control_from_payload(out)
        np.testing.assert_allclose(state.direction, [0.6, 0.8])
        assert state.gait == 2

    @pytest.mark.parametrize("payload,reason", [
        ({"type": "control", "dir": [0, 1, 2], "speed": 1, "gait": "walk"},
         "dir must be"),
        ({"type": "control", "dir": [0, "a"], "speed": 1, "gait": "walk"},
         "must be a number"),
        ({"type": "control", "dir": [0, 1], "speed": -1, "gait": "walk"},
         "speed must be >= 0"),
        ({"type": "control", "dir": [0, 1], "speed": 1, "gait": "crawl"},
         "gait must be"),
        ({"type": "control", "dir": [0, 1], "gait": "walk"},
         "speed must be a number"),
    ])
    def test_rejects(self, payload, reason):
        with pytest.raises(ParseError, match=reason):
            parse_client_message(json.dumps(payload))

    def test_rejects_non_finite_speed(self):
        # json.loads accepts bare NaN, the protocol must not
        with pytest.raises(ParseError, match="finite"):
            parse_client_message(
                '{"type": "control", "dir": [0, 1], "speed": NaN, '
                '"gait": "walk"}')


class TestParseStyleAndReset:
    def test_set_style_valid_with_default_duration(self):
        out = parse_client_message(json.dumps(
            {"type": "set_style", "weights": [0, 1]}))
        assert out == {"type": "set_style", "weights": [0.0, 1.0],
                       "duration_s": 1.0}

    @pytest.mark.parametrize("payload,reason", [
        ({"type": "set_style", "weights": []}, "non-empty"),
        ({"type": "set_style", "weights": [0.5, -0.1]}, ">= 0"),
        ({"type": "set_style", "weights": [0.0, 0.0]}, "all be zero"),
        ({"type": "set_style", "weights": [1.0], "duration_s": 0},
         "duration_s must be > 0"),
        ({"type": "reset", "seed": "seven"}, "seed must be an integer"),
        ({"type": "reset", "seed": True}, "seed must be an integer"),
        ({"type": "warp", "x": 1}, "unknown message type"),
    ])
    def test_rejects(self, payload, reason):
        with pytest.raises(ParseError, match=reason):
            parse_client_message(json.dumps(payload))

    def test_reset_valid(self):
        out = parse_client_message('{"type": "reset", "seed": 11}')
        assert out == {"type": "reset", "seed": 11}

    def test_rejects_malformed_json(self):
        with pytest.raises(ParseError, match="JSON"):
            parse_client_message("{nope")
        with pytest.raises(ParseError, match="object"):
            parse_client_message("[1, 2]")
