"""Wire protocol: UTF-8 JSON messages between the service and a viewer.

Server to client:
  hello  {type, fps, styles:[name], skeleton:{joints:[{name, parent,
         offset:[x,y,z]}]}}   parent is a joint index, -1 for the root
  frame  {type, t, root:{pos:[3], quat:[4]}, joints:{pos:[[3]..],
         quat:[[4]..]}, experts:[[float]..], lambda, overrun_count}
  error  {type, code, message}

Client to server:
  control    {type, dir:[x,z], speed, gait:"stand"|"walk"|"run"}
  set_style  {type, weights:[float], duration_s}
  reset      {type, seed}

Quaternions are (x, y, z, w); all arrays follow the joint order announced
in `hello`. Malformed input raises ParseError with a short reason; the
service answers those with an `error` message and keeps the session alive.
Error codes: bad_json, bad_message, bad_value, fault.
"""

from __future__ import annotations

import json
import math

import numpy as np

from ..errors import ParseError
from .session import GAITS, ControlState, FrameUpdate

CLIENT_TYPES = ("control", "set_style", "reset")


def hello_message(meta, fps: float) -> dict:
    sk = meta.skeleton
    return {
        "type": "hello",
        "fps": float(fps),
        "styles": list(meta.style_names),
        "skeleton": {"joints": [
            {"name": j.name, "parent": int(j.parent),
             "offset": [float(v) for v in j.offset]}
            for j in sk.joints]},
    }


def frame_message(update: FrameUpdate) -> dict:
    return {
        "type": "frame",
        "t": int(update.t),
        "root": {"pos": _floats(update.root_pos),
                 "quat": _floats(update.root_quat)},
        "joints": {"pos": [_floats(p) for p in update.joint_pos],
                   "quat": [_floats(q) for q in update.joint_quats]},
        "experts": [_floats(row) for row in np.atleast_2d(update.experts)],
        "lambda": float(update.lam),
        "overrun_count": int(update.overruns),
    }


def error_message(code: str, message: str) -> dict:
    return {"type": "error", "code": code, "message": message}


def encode(message: dict) -> str:
    return json.dumps(message, sort_keys=True, separators=(",", ":"))


def _floats(arr) -> list:
    return [float(v) for v in np.asarray(arr).reshape(-1)]


def _require(condition: bool, reason: str) -> None:
    if not condition:
        raise ParseError(reason)


def _finite_number(value, name: str) -> float:
    _require(isinstance(value, (int, float)) and not isinstance(value, bool),
             f"{name} must be a number")
    value = float(value)
    _require(math.isfinite(value), f"{name} must be finite")
    return value


def parse_client_message(text: str) -> dict:
    """Validate one client message; returns the normalized payload."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc.msg}") from exc
    _require(isinstance(data, dict), "message must be a JSON object")
    kind = data.get("type")
    _require(kind in CLIENT_TYPES,
             f"unknown message type {kind!r}, expected one of {CLIENT_TYPES}")

    if kind == "control":
        direction = data.get("dir")
        _require(isinstance(direction, list) and len(direction) == 2,
                 "dir must be [x, z]")
        dx = _finite_number(direction[0], "dir[0]")
        dz = _finite_number(direction[1], "dir[1]")
        speed = _finite_number(data.get("speed"), "speed")
        _require(speed >= 0.0, "speed must be >= 0")
        gait = data.get("gait")
        _require(gait in GAITS, f"gait must be one of {GAITS}")
        return {"type": "control", "dir": [dx, dz], "speed": speed,
                "gait": GAITS.index(gait)}

    if kind == "set_style":
        weights = data.get("weights")
        _require(isinstance(weights, list) and len(weights) > 0,
                 "weights must be a non-empty list")
        values = [_finite_number(w, f"weights[{i}]")
                  for i, w in enumerate(weights)]
        _require(all(v >= 0.0 for v in values), "weights must be >= 0")
        _require(sum(values) > 0.0, "weights must not all be zero")
        duration = data.get("duration_s", 1.0)
        duration = _finite_number(duration, "duration_s")
        _require(duration > 0.0, "duration_s must be > 0")
        return {"type": "set_style", "weights": values,
                "duration_s": duration}

    seed = data.get("seed")
    _require(isinstance(seed, int) and not isinstance(seed, bool),
             "seed must be an integer")
    return {"type": "reset", "seed": seed}


def control_from_payload(payload: dict) -> ControlState:
    return ControlState(direction=np.array(payload["dir"]),
                        speed=payload["speed"], gait=payload["gait"])
