"""Session recording and deterministic replay.

A recording is JSON lines: one header, then one line per tick holding the
client payloads applied just before that tick (in application order) and
the overrun counter at emit time. Replaying re-applies the same payloads
against a fresh session with the recorded seed; because generation is
deterministic the frame stream comes out bit-identical, with the recorded
overrun telemetry injected since wall-clock pacing is not reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ParseError
from .protocol import control_from_payload, frame_message
from .session import SessionState

FORMAT = "motionstyle-session-1"


def apply_payload(session: SessionState, payload: dict) -> None:
    """Apply one validated client payload to a session."""
    kind = payload["type"]
    if kind == "control":
        session.apply_control(control_from_payload(payload))
    elif kind == "set_style":
        session.apply_style(np.array(payload["weights"], dtype=np.float32),
                            payload["duration_s"])
    elif kind == "reset":
        session.reset(payload["seed"])
    else:
        raise ParseError(f"unknown payload type {kind!r}")


class SessionRecorder:
    """Collects applied payloads per tick for later replay."""

    def __init__(self, session: SessionState):
        self.header = {
            "format": FORMAT,
            "fps": session.fps,
            "seed": session.seed,
            "variant": session.model.variant,
            "styles": list(session.model.meta.style_names),
        }
        self.ticks: list[dict] = []

    def note_tick(self, applied: list, overruns: int) -> None:
        self.ticks.append({"events": list(applied),
                           "overruns": int(overruns)})

    def save(self, path) -> Path:
        path = Path(path)
        with open(path, "w") as fh:
            fh.write(json.dumps(self.header, sort_keys=True) + "\n")
            for tick in self.ticks:
                fh.write(json.dumps(tick, sort_keys=True) + "\n")
        return path


@dataclass
class Recording:
    fps: float
    seed: int
    variant: str
    styles: list
    ticks: list


def load_recording(path) -> Recording:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ParseError(f"recording {path} is empty")
    try:
        header = json.loads(lines[0])
        if header.get("format") != FORMAT:
            raise ParseError(
                f"recording {path} has format {header.get('format')!r}, "
                f"expected {FORMAT!r}")
        ticks = []
        for line in lines[1:]:
            tick = json.loads(line)
            ticks.append({"events": list(tick["events"]),
                          "overruns": int(tick["overruns"])})
        return Recording(fps=float(header["fps"]), seed=int(header["seed"]),
                         variant=str(header["variant"]),
                         styles=list(header["styles"]), ticks=ticks)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad recording {path}: {exc}") from exc


def replay_recording(model, recording: Recording) -> list:
    """Re-drive a session from a recording; returns the frame messages."""
    if model.variant != recording.variant:
        raise ParseError(
            f"recording was made with variant {recording.variant!r}, "
            f"model is {model.variant!r}")
    session = SessionState(model, fps=recording.fps, seed=recording.seed)
    frames = []
    for tick in recording.ticks:
        for payload in tick["events"]:
            apply_payload(session, payload)
        session.overruns = tick["overruns"]
        frames.append(frame_message(session.tick()))
    return frames
