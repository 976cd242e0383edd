"""Real-time interactive runtime: sessions, wire protocol, service."""

from .protocol import (control_from_payload, encode, error_message,
                       frame_message, hello_message, parse_client_message)
from .recording import (Recording, SessionRecorder, apply_payload,
                        load_recording, replay_recording)
from .service import SessionInbox, build_app, serve
from .session import (GAITS, ControlState, FrameUpdate, SessionState,
                      StyleRamp)

__all__ = [
    "GAITS",
    "ControlState",
    "FrameUpdate",
    "Recording",
    "SessionInbox",
    "SessionRecorder",
    "SessionState",
    "StyleRamp",
    "apply_payload",
    "build_app",
    "control_from_payload",
    "encode",
    "error_message",
    "frame_message",
    "hello_message",
    "load_recording",
    "parse_client_message",
    "replay_recording",
    "serve",
]
