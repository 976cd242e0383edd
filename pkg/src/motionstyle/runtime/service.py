"""Interactive WebSocket service around a trained synthesizer.

One connection owns one session. A receiver coroutine validates incoming
messages and files them into a per-type inbox where the latest command of
each kind wins; the tick loop drains the inbox at each frame boundary,
steps the session at the configured rate and pushes frames into a bounded
outbox that drops oldest first, so a congested client can never stall
generation. Malformed input gets an `error` reply and the session lives
on; a model fault is reported once and frames keep flowing frozen until a
reset arrives.
"""

from __future__ import annotations

import asyncio
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..errors import MotionStyleError, ParseError
from .protocol import (encode, error_message, frame_message, hello_message,
                       parse_client_message)
from .recording import SessionRecorder, apply_payload
from .session import SessionState

# a reset arriving in the same gap as other commands is applied first, so
# the commands configure the fresh session instead of being wiped by it
APPLY_ORDER = ("reset", "control", "set_style")

MAX_BUFFERED_FRAMES = 120


class SessionInbox:
    """Per-type command slots; the latest message of each kind wins."""

    def __init__(self):
        self.slots: dict = {}

    def put(self, payload: dict) -> None:
        self.slots[payload["type"]] = payload

    def drain(self) -> list:
        out = [self.slots[k] for k in APPLY_ORDER if k in self.slots]
        self.slots.clear()
        return out


class _Outbox:
    """Bounded frame buffer between the tick loop and the socket writer."""

    def __init__(self, limit: int = MAX_BUFFERED_FRAMES):
        self.queue: asyncio.Queue = asyncio.Queue(maxsize=limit)

    def push(self, text: str) -> None:
        while True:
            try:
                self.queue.put_nowait(text)
                return
            except asyncio.QueueFull:
                self.queue.get_nowait()   # drop the oldest frame

    async def pop(self) -> str:
        return await self.queue.get()


async def _tick_loop(session: SessionState, inbox: SessionInbox,
                     outbox: _Outbox, recorder: SessionRecorder | None):
    period = 1.0 / session.fps
    loop = asyncio.get_running_loop()
    due = loop.time() + period
    while True:
        delay = due - loop.time()
        if delay > 0:
            await asyncio.sleep(delay)
        applied = []
        for payload in inbox.drain():
            try:
                apply_payload(session, payload)
                applied.append(payload)
            except MotionStyleError as exc:
                outbox.push(encode(error_message("bad_value", str(exc))))
        update = session.tick()
        if loop.time() > due + period:
            session.overruns += 1        # this frame is going out late
            update.overruns = session.overruns
        if recorder is not None:
            recorder.note_tick(applied, update.overruns)
        if update.fault_is_new:
            outbox.push(encode(error_message("fault", update.fault)))
        outbox.push(encode(frame_message(update)))
        due += period


def build_app(model, fps: float | None = None,
              record_dir=None) -> FastAPI:
    """FastAPI app exposing the session protocol at /session."""
    app = FastAPI()
    serve_fps = float(fps) if fps else float(model.meta.fps)
    counter = {"n": 0}

    @app.websocket("/session")
    async def session_endpoint(ws: WebSocket):
        await ws.accept()
        session = SessionState(model, fps=serve_fps, seed=0)
        recorder = SessionRecorder(session) if record_dir else None
        inbox = SessionInbox()
        outbox = _Outbox()
        await ws.send_text(encode(hello_message(model.meta, serve_fps)))

        async def writer():
            while True:
                await ws.send_text(await outbox.pop())

        ticker = asyncio.create_task(
            _tick_loop(session, inbox, outbox, recorder))
        sender = asyncio.create_task(writer())
        try:
            while True:
                text = await ws.receive_text()
                try:
                    inbox.put(parse_client_message(text))
                except ParseError as exc:
                    code = "bad_json" if "JSON" in str(exc) else "bad_message"
                    outbox.push(encode(error_message(code, str(exc))))
        except WebSocketDisconnect:
            pass
        finally:
            ticker.cancel()
            sender.cancel()
            if recorder is not None:
                counter["n"] += 1
                stamp = time.strftime("%Y%m%d-%H%M%S")
                name = f"session-{stamp}-{counter['n']}.jsonl"
                Path(record_dir).mkdir(parents=True, exist_ok=True)
                recorder.save(Path(record_dir) / name)

    return app


def serve(model, host: str, port: int, fps: float | None = None,
          record_dir=None) -> None:
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(build_app(model, fps=fps, record_dir=record_dir),
                host=host, port=port, log_level="warning")
