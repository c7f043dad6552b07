"""WebSocket session server: one isolated session per connection.

Frames are JSON objects, one per message (schema in the README, protocol
version 1).  Inbound commands: choose, continue, end, reset.  All
sessions share the immutable elaborated process; nothing else is shared.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from ..lang.elab import SimTarget
from ..values import event_from_json, event_to_json, value_to_json
from .session import (
    Accepted,
    Activity,
    Deadlocked,
    Ended,
    ManySteps,
    Menu,
    Rejected,
    SimConfig,
    StateNote,
    Terminated,
    choose,
    continue_,
    start_session,
)

PROTOCOL_VERSION = 1


def msg_to_frame(m) -> dict:
    if isinstance(m, Menu):
        return {"type": "menu", "events": [event_to_json(e) for e in m.events]}
    if isinstance(m, Terminated):
        return {"type": "terminated", "value": _jsonable(m.value)}
    if isinstance(m, Deadlocked):
        return {"type": "deadlocked"}
    if isinstance(m, ManySteps):
        return {"type": "manySteps", "count": m.count}
    if isinstance(m, Accepted):
        return {"type": "accepted", "event": event_to_json(m.event)}
    if isinstance(m, Rejected):
        return {"type": "rejected", "input": _jsonable(m.input), "reason": m.reason}
    if isinstance(m, StateNote):
        return {"type": "stateNote", "text": m.text}
    if isinstance(m, Activity):
        return {"type": "activity"}
    if isinstance(m, Ended):
        return {"type": "ended"}
    raise TypeError(f"unknown message {m!r}")


def _jsonable(v):
    try:
        return value_to_json(v)
    except (TypeError, ValueError):
        try:
            return event_to_json(v)
        except Exception:
            return {"text": repr(v)}


def create_app(target: SimTarget, config: SimConfig = SimConfig(), static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="itreesim session server")

    @app.websocket("/ws")
    async def ws_session(ws: WebSocket):
        await ws.accept()
        await ws.send_json(
            {"type": "hello", "protocol": PROTOCOL_VERSION, "process": target.name}
        )
        session, msgs = start_session(target, config)
        for m in msgs:
            await ws.send_json(msg_to_frame(m))
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    cmd = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_json(
                        {"type": "rejected", "input": raw, "reason": "not JSON"}
                    )
                    continue
                session, msgs = _apply(session, cmd, config)
                for m in msgs:
                    await ws.send_json(msg_to_frame(m))
        except WebSocketDisconnect:
            pass

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "process": target.name}

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app


def _apply(session, cmd, config):
    from .session import reset

    if not isinstance(cmd, dict) or "type" not in cmd:
        return session, [Rejected(cmd, "malformed command frame")]
    kind = cmd["type"]
    if kind == "choose":
        if "index" in cmd:
            if not isinstance(cmd["index"], int):
                return session, [Rejected(cmd, "index must be an integer")]
            return choose(session, cmd["index"])
        if "event" in cmd:
            try:
                e = event_from_json(cmd["event"])
            except ValueError as err:
                return session, [Rejected(cmd, str(err))]
            return choose(session, e)
        return session, [Rejected(cmd, "choose needs an event or index")]
    if kind == "continue":
        return continue_(session, True)
    if kind == "end":
        return continue_(session, False)
    if kind == "reset":
        return reset(session)
    return session, [Rejected(cmd, f"unknown command {kind!r}")]
