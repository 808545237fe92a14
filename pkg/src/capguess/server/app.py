"""HTTP + WebSocket application.

Transport only: every game decision lives in rooms.py and below. One
asyncio lock serializes all room mutation, which keeps each room's
command order total (desk-scale deployment; see the concurrency note in
rooms.py).
"""

from __future__ import annotations

import asyncio
import contextlib
import time
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Request, WebSocket, WebSocketDisconnect
from fastapi.responses import (FileResponse, JSONResponse, PlainTextResponse,
                               RedirectResponse)

from ..errors import GameError
from ..store import export_text
from . import protocol
from .rooms import RoomManager

TICK_INTERVAL_SEC = 0.2

_ERROR_STATUS = {"CAPACITY": 503, "UNKNOWN_ROOM": 404, "UNKNOWN_IMAGE": 404}


def create_app(manager: RoomManager, corpus_dir: Path | None = None,
               clock: Callable[[], float] = time.time,
               tick_interval: float = TICK_INTERVAL_SEC) -> FastAPI:
    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        task = asyncio.create_task(_ticker())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="capguess", lifespan=lifespan)
    lock = asyncio.Lock()
    connections: dict[tuple[str, str], WebSocket] = {}

    async def dispatch(room_id: str, frames) -> None:
        for target, frame in frames:
            ws = connections.get((room_id, target))
            if ws is None:
                continue
            try:
                await ws.send_text(protocol.encode(frame))
            except Exception:
                pass  # racing a disconnect; cleanup happens in its handler

    async def _ticker() -> None:
        while True:
            await asyncio.sleep(tick_interval)
            async with lock:
                now = clock()
                for room in list(manager.rooms.values()):
                    frames = room.tick(now)
                    if frames:
                        await dispatch(room.room_id, frames)

    # -- HTTP -----------------------------------------------------------------

    @app.get("/healthz")
    async def healthz():
        return {"ok": True, "rooms": len(manager.rooms)}

    @app.post("/rooms")
    async def create_room(request: Request):
        try:
            body = await request.json()
        except Exception:
            body = {}
        if body is None:
            body = {}
        if not isinstance(body, dict):
            return _error_response(GameError("BAD_MESSAGE",
                                             "body must be a JSON object"))
        try:
            async with lock:
                room = manager.create_room(body)
        except GameError as exc:
            return _error_response(exc)
        return {"roomId": room.room_id}

    @app.get("/images/{image_id}")
    async def image(image_id: str):
        match = next((i for i in manager.images if i.image_id == image_id), None)
        if match is None:
            return _error_response(GameError("UNKNOWN_IMAGE", image_id))
        locator = match.locator
        if locator.startswith(("http://", "https://")):
            return RedirectResponse(locator, status_code=302)
        path = Path(locator)
        if not path.is_absolute() and corpus_dir is not None:
            path = corpus_dir / path
        if not path.is_file():
            return _error_response(GameError("UNKNOWN_IMAGE",
                                             f"no file for {image_id}"))
        return FileResponse(path)

    @app.get("/export")
    async def export(verifiedOnly: str = "false"):
        flag = verifiedOnly.strip().lower() in ("true", "1", "yes")
        return PlainTextResponse(export_text(manager.store, verified_only=flag),
                                 media_type="application/x-ndjson")

    # -- WebSocket -------------------------------------------------------------

    @app.websocket("/ws")
    async def ws_endpoint(websocket: WebSocket):
        await websocket.accept()
        conn_seq = 0
        session = None
        room = None

        async def send_unjoined_error(code: str, message: str) -> None:
            nonlocal conn_seq
            conn_seq += 1
            frame = protocol.envelope("ERROR", conn_seq,
                                      {"code": code, "message": message})
            await websocket.send_text(protocol.encode(frame))

        try:
            while True:
                raw = await websocket.receive_text()
                try:
                    msg_type, seq, payload = protocol.parse_client_frame(raw)
                except GameError as exc:
                    if session is None:
                        await send_unjoined_error(exc.code, str(exc))
                    else:
                        async with lock:
                            frame = room.error_frame(session.player_id,
                                                     exc.code, str(exc))
                            await dispatch(room.room_id, [frame])
                    continue

                async with lock:
                    now = clock()
                    if session is None:
                        try:
                            if msg_type == "CREATE_ROOM":
                                overrides = payload.get("config") or {}
                                if not isinstance(overrides, dict):
                                    raise GameError("BAD_MESSAGE",
                                                    "config must be an object")
                                room = manager.create_room(overrides)
                                session, frames = room.join(
                                    str(payload.get("displayName") or ""),
                                    now, first_out_seq=conn_seq)
                            elif msg_type == "JOIN":
                                room = manager.get(str(payload.get("roomId") or ""))
                                token = payload.get("token")
                                if token:
                                    session, frames = room.reattach(
                                        str(token), now, first_out_seq=conn_seq)
                                else:
                                    session, frames = room.join(
                                        str(payload.get("displayName") or ""),
                                        now, first_out_seq=conn_seq)
                            else:
                                raise GameError("UNAUTHENTICATED",
                                                "send JOIN or CREATE_ROOM first")
                        except GameError as exc:
                            await send_unjoined_error(exc.code, str(exc))
                            continue
                        connections[(room.room_id, session.player_id)] = websocket
                        await dispatch(room.room_id, frames)
                    else:
                        if msg_type in ("JOIN", "CREATE_ROOM"):
                            frame = room.error_frame(
                                session.player_id, "BAD_MESSAGE",
                                "this connection already joined a room")
                            await dispatch(room.room_id, [frame])
                            continue
                        frames = room.handle(session.player_id, msg_type,
                                             seq, payload, now)
                        await dispatch(room.room_id, frames)
        except WebSocketDisconnect:
            pass
        finally:
            if session is not None and room is not None:
                key = (room.room_id, session.player_id)
                # A reconnect replaces the registry entry; a stale socket's
                # teardown must not mark the fresh session as disconnected.
                if connections.get(key) is websocket:
                    connections.pop(key, None)
                    # mark_disconnected never awaits, so it cannot interleave
                    # with a lock holder and is safe to run here even when the
                    # task is already cancelled and cannot acquire the lock.
                    frames = room.mark_disconnected(session.player_id, clock())
                    try:
                        await dispatch(room.room_id, frames)
                    except BaseException:
                        pass  # cancelled mid-teardown: state is already flipped

    return app


def _error_response(exc: GameError) -> JSONResponse:
    status = _ERROR_STATUS.get(exc.code, 400)
    return JSONResponse(
        {"error": {"code": exc.code, "message": str(exc)}}, status_code=status
    )
