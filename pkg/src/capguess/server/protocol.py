"""Wire protocol: envelope encoding, frame parsing, and view rendering.

Every message is one JSON object `{"type": ..., "seq": n, "payload": {...}}`.
`seq` is a per-connection counter, strictly increasing in each direction.
The helpers here are pure: they never touch sockets or game state, so the
same codecs serve the real server, the in-process simulation transport,
and the tests.
"""

from __future__ import annotations

import json
from typing import Any

from ..engine import HIDDEN, REVEALED, MaskedSentence, Player
from ..errors import GameError

CLIENT_TYPES = frozenset({
    "JOIN", "CREATE_ROOM", "START", "SET_SENTENCE", "GUESS", "CHAT",
})
SERVER_TYPES = frozenset({
    "STATE", "REVEAL", "ROUND_END", "SCORE", "ERROR", "CHAT",
})

_STATUS_WIRE = {HIDDEN: "hidden", REVEALED: "revealed"}


def envelope(msg_type: str, seq: int, payload: dict[str, Any]) -> dict[str, Any]:
    return {"type": msg_type, "seq": seq, "payload": payload}


def encode(frame: dict[str, Any]) -> str:
    return json.dumps(frame)


def parse_client_frame(raw: str | bytes) -> tuple[str, int, dict[str, Any]]:
    """Decode one client message or raise BAD_MESSAGE.

    The caller still has to check authentication and sequence order; this
    only guarantees the envelope is structurally sound.
    """
    try:
        data = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise GameError("BAD_MESSAGE", f"not JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise GameError("BAD_MESSAGE", "frame must be a JSON object")
    msg_type = data.get("type")
    seq = data.get("seq")
    payload = data.get("payload", {})
    if msg_type not in CLIENT_TYPES:
        raise GameError("BAD_MESSAGE", f"unknown client type {msg_type!r}")
    if not isinstance(seq, int) or isinstance(seq, bool) or seq < 1:
        raise GameError("BAD_MESSAGE", "seq must be a positive integer")
    if not isinstance(payload, dict):
        raise GameError("BAD_MESSAGE", "payload must be an object")
    return msg_type, seq, payload


def require_text(payload: dict[str, Any], key: str = "text") -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise GameError("BAD_MESSAGE", f"payload needs a string {key!r}")
    return value


def mask_wire(mask: MaskedSentence) -> list[dict[str, Any]]:
    """Masked view of the sentence, safe to send to guessers.

    Stop and revealed positions carry their text; hidden positions carry
    only their length. The raw sentence never appears here.
    """
    entries = []
    for token, status in zip(mask.tokens, mask.status):
        wire_status = _STATUS_WIRE.get(status, "stop")
        entry: dict[str, Any] = {"len": len(token.surface), "status": wire_status}
        if wire_status != "hidden":
            entry["text"] = token.surface
        entries.append(entry)
    return entries


def scores_wire(players: dict[str, Player]) -> list[dict[str, Any]]:
    """Scoreboard rows, best score first, join order breaking ties."""
    ordered = sorted(players.values(), key=lambda p: (-p.score, p.join_order))
    return [
        {
            "playerId": p.id,
            "displayName": p.display_name,
            "score": p.score,
            "connected": p.connected,
        }
        for p in ordered
    ]
