"""Rooms: sessions, message routing, and round plumbing.

A Room wraps one GameState and speaks in frames: every entry point
returns a list of (target_player_id, frame) pairs for the transport to
deliver. Nothing here does I/O besides the round store, so the same room
code runs under the WebSocket app, the simulation harness, and the tests.

Ordering contract: the transport must feed one room's calls in a single
total order (the app serializes on a lock, the harness is single-threaded).
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass
from random import Random
from typing import Any

from ..corpus import CorpusImage
from ..engine import AWAITING_SENTENCE, ENDED, GUESSING, GameConfig, GameState
from ..errors import GameError
from ..lexic import StopWordList
from ..store import RoundStore
from . import protocol

INTERMISSION_SEC = 5.0
ROOM_CODE_LEN = 6
_CODE_ALPHABET = "ABCDEFGHJKMNPQRSTUVWXYZ23456789"  # no 0/O/1/I/L lookalikes

# camelCase wire names for GameConfig overrides
_CONFIG_KEYS = {
    "minPlayers": "min_players",
    "roundDurationSec": "round_duration_sec",
    "pointsPerWord": "points_per_word",
    "sentenceTimeoutSec": "sentence_timeout_sec",
    "maxSentenceContentWords": "max_sentence_content_words",
}


@dataclass
class Session:
    room_id: str
    player_id: str
    token: str
    display_name: str


Frame = tuple[str, dict[str, Any]]


class Room:
    def __init__(self, room_id: str, config: GameConfig,
                 images: list[CorpusImage], store: RoundStore,
                 stops: StopWordList | None = None,
                 rng: Random | None = None,
                 intermission_sec: float = INTERMISSION_SEC):
        if not images:
            raise GameError("EMPTY_CORPUS", "a room needs at least one image")
        self.room_id = room_id
        self.game = GameState(config, stops)
        self.images = images
        self.store = store
        self.intermission_sec = intermission_sec
        self.intermission_until = 0.0
        self._rng = rng
        self._image_queue: list[int] = []
        self._locators = {img.image_id: img.locator for img in images}
        self.sessions: dict[str, Session] = {}  # token → session
        self._player_counter = 0
        self._last_in: dict[str, int] = {}
        self._out_seq: dict[str, int] = {}
        self._announced_round: str | None = None

    # -- session lifecycle --------------------------------------------------

    def join(self, display_name: str, now: float,
             first_out_seq: int = 0) -> tuple[Session, list[Frame]]:
        """Add a fresh player; everyone gets the new roster.

        `first_out_seq` lets a transport that already sent frames on this
        connection keep the outbound counter strictly monotone.
        """
        if not display_name or not display_name.strip():
            raise GameError("BAD_MESSAGE", "displayName must be non-empty")
        self._player_counter += 1
        player_id = f"p{self._player_counter}"
        token = self._new_token()
        self.game.add_player(player_id, display_name.strip())
        session = Session(self.room_id, player_id, token, display_name.strip())
        self.sessions[token] = session
        self._last_in[player_id] = 0
        self._out_seq[player_id] = first_out_seq
        frames = self._roster_broadcast(now, joined=player_id, token=token)
        return session, frames

    def reattach(self, token: str, now: float,
                 first_out_seq: int = 0) -> tuple[Session, list[Frame]]:
        """Resume a dropped session; one STATE frame restores the client."""
        session = self.sessions.get(token)
        if session is None:
            raise GameError("UNAUTHENTICATED", "unknown session token")
        player = self.game.players.get(session.player_id)
        if player is None:
            raise GameError("UNAUTHENTICATED", "player no longer in the room")
        player.connected = True
        # Fresh connection, fresh counters in both directions.
        self._last_in[session.player_id] = 0
        self._out_seq[session.player_id] = first_out_seq
        frames = self._roster_broadcast(now, joined=session.player_id, token=token)
        return session, frames

    def error_frame(self, player_id: str, code: str, message: str) -> Frame:
        """ERROR frame addressed to one member, with a proper seq."""
        return self._emit(player_id, "ERROR", {"code": code, "message": message})

    def mark_disconnected(self, player_id: str, now: float) -> list[Frame]:
        """Socket dropped. The seat stays reserved for a token reattach;
        stalls this causes are resolved by the round timeouts, not here."""
        player = self.game.players.get(player_id)
        if player is None:
            return []
        player.connected = False
        frames = self.tick(now)
        frames.extend(self._broadcast("STATE", self._state_payload(now)))
        return frames

    def _roster_broadcast(self, now: float, joined: str, token: str) -> list[Frame]:
        frames = []
        state = self._state_payload(now)
        for pid in self._connected_ids():
            payload = dict(state)
            if pid == joined:
                # The ack frame also carries the client's own identity.
                payload["selfId"] = pid
                payload["token"] = token
                payload["roomId"] = self.room_id
            frames.append(self._emit(pid, "STATE", payload))
        return frames

    def _new_token(self) -> str:
        if self._rng is not None:
            return "".join(self._rng.choices("0123456789abcdef", k=24))
        return secrets.token_hex(12)

    # -- inbound routing ------------------------------------------------------

    def handle(self, player_id: str, msg_type: str, seq: int,
               payload: dict[str, Any], now: float) -> list[Frame]:
        """Route one authenticated client frame; returns frames to send."""
        if player_id not in self.game.players:
            return [self._emit_unregistered(player_id, "UNAUTHENTICATED",
                                            "not a member of this room")]
        last = self._last_in.get(player_id, 0)
        if seq <= last:
            return []  # duplicate or stale: drop idempotently
        self._last_in[player_id] = seq

        frames = self.tick(now)
        try:
            if msg_type == "START":
                frames.extend(self._start(now))
            elif msg_type == "SET_SENTENCE":
                frames.extend(self._set_sentence(player_id, payload, now))
            elif msg_type == "GUESS":
                frames.extend(self._guess(player_id, payload, now))
            elif msg_type == "CHAT":
                frames.extend(self._chat(player_id, payload, now))
            else:
                raise GameError("BAD_MESSAGE", f"unexpected type {msg_type!r}")
        except GameError as exc:
            frames.append(self._emit(player_id, "ERROR",
                                     {"code": exc.code, "message": str(exc)}))
        return frames

    # -- commands -------------------------------------------------------------

    def _start(self, now: float) -> list[Frame]:
        if now < self.intermission_until:
            wait = self.intermission_until - now
            raise GameError("INTERMISSION",
                            f"next round opens in {wait:.1f}s")
        image = self._next_image()
        self.game.start_round(image, now)
        return self._broadcast("STATE", self._state_payload(now))

    def _set_sentence(self, player_id: str, payload: dict, now: float) -> list[Frame]:
        text = protocol.require_text(payload)
        self.game.set_sentence(player_id, text, now)
        # Broadcast the fresh mask; the raw sentence stays server-side.
        return self._broadcast("STATE", self._state_payload(now))

    def _guess(self, player_id: str, payload: dict, now: float) -> list[Frame]:
        text = protocol.require_text(payload)
        outcome = self.game.submit_guess(player_id, text, now)
        frames: list[Frame] = []
        if outcome.outcome == "hit":
            round_ = self.game.current_round
            assert round_ is not None and round_.sentence is not None
            word = round_.sentence.tokens[outcome.revealed_positions[0]].surface
            frames.extend(self._broadcast("REVEAL", {
                "positions": outcome.revealed_positions,
                "word": word,
                "guesserId": player_id,
                "points": outcome.points_awarded,
            }))
            frames.extend(self._broadcast(
                "SCORE", {"scores": protocol.scores_wire(self.game.players)}
            ))
        frames.extend(self._broadcast("CHAT", {
            "playerId": player_id,
            "displayName": self.game.players[player_id].display_name,
            "kind": "guess",
            "outcome": outcome.outcome,
            "text": text,
        }))
        frames.extend(self.tick(now))  # a final hit ends the round at once
        return frames

    def _chat(self, player_id: str, payload: dict, now: float) -> list[Frame]:
        text = protocol.require_text(payload)
        round_ = self.game.current_round
        round_active = round_ is not None and round_.phase != ENDED
        if round_active and player_id == round_.leader_id:
            # Suppressed server-side so a modified client cannot leak.
            raise GameError("LEADER_MUTED",
                            "the leader cannot chat during their round")
        return self._broadcast("CHAT", {
            "playerId": player_id,
            "displayName": self.game.players[player_id].display_name,
            "kind": "chat",
            "text": text,
        })

    # -- time ----------------------------------------------------------------

    def tick(self, now: float) -> list[Frame]:
        """Apply due deadlines; announce and persist a finished round."""
        round_ = self.game.current_round
        if round_ is None or round_.round_id == self._announced_round:
            return []
        record = self.game.tick(now)
        if record is not None:
            self._announced_round = round_.round_id
            self.intermission_until = now + self.intermission_sec
            # Durability before acknowledgement: the record must be on disk
            # (or queued with an operator alert) before ROUND_END goes out.
            self.store.append_or_queue(record)
            reason = "ALL_REVEALED" if record.blanks_remaining == 0 else "TIME_UP"
            frames = self._broadcast("ROUND_END", {
                "aborted": False,
                "reason": reason,
                "record": record.to_dict(),
            })
            frames.extend(self._broadcast("STATE", self._state_payload(now)))
            return frames
        if round_.aborted:
            self._announced_round = round_.round_id
            self.intermission_until = now + self.intermission_sec
            frames = self._broadcast("ROUND_END", {
                "aborted": True,
                "reason": round_.abort_reason,
                "roundId": round_.round_id,
                "record": None,
            })
            frames.extend(self._broadcast("STATE", self._state_payload(now)))
            return frames
        return []

    # -- views ----------------------------------------------------------------

    def _state_payload(self, now: float) -> dict[str, Any]:
        round_ = self.game.current_round
        phase = "LOBBY" if round_ is None else round_.phase
        mask: list[dict[str, Any]] = []
        deadline: float | None = None
        image_id = leader_id = round_id = None
        locator = None
        if round_ is not None:
            image_id = round_.image_id
            leader_id = round_.leader_id
            round_id = round_.round_id
            locator = self._locators.get(round_.image_id)
            if round_.phase == AWAITING_SENTENCE:
                deadline = round_.sentence_deadline
            elif round_.phase == GUESSING:
                deadline = round_.deadline
                assert round_.sentence is not None
                mask = protocol.mask_wire(round_.sentence)
        return {
            "phase": phase,
            "imageLocator": locator,
            "mask": mask,
            "deadlineMs": None if deadline is None else int(round(deadline * 1000)),
            "scores": protocol.scores_wire(self.game.players),
            "imageId": image_id,
            "leaderId": leader_id,
            "roundId": round_id,
            "serverNowMs": int(round(now * 1000)),
            "intermissionUntilMs": int(round(self.intermission_until * 1000)),
        }

    # -- plumbing ---------------------------------------------------------------

    def _next_image(self) -> CorpusImage:
        if not self._image_queue:
            order = list(range(len(self.images)))
            (self._rng or Random()).shuffle(order)
            self._image_queue = order
        return self.images[self._image_queue.pop(0)]

    def _connected_ids(self) -> list[str]:
        return [p.id for p in self.game.players.values() if p.connected]

    def _broadcast(self, msg_type: str, payload: dict[str, Any]) -> list[Frame]:
        return [self._emit(pid, msg_type, dict(payload))
                for pid in self._connected_ids()]

    def _emit(self, target: str, msg_type: str, payload: dict[str, Any]) -> Frame:
        self._out_seq[target] = self._out_seq.get(target, 0) + 1
        return target, protocol.envelope(msg_type, self._out_seq[target], payload)

    def _emit_unregistered(self, target: str, code: str, message: str) -> Frame:
        return target, protocol.envelope(
            "ERROR", 1, {"code": code, "message": message}
        )


class RoomManager:
    """Creates rooms and owns what they share: corpus, store, defaults."""

    def __init__(self, images: list[CorpusImage], store: RoundStore,
                 defaults: GameConfig | None = None,
                 stops: StopWordList | None = None,
                 max_rooms: int = 256,
                 seed: int | None = None,
                 intermission_sec: float = INTERMISSION_SEC):
        self.images = images
        self.store = store
        self.defaults = defaults or GameConfig()
        self.stops = stops or StopWordList.builtin()
        self.max_rooms = max_rooms
        self.intermission_sec = intermission_sec
        self.rooms: dict[str, Room] = {}
        self._rng = Random(seed) if seed is not None else Random()
        self._seeded = seed is not None

    def create_room(self, overrides: dict[str, Any] | None = None) -> Room:
        if len(self.rooms) >= self.max_rooms:
            raise GameError("CAPACITY", f"{self.max_rooms} rooms already live")
        config = merge_config(self.defaults, overrides or {})
        room_id = self._new_code()
        room = Room(
            room_id, config, self.images, self.store, stops=self.stops,
            rng=Random(self._rng.getrandbits(64)) if self._seeded else None,
            intermission_sec=self.intermission_sec,
        )
        self.rooms[room_id] = room
        return room

    def get(self, room_id: str) -> Room:
        room = self.rooms.get(room_id)
        if room is None:
            raise GameError("UNKNOWN_ROOM", f"no room {room_id!r}")
        return room

    def _new_code(self) -> str:
        while True:
            code = "".join(self._rng.choices(_CODE_ALPHABET, k=ROOM_CODE_LEN))
            if code not in self.rooms:
                return code


def merge_config(defaults: GameConfig, overrides: dict[str, Any]) -> GameConfig:
    """Apply camelCase wire overrides onto a GameConfig.

    Unknown keys are rejected rather than ignored so a typo in a client
    cannot silently run a misconfigured room.
    """
    if not overrides:
        return defaults
    kwargs = {
        "min_players": defaults.min_players,
        "round_duration_sec": defaults.round_duration_sec,
        "points_per_word": defaults.points_per_word,
        "sentence_timeout_sec": defaults.sentence_timeout_sec,
        "max_sentence_content_words": defaults.max_sentence_content_words,
    }
    for key, value in overrides.items():
        field = _CONFIG_KEYS.get(key)
        if field is None:
            raise GameError("INVALID_CONFIG", f"unknown config key {key!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise GameError("INVALID_CONFIG", f"{key} must be a number")
        if field in ("min_players", "points_per_word", "max_sentence_content_words"):
            if value != int(value):
                raise GameError("INVALID_CONFIG", f"{key} must be an integer")
            value = int(value)
        kwargs[field] = value
    return GameConfig(**kwargs)  # raises INVALID_CONFIG on bad values
