"""Finalized round records, the unit every analysis downstream consumes.

A record exists only for rounds that ran to completion (timeout or all
blanks guessed). Aborted rounds leave nothing. `play_verified` is the
game's own verification signal: true exactly when every unique content
word was guessed, i.e. blanks_remaining == 0. The serialized form calls
this field "srVerified"; that name is part of the stored/exported JSON
schema and never changes.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class GuessEntry:
    """One line of a round's guess log."""

    player_id: str
    guess: str
    at: float  # seconds, same clock as the round's deadlines
    outcome: str  # hit | repeat | miss | invalid

    def to_dict(self) -> dict:
        return {
            "playerId": self.player_id,
            "guess": self.guess,
            "at": self.at,
            "outcome": self.outcome,
        }

    @classmethod
    def from_dict(cls, data: dict) -> GuessEntry:
        return cls(
            player_id=data["playerId"],
            guess=data["guess"],
            at=float(data["at"]),
            outcome=data["outcome"],
        )


@dataclass(frozen=True)
class RoundRecord:
    round_id: str
    image_id: str
    raw_sentence: str
    content_norm_count: int
    blanks_remaining: int
    play_verified: bool
    leader_id: str
    per_player_points: dict[str, int]
    ended_at: float
    guess_log: tuple[GuessEntry, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.play_verified != (self.blanks_remaining == 0):
            raise ValueError("play_verified must equal (blanks_remaining == 0)")
        if not 0 <= self.blanks_remaining <= self.content_norm_count:
            raise ValueError("blanks_remaining out of range")

    def to_dict(self) -> dict:
        return {
            "roundId": self.round_id,
            "imageId": self.image_id,
            "rawSentence": self.raw_sentence,
            "contentNormCount": self.content_norm_count,
            "blanksRemaining": self.blanks_remaining,
            "srVerified": self.play_verified,
            "leaderId": self.leader_id,
            "perPlayerPoints": dict(self.per_player_points),
            "endedAt": self.ended_at,
            "guessLog": [entry.to_dict() for entry in self.guess_log],
        }

    @classmethod
    def from_dict(cls, data: dict) -> RoundRecord:
        return cls(
            round_id=data["roundId"],
            image_id=data["imageId"],
            raw_sentence=data["rawSentence"],
            content_norm_count=int(data["contentNormCount"]),
            blanks_remaining=int(data["blanksRemaining"]),
            play_verified=bool(data["srVerified"]),
            leader_id=data["leaderId"],
            per_player_points={k: int(v) for k, v in data["perPlayerPoints"].items()},
            ended_at=float(data["endedAt"]),
            guess_log=tuple(GuessEntry.from_dict(e) for e in data.get("guessLog", [])),
        )
