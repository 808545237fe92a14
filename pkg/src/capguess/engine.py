"""Per-room game state machine.

One leader writes a sentence about an image; everyone else races to guess
its content words. Stop words are shown from the start; a correct guess
reveals every position of the matched word and pays both the guesser and
the leader. The round ends at the deadline or as soon as nothing is left
to guess.

The engine is pure: time arrives as a `now` argument and randomness stays
outside, so identical command sequences always reproduce identical rounds.
Callers (server, bot harness) own clocks, sockets, and persistence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .corpus import CorpusImage
from .errors import GameError
from .lexic import CONTENT, StopWordList, Token, normalize_or_none, tokenize
from .records import GuessEntry, RoundRecord

# Round phases.
AWAITING_SENTENCE = "AWAITING_SENTENCE"
GUESSING = "GUESSING"
ENDED = "ENDED"

# Per-position mask statuses.
STOP_REVEALED = "STOP_REVEALED"
HIDDEN = "HIDDEN"
REVEALED = "REVEALED"


# --------------------------------------------------------------------------
# Configuration and roster
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GameConfig:
    min_players: int = 3
    round_duration_sec: int = 60
    points_per_word: int = 10
    sentence_timeout_sec: int = 45
    max_sentence_content_words: int = 20

    def __post_init__(self):
        for name in (
            "min_players",
            "round_duration_sec",
            "points_per_word",
            "sentence_timeout_sec",
            "max_sentence_content_words",
        ):
            if getattr(self, name) <= 0:
                raise GameError("INVALID_CONFIG", f"{name} must be strictly positive")
        # Three players is the floor for the game to make sense: one leader
        # plus at least two competing guessers.
        if self.min_players < 3:
            raise GameError("INVALID_CONFIG", "min_players must be >= 3")


@dataclass
class Player:
    id: str
    display_name: str
    connected: bool = True
    score: int = 0
    join_order: int = 0


# --------------------------------------------------------------------------
# Masked sentence
# --------------------------------------------------------------------------

class MaskedSentence:
    """The tokenized sentence plus a per-position visibility status.

    Stop positions are visible from the start (STOP_REVEALED); content
    positions start HIDDEN and flip to REVEALED all at once when their
    norm is guessed. Blanks are counted as unique hidden norms, not
    positions: one guess settles every occurrence of a word.
    """

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.status = [
            STOP_REVEALED if t.kind != CONTENT else HIDDEN for t in tokens
        ]

    @property
    def blanks_remaining(self) -> int:
        return len(self.hidden_norms())

    def hidden_norms(self) -> set[str]:
        return {
            t.norm
            for t, s in zip(self.tokens, self.status)
            if t.kind == CONTENT and s == HIDDEN
        }

    def content_norms(self) -> set[str]:
        return {t.norm for t in self.tokens if t.kind == CONTENT}

    def reveal(self, norm: str) -> list[int]:
        """Flip every hidden position of `norm` to REVEALED; return them."""
        positions = [
            t.position
            for t, s in zip(self.tokens, self.status)
            if t.kind == CONTENT and t.norm == norm and s == HIDDEN
        ]
        for p in positions:
            self.status[p] = REVEALED
        return positions


# --------------------------------------------------------------------------
# Round state
# --------------------------------------------------------------------------

@dataclass
class GuessOutcome:
    revealed_positions: list[int]
    points_awarded: int
    already_revealed: bool
    outcome: str  # hit | repeat | miss | invalid
    norm: str | None


@dataclass
class RoundState:
    round_id: str
    image_id: str
    leader_id: str
    phase: str = AWAITING_SENTENCE
    sentence: MaskedSentence | None = None
    raw_sentence: str | None = None
    sentence_deadline: float = 0.0  # while AWAITING_SENTENCE
    deadline: float | None = None  # while GUESSING
    guess_log: list[GuessEntry] = field(default_factory=list)
    points_this_round: dict[str, int] = field(default_factory=dict)
    aborted: bool = False
    abort_reason: str | None = None


# --------------------------------------------------------------------------
# Game state and operations
# --------------------------------------------------------------------------

class GameState:
    """Roster, rotation, the current round, and finished-round history."""

    def __init__(self, config: GameConfig | None = None,
                 stops: StopWordList | None = None):
        self.config = config or GameConfig()
        self.stops = stops or StopWordList.builtin()
        self.players: dict[str, Player] = {}
        self.rotation: deque[str] = deque()
        self.current_round: RoundState | None = None
        self.history: list[RoundRecord] = []
        self._round_counter = 0
        self._join_counter = 0

    # -- roster ------------------------------------------------------------

    def add_player(self, player_id: str, display_name: str) -> Player:
        """Add to the roster and the rotation tail. Late joiners may guess
        in the round already under way."""
        if player_id in self.players:
            raise GameError("DUPLICATE_PLAYER", f"player {player_id!r} already joined")
        player = Player(id=player_id, display_name=display_name,
                        join_order=self._join_counter)
        self._join_counter += 1
        self.players[player_id] = player
        self.rotation.append(player_id)
        return player

    def remove_player(self, player_id: str) -> None:
        """Drop a player. Aborts the round if the leader left or the room
        fell below the player minimum mid-round."""
        if player_id not in self.players:
            raise GameError("UNKNOWN_PLAYER", f"no player {player_id!r}")
        del self.players[player_id]
        self.rotation.remove(player_id)
        round_ = self.current_round
        if round_ is None or round_.phase == ENDED:
            return
        if round_.leader_id == player_id:
            self._abort("LEADER_LEFT")
        elif self.connected_count() < self.config.min_players:
            self._abort("NOT_ENOUGH_PLAYERS")

    def connected_count(self) -> int:
        return sum(1 for p in self.players.values() if p.connected)

    # -- round life cycle ----------------------------------------------------

    def start_round(self, image: CorpusImage, now: float) -> RoundState:
        if self.current_round is not None and self.current_round.phase != ENDED:
            raise GameError("ROUND_IN_PROGRESS", "a round is already running")
        if self.connected_count() < self.config.min_players:
            raise GameError(
                "NOT_ENOUGH_PLAYERS",
                f"need {self.config.min_players}, have {self.connected_count()}",
            )
        leader_id = self._next_leader()
        self._round_counter += 1
        round_ = RoundState(
            round_id=f"round-{self._round_counter:06d}",
            image_id=image.image_id,
            leader_id=leader_id,
            sentence_deadline=now + self.config.sentence_timeout_sec,
        )
        self.current_round = round_
        return round_

    def _next_leader(self) -> str:
        """Cycle the rotation head to the tail and lead with it, skipping
        disconnected players (they forfeit the turn, order preserved)."""
        for _ in range(len(self.rotation)):
            head = self.rotation[0]
            self.rotation.rotate(-1)
            if self.players[head].connected:
                return head
        raise GameError("NOT_ENOUGH_PLAYERS", "nobody connected to lead")

    def set_sentence(self, player_id: str, text: str, now: float) -> MaskedSentence:
        round_ = self.current_round
        if round_ is None or round_.phase != AWAITING_SENTENCE:
            raise GameError("WRONG_PHASE", "no sentence expected right now")
        if player_id != round_.leader_id:
            raise GameError("NOT_LEADER", f"{player_id!r} is not this round's leader")
        tokens = tokenize(text, self.stops)  # raises NO_CONTENT_WORDS
        content_count = sum(1 for t in tokens if t.kind == CONTENT)
        if content_count > self.config.max_sentence_content_words:
            raise GameError(
                "TOO_LONG",
                f"{content_count} content words exceeds the "
                f"{self.config.max_sentence_content_words} maximum",
            )
        round_.sentence = MaskedSentence(tokens)
        round_.raw_sentence = text
        round_.phase = GUESSING
        round_.deadline = now + self.config.round_duration_sec
        return round_.sentence

    def submit_guess(self, player_id: str, guess: str, now: float) -> GuessOutcome:
        round_ = self.current_round
        if round_ is None or round_.phase != GUESSING:
            raise GameError("ROUND_NOT_ACTIVE", "no round is accepting guesses")
        if player_id == round_.leader_id:
            raise GameError("LEADER_CANNOT_GUESS", "the leader sits this one out")
        if player_id not in self.players:
            raise GameError("UNKNOWN_PLAYER", f"no player {player_id!r}")
        assert round_.deadline is not None
        if now >= round_.deadline:
            raise GameError("DEADLINE_PASSED", "the round is over")

        mask = round_.sentence
        assert mask is not None
        norm = normalize_or_none(guess)

        if norm is None:
            outcome = GuessOutcome([], 0, False, "invalid", None)
        elif norm in mask.hidden_norms():
            positions = mask.reveal(norm)
            points = self.config.points_per_word
            self._award(player_id, points, round_)
            self._award(round_.leader_id, points, round_)
            outcome = GuessOutcome(positions, points, False, "hit", norm)
        elif any(t.norm == norm for t in mask.tokens):
            # Already on the board, whether guessed earlier or a stop word.
            outcome = GuessOutcome([], 0, True, "repeat", norm)
        else:
            outcome = GuessOutcome([], 0, False, "miss", norm)

        round_.guess_log.append(
            GuessEntry(player_id=player_id, guess=guess, at=now, outcome=outcome.outcome)
        )
        return outcome

    def _award(self, player_id: str, points: int, round_: RoundState) -> None:
        # A player may have left mid-round; their banked points stay in the
        # round tally but there is no roster row to bump.
        if player_id in self.players:
            self.players[player_id].score += points
        round_.points_this_round[player_id] = (
            round_.points_this_round.get(player_id, 0) + points
        )

    def tick(self, now: float) -> RoundRecord | None:
        """Advance time. Finalizes a guessing round at its deadline or when
        nothing is left to guess; aborts a round whose leader never wrote a
        sentence. Returns the new RoundRecord when one was produced."""
        round_ = self.current_round
        if round_ is None or round_.phase == ENDED:
            return None
        if round_.phase == AWAITING_SENTENCE:
            if now >= round_.sentence_deadline:
                self._abort("SENTENCE_TIMEOUT")
            return None
        assert round_.deadline is not None and round_.sentence is not None
        if now >= round_.deadline or round_.sentence.blanks_remaining == 0:
            return self._finalize(now)
        return None

    def _abort(self, reason: str) -> None:
        round_ = self.current_round
        assert round_ is not None
        round_.phase = ENDED
        round_.aborted = True
        round_.abort_reason = reason

    def _finalize(self, now: float) -> RoundRecord:
        round_ = self.current_round
        assert round_ is not None and round_.sentence is not None
        round_.phase = ENDED
        mask = round_.sentence
        record = RoundRecord(
            round_id=round_.round_id,
            image_id=round_.image_id,
            raw_sentence=round_.raw_sentence or "",
            content_norm_count=len(mask.content_norms()),
            blanks_remaining=mask.blanks_remaining,
            play_verified=mask.blanks_remaining == 0,
            leader_id=round_.leader_id,
            per_player_points=dict(round_.points_this_round),
            ended_at=now,
            guess_log=tuple(round_.guess_log),
        )
        self.history.append(record)
        return record


# --------------------------------------------------------------------------
# Replay
# --------------------------------------------------------------------------

def replay_round(record: RoundRecord, config: GameConfig,
                 stops: StopWordList | None = None) -> tuple[MaskedSentence, dict[str, int]]:
    """Re-run a record's guess log against its sentence from scratch.

    Returns the final mask and the per-player point tally. Used to check
    that records are deterministic functions of their logs.
    """
    stops = stops or StopWordList.builtin()
    mask = MaskedSentence(tokenize(record.raw_sentence, stops))
    points: dict[str, int] = {}
    for entry in record.guess_log:
        norm = normalize_or_none(entry.guess)
        if norm is not None and norm in mask.hidden_norms():
            mask.reveal(norm)
            for earner in (entry.player_id, record.leader_id):
                points[earner] = points.get(earner, 0) + config.points_per_word
    return mask, points
