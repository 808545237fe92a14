from __future__ import annotations

import pytest

from capguess.corpus import CorpusImage
from capguess.engine import (
    AWAITING_SENTENCE,
    ENDED,
    GUESSING,
    GameConfig,
    GameState,
)
from capguess.errors import GameError

from prop_engine import run_random_rounds

IMAGE = CorpusImage(image_id="img-001", locator="img-001.jpg")


def make_game(n_players: int = 3, **config_overrides) -> GameState:
    state = GameState(config=GameConfig(**config_overrides))
    for i in range(n_players):
        state.add_player(f"p{i + 1}", f"Player {i + 1}")
    return state


def start_guessing(state: GameState, sentence: str, now: float = 0.0) -> None:
    round_ = state.start_round(IMAGE, now)
    state.set_sentence(round_.leader_id, sentence, now)


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

def test_config_defaults():
    config = GameConfig()
    assert config.min_players == 3
    assert config.round_duration_sec == 60
    assert config.points_per_word == 10
    assert config.sentence_timeout_sec == 45
    assert config.max_sentence_content_words == 20


def test_config_rejects_two_player_games():
    with pytest.raises(GameError) as err:
        GameConfig(min_players=2)
    assert err.value.code == "INVALID_CONFIG"


def test_config_rejects_nonpositive_values():
    with pytest.raises(GameError):
        GameConfig(round_duration_sec=0)
    with pytest.raises(GameError):
        GameConfig(points_per_word=-1)


# --------------------------------------------------------------------------
# round start and rotation
# --------------------------------------------------------------------------

def test_start_cycles_rotation_head_to_tail():
    state = make_game()
    round_ = state.start_round(IMAGE, now=0.0)
    assert round_.leader_id == "p1"
    assert list(state.rotation) == ["p2", "p3", "p1"]
    assert round_.phase == AWAITING_SENTENCE


def test_start_requires_min_players():
    state = make_game(n_players=2)
    with pytest.raises(GameError) as err:
        state.start_round(IMAGE, now=0.0)
    assert err.value.code == "NOT_ENOUGH_PLAYERS"


def test_start_rejected_while_round_running():
    state = make_game()
    state.start_round(IMAGE, now=0.0)
    with pytest.raises(GameError) as err:
        state.start_round(IMAGE, now=1.0)
    assert err.value.code == "ROUND_IN_PROGRESS"


def test_duplicate_player_rejected():
    state = make_game()
    with pytest.raises(GameError) as err:
        state.add_player("p1", "Again")
    assert err.value.code == "DUPLICATE_PLAYER"


# --------------------------------------------------------------------------
# sentence setting
# --------------------------------------------------------------------------

def test_set_sentence_masks_and_starts_clock():
    state = make_game()
    state.start_round(IMAGE, now=10.0)
    mask = state.set_sentence("p1", "A man is riding a brown horse", now=12.0)
    assert mask.blanks_remaining == 4  # man, riding, brown, horse
    assert [mask.status[i] for i in (0, 2, 4)] == ["STOP_REVEALED"] * 3
    assert state.current_round.phase == GUESSING
    assert state.current_round.deadline == 12.0 + 60.0


def test_set_sentence_only_leader():
    state = make_game()
    state.start_round(IMAGE, now=0.0)
    with pytest.raises(GameError) as err:
        state.set_sentence("p2", "A brown dog", now=0.0)
    assert err.value.code == "NOT_LEADER"


def test_set_sentence_wrong_phase():
    state = make_game()
    with pytest.raises(GameError) as err:
        state.set_sentence("p1", "A brown dog", now=0.0)
    assert err.value.code == "WRONG_PHASE"
    start_guessing(state, "A brown dog")
    with pytest.raises(GameError) as err:
        state.set_sentence("p1", "Another try", now=1.0)
    assert err.value.code == "WRONG_PHASE"


def test_set_sentence_needs_content():
    state = make_game()
    state.start_round(IMAGE, now=0.0)
    with pytest.raises(GameError) as err:
        state.set_sentence("p1", "the a is", now=0.0)
    assert err.value.code == "NO_CONTENT_WORDS"


def test_set_sentence_length_cap():
    state = make_game(max_sentence_content_words=3)
    state.start_round(IMAGE, now=0.0)
    with pytest.raises(GameError) as err:
        state.set_sentence("p1", "dog cat horse bird", now=0.0)
    assert err.value.code == "TOO_LONG"


# --------------------------------------------------------------------------
# guessing
# --------------------------------------------------------------------------

def test_correct_guess_reveals_and_pays_both():
    state = make_game()
    start_guessing(state, "A man is riding a brown horse")
    outcome = state.submit_guess("p2", "horse", now=5.0)
    assert outcome.revealed_positions == [6]
    assert outcome.points_awarded == 10
    assert not outcome.already_revealed
    assert state.players["p2"].score == 10
    assert state.players["p1"].score == 10  # leader reward
    assert state.current_round.sentence.blanks_remaining == 3


def test_repeat_guess_pays_nothing():
    state = make_game()
    start_guessing(state, "A man is riding a brown horse")
    state.submit_guess("p2", "horse", now=5.0)
    repeat = state.submit_guess("p3", "HORSE!", now=6.0)
    assert repeat.already_revealed
    assert repeat.points_awarded == 0
    assert state.players["p3"].score == 0


def test_guess_reveals_every_occurrence():
    state = make_game()
    start_guessing(state, "the dog chases the dog")
    outcome = state.submit_guess("p2", "dog", now=1.0)
    assert outcome.revealed_positions == [1, 4]
    assert state.current_round.sentence.blanks_remaining == 1


def test_leader_cannot_guess():
    state = make_game()
    start_guessing(state, "A brown dog")
    with pytest.raises(GameError) as err:
        state.submit_guess("p1", "dog", now=1.0)
    assert err.value.code == "LEADER_CANNOT_GUESS"


def test_guess_outside_active_round():
    state = make_game()
    with pytest.raises(GameError) as err:
        state.submit_guess("p2", "dog", now=0.0)
    assert err.value.code == "ROUND_NOT_ACTIVE"


def test_guess_after_deadline():
    state = make_game()
    start_guessing(state, "A brown dog", now=0.0)
    with pytest.raises(GameError) as err:
        state.submit_guess("p2", "dog", now=61.0)
    assert err.value.code == "DEADLINE_PASSED"


def test_unknown_guesser():
    state = make_game()
    start_guessing(state, "A brown dog")
    with pytest.raises(GameError) as err:
        state.submit_guess("ghost", "dog", now=1.0)
    assert err.value.code == "UNKNOWN_PLAYER"


def test_unparseable_guess_is_logged_not_fatal():
    state = make_game()
    start_guessing(state, "A brown dog")
    outcome = state.submit_guess("p2", "!!!", now=1.0)
    assert outcome.outcome == "invalid"
    assert outcome.points_awarded == 0
    assert state.current_round.guess_log[-1].outcome == "invalid"


# --------------------------------------------------------------------------
# round end
# --------------------------------------------------------------------------

def test_timeout_freezes_blanks():
    state = make_game()
    start_guessing(state, "A man is riding a brown horse", now=0.0)
    state.submit_guess("p2", "horse", now=5.0)
    state.submit_guess("p3", "man", now=6.0)
    assert state.tick(30.0) is None  # mid-round, nothing happens
    record = state.tick(60.0)
    assert record is not None
    assert record.blanks_remaining == 2
    assert not record.play_verified
    assert record.ended_at == 60.0
    assert state.history == [record]


def test_round_ends_early_when_cleared():
    state = make_game()
    start_guessing(state, "A brown dog", now=0.0)
    state.submit_guess("p2", "brown", now=1.0)
    state.submit_guess("p3", "dog", now=2.0)
    record = state.tick(3.0)
    assert record is not None
    assert record.blanks_remaining == 0
    assert record.play_verified
    assert record.ended_at == 3.0


def test_sentence_timeout_aborts_without_record():
    state = make_game()
    state.start_round(IMAGE, now=0.0)
    assert state.tick(44.9) is None
    assert state.tick(45.0) is None
    assert state.current_round.phase == ENDED
    assert state.current_round.aborted
    assert state.history == []


def test_leader_leaving_aborts():
    state = make_game(n_players=4)
    start_guessing(state, "A brown dog")
    state.remove_player("p1")
    assert state.current_round.aborted
    assert state.history == []


def test_falling_below_minimum_aborts():
    state = make_game(n_players=4)
    start_guessing(state, "A brown dog")
    state.remove_player("p4")  # 3 remain, fine
    assert not state.current_round.aborted
    state.remove_player("p3")  # 2 remain
    assert state.current_round.aborted
    assert state.history == []


def test_remove_unknown_player():
    state = make_game()
    with pytest.raises(GameError) as err:
        state.remove_player("ghost")
    assert err.value.code == "UNKNOWN_PLAYER"


def test_late_joiner_can_guess_and_joins_rotation_tail():
    state = make_game()
    start_guessing(state, "A brown dog")
    state.add_player("p4", "Latecomer")
    assert list(state.rotation)[-1] == "p4"
    outcome = state.submit_guess("p4", "dog", now=1.0)
    assert outcome.points_awarded == 10


def test_next_round_can_start_after_end():
    state = make_game()
    start_guessing(state, "A brown dog", now=0.0)
    state.tick(60.0)
    round_ = state.start_round(IMAGE, now=70.0)
    assert round_.leader_id == "p2"  # rotation moved on


# --------------------------------------------------------------------------
# randomized property suite (small here; acceptance runs it at scale)
# --------------------------------------------------------------------------

def test_randomized_rounds_hold_invariants():
    assert run_random_rounds(200, seed=1234) >= 200
