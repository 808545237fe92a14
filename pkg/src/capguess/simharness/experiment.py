"""Monte Carlo experiments over the real game stack.

``run_cohort`` drives a Room through its normal command surface with bot
players and a virtual clock, so thousands of rounds replay the exact code path
human players exercise, in seconds. ``blanks_accuracy_trend`` then buckets the
finished rounds by how many blanks were left and correlates bucket blanks with
the fraction of rounds whose sentence actually described the image.

A round is labelled accurate when at least ``accuracy_threshold`` (default
0.75) of its distinct content norms are members of the image's tag set. That
is a proxy ground truth standing in for human review of the collected
sentences; the threshold is a tunable modelling choice, not a measured one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import product
from random import Random
from typing import Iterable, Sequence

from capguess.corpus import CorpusImage
from capguess.engine import GameConfig
from capguess.errors import GameError
from capguess.lexic import CONTENT, StopWordList, normalize_or_none, tokenize
from capguess.records import RoundRecord
from capguess.stats import spearman_rho
from capguess.server.rooms import Room
from capguess.simharness.bots import (
    GuesserBot,
    GuesserBotModel,
    LeaderBot,
    LeaderBotModel,
    Vocabulary,
    cooccurrence_counts,
)


@dataclass(frozen=True)
class LabeledRound:
    blanks: int
    accurate: bool
    record: RoundRecord | None = None


class _CaptureStore:
    """Stands in for RoundStore when rounds only need collecting, not disk."""

    def __init__(self):
        self.records: list[RoundRecord] = []

    def append_or_queue(self, record: RoundRecord) -> bool:
        self.records.append(record)
        return True


class _LeakCheck:
    """Asserts no frame delivered to a guesser carries a hidden norm.

    Player-typed chat text is excluded (the invariant is about server
    knowledge); everything else in every payload is scanned.
    """

    def __init__(self):
        self.hidden: set[str] = set()

    def start_round(self, content_norms: set[str]) -> None:
        self.hidden = set(content_norms)

    def observe(self, frame_type: str, payload: dict) -> None:
        if frame_type == "REVEAL":
            norm = normalize_or_none(payload.get("word", ""))
            self.hidden.discard(norm or "")
        elif frame_type == "ROUND_END":
            self.hidden = set()

    def scan(self, frame_type: str, payload: dict) -> None:
        if not self.hidden:
            return
        for text in _payload_strings(payload, frame_type):
            for raw in text.split():
                norm = normalize_or_none(raw)
                if norm in self.hidden:
                    raise AssertionError(
                        f"hidden norm {norm!r} leaked via {frame_type}")


def _payload_strings(value, frame_type: str, key: str | None = None):
    if isinstance(value, str):
        if not (frame_type == "CHAT" and key == "text"):
            yield value
    elif isinstance(value, dict):
        for k, v in value.items():
            yield k
            yield from _payload_strings(v, frame_type, k)
    elif isinstance(value, (list, tuple)):
        for v in value:
            yield from _payload_strings(v, frame_type, key)


def run_cohort(
    corpus: Sequence[CorpusImage],
    n_rounds: int,
    leader_model: LeaderBotModel,
    guesser_models: Sequence[GuesserBotModel],
    config: GameConfig | None = None,
    seed: int | str = 0,
    accuracy_threshold: float = 0.75,
    vocab: Vocabulary | None = None,
    check_isolation: bool = True,
) -> list[LabeledRound]:
    """Play ``n_rounds`` with bots over the in-process transport."""
    if n_rounds < 1:
        raise GameError("INVALID_CONFIG", "n_rounds must be >= 1")
    if len(guesser_models) < 2:
        raise GameError("INVALID_MODEL", "need >= 2 guesser models")
    tagged = [img for img in corpus if img.tags]
    if not tagged:
        raise GameError("CORPUS_WITHOUT_TAGS",
                        "no corpus image carries tags; bots cannot play")

    config = config or GameConfig()
    stops = StopWordList.builtin()
    vocab = vocab or Vocabulary.builtin(stops)
    store = _CaptureStore()
    room = Room("SIM", config, tagged, store, stops=stops,
                rng=Random(f"{seed}:room"))

    n_players = 1 + len(guesser_models)
    sessions = []
    now = 0.0
    for i in range(n_players):
        session, _ = room.join(f"bot-{i + 1}", now)
        sessions.append(session)
    seqs = {s.player_id: 0 for s in sessions}

    leader_bot = LeaderBot(leader_model, vocab, stops,
                           Random(f"{seed}:leader:{leader_model.rng_seed}"))
    tags_by_image = {img.image_id: img.tags or () for img in tagged}
    cooccur = cooccurrence_counts(tagged)
    guessers: dict[str, GuesserBot] = {}
    for i, session in enumerate(sessions):
        model = guesser_models[i % len(guesser_models)]
        guessers[session.player_id] = GuesserBot(
            session.player_id, model, vocab, tags_by_image, cooccur,
            Random(f"{seed}:guesser:{i}:{model.rng_seed}"))

    images_by_id = {img.image_id: img for img in tagged}
    tag_norms = {
        img.image_id: {n for t in (img.tags or ())
                       if (n := normalize_or_none(t))}
        for img in tagged
    }
    check = _LeakCheck() if check_isolation else None
    labeled: list[LabeledRound] = []

    def send(player_id: str, msg_type: str, payload: dict) -> list:
        seqs[player_id] += 1
        return room.handle(player_id, msg_type, seqs[player_id], payload, now)

    def route(frames, leader_id: str) -> bool:
        """Deliver frames to bots; returns True once ROUND_END is seen."""
        ended = False
        for target, frame in frames:
            ftype, payload = frame["type"], frame["payload"]
            if ftype == "ERROR":
                raise AssertionError(
                    f"bot {target} got {payload.get('code')}: "
                    f"{payload.get('message')}")
            if check is not None:
                check.observe(ftype, payload)
                if target != leader_id:
                    check.scan(ftype, payload)
            if target != leader_id:
                guessers[target].on_frame(ftype, payload)
            if ftype == "ROUND_END":
                ended = True
        return ended

    for _ in range(n_rounds):
        now = max(now, room.intermission_until) + 0.01
        frames = send(sessions[0].player_id, "START", {})
        state = frames[0][1]["payload"]
        leader_id = state["leaderId"]
        image = images_by_id[state["imageId"]]

        sentence = leader_bot.compose(image)
        content_norms = {t.norm for t in tokenize(sentence, stops)
                         if t.kind == CONTENT}
        if check is not None:
            check.start_round(content_norms)
        now += 0.5
        frames = send(leader_id, "SET_SENTENCE", {"text": sentence})
        deadline = None
        for target, frame in frames:
            if frame["type"] == "STATE":
                deadline = frame["payload"]["deadlineMs"] / 1000.0
                break
        route(frames, leader_id)

        active = [pid for pid in guessers if pid != leader_id]
        due = {pid: now + guessers[pid].next_gap_sec() for pid in active}
        ended = False
        while not ended:
            pid = min(active, key=lambda p: (due[p], p))
            # deadlineMs is rounded to whole ms, so keep a margin on both
            # sides of it rather than racing the engine's float deadline.
            if due[pid] >= deadline - 0.002:
                now = deadline + 0.01
                ended = route(room.tick(now), leader_id)
                break
            now = due[pid]
            word = guessers[pid].pick_guess()
            ended = route(send(pid, "GUESS", {"text": word}), leader_id)
            due[pid] = now + guessers[pid].next_gap_sec()
        if not ended:
            raise AssertionError("round did not finish")

        record = store.records[-1]
        norms = {t.norm for t in tokenize(record.raw_sentence, stops)
                 if t.kind == CONTENT}
        overlap = len(norms & tag_norms[record.image_id])
        accurate = bool(norms) and overlap / len(norms) >= accuracy_threshold
        labeled.append(LabeledRound(record.blanks_remaining, accurate, record))

    return labeled


def blanks_accuracy_trend(
    labeled: Iterable[LabeledRound],
    config_echo: dict | None = None,
    seed: int | str | None = None,
) -> dict:
    """Bucket rounds by final blanks and correlate blanks with accuracy.

    The accuracy fraction being identical across every bucket leaves no rank
    ordering to correlate; stats.spearman_rho reports that as CONSTANT_INPUT,
    which propagates.
    """
    rounds = list(labeled)
    if len(rounds) < 100:
        raise GameError("INSUFFICIENT_SPREAD",
                        f"need >= 100 rounds, got {len(rounds)}")
    by_blanks: dict[int, list[LabeledRound]] = {}
    for lr in rounds:
        by_blanks.setdefault(lr.blanks, []).append(lr)
    if len(by_blanks) < 3:
        raise GameError("INSUFFICIENT_SPREAD",
                        f"need >= 3 distinct blanks values, got "
                        f"{len(by_blanks)}")
    buckets = []
    for blanks in sorted(by_blanks):
        group = by_blanks[blanks]
        accurate = sum(1 for lr in group if lr.accurate)
        buckets.append({
            "blanks": blanks,
            "count": len(group),
            "accurateFraction": accurate / len(group),
        })
    rho = spearman_rho([b["blanks"] for b in buckets],
                       [b["accurateFraction"] for b in buckets])
    return {
        "roundsSimulated": len(rounds),
        "buckets": buckets,
        "spearmanRho": rho,
        "config": dict(config_echo or {}),
        "seed": seed,
    }


_GRID_AXES = ("fidelity", "ability", "roundDurationSec")


def sweep(
    corpus: Sequence[CorpusImage],
    grid: dict[str, Sequence[float]],
    rounds_per_cell: int = 200,
    base_config: GameConfig | None = None,
    seed: int | str = 0,
    guess_interval_ms: float = 2000.0,
) -> dict:
    """Run one cohort per grid cell; report mean blanks and verified fraction.

    Cell seeds are derived from the sweep seed and the cell's parameter
    values, so a sweep is reproducible as a whole while cells stay
    statistically independent.
    """
    unknown = set(grid) - set(_GRID_AXES)
    if unknown:
        raise GameError("INVALID_CONFIG",
                        f"unknown grid axis {sorted(unknown)[0]!r}")
    axes = {name: list(grid.get(name) or [None]) for name in _GRID_AXES}
    if not any(grid.get(name) for name in _GRID_AXES):
        raise GameError("INVALID_CONFIG", "grid is empty")
    base = base_config or GameConfig()

    cells = []
    for f, a, dur in product(axes["fidelity"], axes["ability"],
                             axes["roundDurationSec"]):
        fidelity = 0.8 if f is None else float(f)
        ability = 0.7 if a is None else float(a)
        config = base if dur is None else replace(
            base, round_duration_sec=int(dur))
        cell_seed = f"{seed}:cell:f{fidelity}:a{ability}" \
                    f":d{config.round_duration_sec}"
        labeled = run_cohort(
            corpus, rounds_per_cell,
            LeaderBotModel(fidelity=fidelity),
            [GuesserBotModel(ability=ability,
                             guess_interval_ms=guess_interval_ms)] * 2,
            config=config, seed=cell_seed)
        n = len(labeled)
        cells.append({
            "fidelity": fidelity,
            "ability": ability,
            "roundDurationSec": config.round_duration_sec,
            "rounds": n,
            "meanBlanks": sum(lr.blanks for lr in labeled) / n,
            "verifiedFraction":
                sum(1 for lr in labeled if lr.record.play_verified) / n,
            "seed": cell_seed,
        })
    return {"cells": cells}
