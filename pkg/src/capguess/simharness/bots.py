"""Simulated leaders and guessers.

The bots are deliberately shallow models: a leader picks template slots from
the image's tag vocabulary with probability ``fidelity`` (a distractor pool
otherwise), and a guesser draws from the tag vocabulary with probability
``ability`` (the global pool otherwise). Guessers bias tag draws toward tags
that co-occur with already-revealed words across the corpus, a minimal stand-in
for a human filling in blanks from context.

Bots only ever consume wire frames addressed to them; the raw sentence never
reaches a guesser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from random import Random

from capguess.corpus import CorpusImage
from capguess.errors import GameError
from capguess.lexic import StopWordList, normalize_or_none
from capguess.quality import Lexicons

SLOT_TYPES = ("noun", "adjective", "relation")
_SLOT_RE = re.compile(r"\{(\w+)\}")

DEFAULT_TEMPLATES = (
    "The {adjective} {noun} is {relation} the {noun}",
    "A {noun} is {relation} a {adjective} {noun}",
    "The {noun} and the {noun}",
    "A {adjective} {noun} with a {noun}",
    "The {noun} is {relation} the {noun}",
)


@dataclass(frozen=True)
class Vocabulary:
    """Typed word pools used for distractor slots and off-image guesses."""

    nouns: tuple[str, ...]
    adjectives: tuple[str, ...]
    relations: tuple[str, ...]

    def __post_init__(self):
        for name in ("nouns", "adjectives", "relations"):
            if not getattr(self, name):
                raise GameError("INVALID_MODEL", f"vocabulary {name} is empty")

    def pool(self, slot_type: str) -> tuple[str, ...]:
        return {
            "noun": self.nouns,
            "adjective": self.adjectives,
            "relation": self.relations,
        }[slot_type]

    @property
    def all_words(self) -> tuple[str, ...]:
        return self.nouns + self.adjectives + self.relations

    @classmethod
    def builtin(cls, stops: StopWordList | None = None) -> Vocabulary:
        """Pools drawn from the built-in lexicons, minus stop words.

        Stop words are excluded because they are shown in the mask and can
        never be blanks; a bot guessing them would only generate noise.
        """
        lex = Lexicons.builtin()
        stops = stops or StopWordList.builtin()
        return cls(
            nouns=tuple(sorted(w for w in lex.nouns if w not in stops)),
            adjectives=tuple(sorted(w for w in lex.adjectives if w not in stops)),
            relations=tuple(sorted(w for w in lex.relation_words if w not in stops)),
        )


@dataclass(frozen=True)
class LeaderBotModel:
    """Sentence-composition behaviour.

    ``fidelity`` is the probability that each content slot is filled from the
    image's tags instead of the distractor vocabulary. A tuple means one value
    is sampled per round, which lets one cohort mix describer quality levels.
    """

    fidelity: float | tuple[float, ...]
    templates: tuple[str, ...] = DEFAULT_TEMPLATES
    rng_seed: int | str = 0

    def __post_init__(self):
        for f in self.fidelity_choices():
            if not 0.0 <= f <= 1.0:
                raise GameError("INVALID_MODEL", f"fidelity {f} outside [0, 1]")
        if not self.templates:
            raise GameError("INVALID_MODEL", "no templates")
        for tpl in self.templates:
            slots = _SLOT_RE.findall(tpl)
            unknown = [s for s in slots if s not in SLOT_TYPES]
            if unknown:
                raise GameError("INVALID_MODEL",
                                f"unknown slot {unknown[0]!r} in {tpl!r}")
            if len(slots) < 2:
                raise GameError("INVALID_MODEL",
                                f"template needs >= 2 content slots: {tpl!r}")

    def fidelity_choices(self) -> tuple[float, ...]:
        if isinstance(self.fidelity, tuple):
            return self.fidelity
        return (self.fidelity,)


@dataclass(frozen=True)
class GuesserBotModel:
    """Guessing behaviour: draw source mix and pacing."""

    ability: float
    guess_interval_ms: float = 2000.0
    rng_seed: int | str = 0

    def __post_init__(self):
        if not 0.0 <= self.ability <= 1.0:
            raise GameError("INVALID_MODEL",
                            f"ability {self.ability} outside [0, 1]")
        if self.guess_interval_ms <= 0:
            raise GameError("INVALID_MODEL", "guess_interval_ms must be > 0")


def _typed_tag_pools(image: CorpusImage, lex: Lexicons,
                     stops: StopWordList) -> dict[str, list[str]]:
    pools: dict[str, list[str]] = {"noun": [], "adjective": [], "relation": []}
    kind_to_slot = {"NOUN": "noun", "ADJECTIVE": "adjective",
                    "RELATION": "relation"}
    for tag in image.tags or ():
        norm = normalize_or_none(tag)
        if norm is None or norm in stops:
            continue
        kind = lex.classify(norm)
        if kind in kind_to_slot:
            pools[kind_to_slot[kind]].append(norm)
    return pools


class LeaderBot:
    """Fills sentence templates for whichever player currently leads."""

    def __init__(self, model: LeaderBotModel, vocab: Vocabulary,
                 stops: StopWordList, rng: Random):
        self.model = model
        self.vocab = vocab
        self.stops = stops
        self.rng = rng
        self._lex = Lexicons.builtin()

    def compose(self, image: CorpusImage) -> str:
        fidelity = self.rng.choice(self.model.fidelity_choices())
        template = self.rng.choice(self.model.templates)
        true_pools = _typed_tag_pools(image, self._lex, self.stops)
        used: set[str] = set()
        words: list[str] = []
        for slot in _SLOT_RE.findall(template):
            on_image = true_pools[slot]
            if on_image and self.rng.random() < fidelity:
                pool: list[str] | tuple[str, ...] = on_image
            else:
                pool = self.vocab.pool(slot)
            fresh = [w for w in pool if w not in used]
            word = self.rng.choice(fresh or list(pool))
            used.add(word)
            words.append(word)
        it = iter(words)
        return _SLOT_RE.sub(lambda _: next(it), template)


class GuesserBot:
    """Guesses from wire frames only: mask, reveals, and the image id."""

    def __init__(self, player_id: str, model: GuesserBotModel,
                 vocab: Vocabulary, tags_by_image: dict[str, tuple[str, ...]],
                 cooccur: dict[tuple[str, str], int], rng: Random):
        self.player_id = player_id
        self.model = model
        self.vocab = vocab
        self.tags_by_image = tags_by_image
        self.cooccur = cooccur
        self.rng = rng
        self._round_id: str | None = None
        self._candidates: list[str] = []
        self._revealed: list[str] = []
        self._banned: set[str] = set()

    def on_frame(self, frame_type: str, payload: dict) -> None:
        if frame_type == "STATE" and payload.get("phase") == "GUESSING":
            round_id = payload.get("roundId")
            if round_id != self._round_id:
                self._begin_round(round_id, payload.get("imageId", ""))
        elif frame_type == "REVEAL":
            norm = normalize_or_none(payload.get("word", ""))
            if norm:
                self._revealed.append(norm)
                self._banned.add(norm)
        elif frame_type == "ROUND_END":
            self._round_id = None

    def _begin_round(self, round_id: str | None, image_id: str) -> None:
        self._round_id = round_id
        # Seeing the image is modelled as knowing its tag vocabulary.
        tags = self.tags_by_image.get(image_id, ())
        seen: set[str] = set()
        self._candidates = []
        for tag in tags:
            norm = normalize_or_none(tag)
            if norm and norm not in seen:
                seen.add(norm)
                self._candidates.append(norm)
        self._revealed = []
        self._banned = set()

    def next_gap_sec(self) -> float:
        return self.rng.expovariate(1000.0 / self.model.guess_interval_ms)

    def pick_guess(self) -> str:
        if self.rng.random() < self.model.ability:
            pool = [c for c in self._candidates if c not in self._banned]
            if pool:
                weights = [1.0 + sum(self.cooccur.get((r, c), 0)
                                     for r in self._revealed)
                           for c in pool]
                word = self.rng.choices(pool, weights=weights)[0]
                self._banned.add(word)
                return word
        words = self.vocab.all_words
        for _ in range(10):
            word = words[self.rng.randrange(len(words))]
            if word not in self._banned:
                break
        self._banned.add(word)
        return word


def cooccurrence_counts(corpus: list[CorpusImage]) -> dict[tuple[str, str], int]:
    """How often two tag norms appear on the same image, over the corpus."""
    counts: dict[tuple[str, str], int] = {}
    for image in corpus:
        norms = sorted({n for t in (image.tags or ())
                        if (n := normalize_or_none(t))})
        for i, a in enumerate(norms):
            for b in norms[i + 1:]:
                counts[(a, b)] = counts.get((a, b), 0) + 1
                counts[(b, a)] = counts.get((b, a), 0) + 1
    return counts
