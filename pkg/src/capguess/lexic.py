"""Text layer: word normalization, stop/content tokenization, guess matching.

Everything downstream (masking, guessing, analytics) compares words by the
normalized forms produced here, so the rules are deliberately small and
frozen: lowercase, strip edge punctuation, split on whitespace only. Word
equality is exact — no stemming or plural folding — which keeps guessing
predictable for players under time pressure.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .errors import GameError

# Stripped from both ends of a span. Internal occurrences survive, so
# "don't" and "well-lit" stay whole words.
EDGE_PUNCTUATION = ".,!?;:'\"()[]-"

STOP = "STOP"
CONTENT = "CONTENT"


# --------------------------------------------------------------------------
# Tokens
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Token:
    """One surviving span of a sentence.

    surface: the span as typed, punctuation intact.
    norm: the normalized form used for every comparison.
    position: index among surviving tokens, consecutive from 0.
    kind: STOP or CONTENT, by stop-list membership of the norm.
    """

    surface: str
    norm: str
    position: int
    kind: str


# --------------------------------------------------------------------------
# Stop words
# --------------------------------------------------------------------------

class StopWordList:
    """A set of normalized function words excluded from play."""

    _builtin: StopWordList | None = None

    def __init__(self, words: set[str], source: str):
        self.words = words
        self.source = source

    def __contains__(self, norm: str) -> bool:
        return norm in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def builtin(cls) -> StopWordList:
        """The packaged English list (~50 function words); loaded once."""
        if cls._builtin is None:
            text = resources.files("capguess").joinpath("data/stopwords.txt").read_text("utf-8")
            cls._builtin = cls(_parse_stop_lines(text, "builtin"), "builtin")
        return cls._builtin

    @classmethod
    def from_file(cls, path: str) -> StopWordList:
        """Load a UTF-8 list: one word per line, '#' comments, blanks ignored."""
        with open(path, encoding="utf-8") as fh:
            words = _parse_stop_lines(fh.read(), path)
        return cls(words, path)


def _parse_stop_lines(text: str, source: str) -> set[str]:
    words: set[str] = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        # Store normalized forms so membership checks against norms are exact.
        words.add(normalize(line))
    if not words:
        raise GameError("EMPTY_STOP_LIST", f"no stop words found in {source}")
    return words


# --------------------------------------------------------------------------
# Core operations
# --------------------------------------------------------------------------

def normalize(raw: str) -> str:
    """Lowercase `raw` and strip edge punctuation.

    Raises EMPTY_AFTER_NORMALIZATION when nothing remains (pure punctuation).
    """
    norm = raw.strip(EDGE_PUNCTUATION).lower()
    if not norm:
        raise GameError("EMPTY_AFTER_NORMALIZATION", f"nothing left of {raw!r}")
    return norm


def normalize_or_none(raw: str) -> str | None:
    """normalize(), but unparseable input yields None instead of raising."""
    try:
        return normalize(raw)
    except GameError:
        return None


def tokenize(sentence: str, stops: StopWordList) -> list[Token]:
    """Split on whitespace, drop pure-punctuation spans, classify each token.

    Positions are consecutive over surviving tokens. Raises NO_CONTENT_WORDS
    when no content token survives — such a sentence is unplayable.
    """
    tokens: list[Token] = []
    for span in sentence.split():
        norm = normalize_or_none(span)
        if norm is None:
            continue
        kind = STOP if norm in stops else CONTENT
        tokens.append(Token(surface=span, norm=norm, position=len(tokens), kind=kind))
    if not any(t.kind == CONTENT for t in tokens):
        raise GameError("NO_CONTENT_WORDS", f"no content words in {sentence!r}")
    return tokens


def matches(guess: str, token: Token) -> bool:
    """True iff the normalized guess equals the token's norm exactly.

    Unnormalizable guesses never match (callers that want to surface the
    condition use normalize_or_none and flag the attempt themselves).
    """
    norm = normalize_or_none(guess)
    return norm is not None and norm == token.norm
