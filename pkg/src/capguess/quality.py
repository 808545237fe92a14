"""Sentence quality measurement.

Quality here means extractable information: how many distinct objects a
caption mentions, how many attributes modify them, and how many pairwise
relationships link them. The extractor is a transparent lexicon plus
positional patterns — deterministic, dependency-free, auditable — rather
than a statistical parser, and a hand-annotated fixture pins its behavior.

Classification of a word: exact lexicon hit first (nouns, adjectives,
relation words), then ordered suffix heuristics, otherwise unknown and
never counted. Counting rules:

  objects        distinct content norms classified noun
  attributes     adjective tokens immediately preceding a noun over the
                 content-token sequence; a skipped stop word may sit
                 between them unless it is "of" ("a room full of toys"
                 must not yield full->toys)
  relationships  relation-word tokens (stop or content — spatial
                 prepositions are stop words) with at least one noun
                 mention before and one after, capped at
                 objects x (objects - 1), and zero when objects < 2

Corpus-level averages and Welch's t-test compare two caption sources in
the layout of the published quality table; the published means appear in
REFERENCE_MEANS as display-only constants since the corpora behind them
were never released.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
import json

from .errors import GameError
from .lexic import CONTENT, StopWordList, Token, normalize, tokenize
from .stats import TTestResult, welch_t_test

NOUN = "NOUN"
ADJECTIVE = "ADJECTIVE"
RELATION = "RELATION"

# Published reference means from the original human deployment, in
# (objects, relationships, attributes) order. Display-only: the raw
# corpora were never published, so these are not recomputable here.
REFERENCE_MEANS = {
    "amt": {"n": 200, "means": (2.30, 1.02, 1.17)},
    "game": {"n": 49, "means": (2.98, 1.88, 1.45)},
}

_MIN_WORDS = {"nouns": 200, "adjectives": 80, "relations": 40}


# --------------------------------------------------------------------------
# Lexicons
# --------------------------------------------------------------------------

def _parse_word_file(text: str, source: str) -> frozenset[str]:
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(normalize(line))
    if not words:
        raise GameError("EMPTY_LEXICON", f"no words found in {source}")
    return frozenset(words)


@dataclass(frozen=True)
class Lexicons:
    """Three disjoint role vocabularies plus fixed suffix heuristics."""

    nouns: frozenset[str]
    adjectives: frozenset[str]
    relation_words: frozenset[str]

    def __post_init__(self):
        overlaps = (
            (self.nouns & self.adjectives)
            | (self.nouns & self.relation_words)
            | (self.adjectives & self.relation_words)
        )
        if overlaps:
            sample = ", ".join(sorted(overlaps)[:5])
            raise GameError("LEXICON_OVERLAP", f"words in multiple roles: {sample}")

    @classmethod
    def builtin(cls) -> Lexicons:
        if _BUILTIN_LEXICONS:
            return _BUILTIN_LEXICONS[0]
        data = resources.files("capguess").joinpath("data")
        lex = cls.from_texts(
            data.joinpath("nouns.txt").read_text("utf-8"),
            data.joinpath("adjectives.txt").read_text("utf-8"),
            data.joinpath("relations.txt").read_text("utf-8"),
            source="builtin",
        )
        _BUILTIN_LEXICONS.append(lex)
        return lex

    @classmethod
    def from_files(cls, nouns_path: str, adjectives_path: str,
                   relations_path: str) -> Lexicons:
        texts = []
        for path in (nouns_path, adjectives_path, relations_path):
            with open(path, encoding="utf-8") as fh:
                texts.append(fh.read())
        return cls.from_texts(*texts, source=nouns_path)

    @classmethod
    def from_texts(cls, nouns_text: str, adjectives_text: str,
                   relations_text: str, source: str = "<memory>") -> Lexicons:
        nouns = _parse_word_file(nouns_text, f"{source}:nouns")
        adjectives = _parse_word_file(adjectives_text, f"{source}:adjectives")
        relations = _parse_word_file(relations_text, f"{source}:relations")
        for name, words in (("nouns", nouns), ("adjectives", adjectives),
                            ("relations", relations)):
            if len(words) < _MIN_WORDS[name]:
                raise GameError(
                    "LEXICON_TOO_SMALL",
                    f"{name} needs >= {_MIN_WORDS[name]} words, got {len(words)}",
                )
        return cls(nouns=nouns, adjectives=adjectives, relation_words=relations)

    def classify(self, norm: str) -> str | None:
        """Role of a normalized word, or None when nothing applies."""
        if norm in self.nouns:
            return NOUN
        if norm in self.adjectives:
            return ADJECTIVE
        if norm in self.relation_words:
            return RELATION
        # Suffix heuristics, in order. Plural of a known noun first, then
        # inflections of known relation verbs, then bare verb-ish endings,
        # then adjective-forming suffixes.
        stems = []
        if norm.endswith("es"):
            stems.append(norm[:-2])
        if norm.endswith("s"):
            stems.append(norm[:-1])
        if any(stem in self.nouns for stem in stems):
            return NOUN
        if any(stem in self.relation_words for stem in stems):
            return RELATION
        if norm.endswith("ing") and len(norm) >= 5:
            return RELATION
        if norm.endswith("ed") and len(norm) >= 4:
            return RELATION
        if norm.endswith(("ful", "ous", "ish", "less")):
            return ADJECTIVE
        return None


_BUILTIN_LEXICONS: list[Lexicons] = []


# --------------------------------------------------------------------------
# Extraction
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QualityCounts:
    objects: int
    attributes: int
    relationships: int
    mentions: tuple[tuple[str, str], ...]  # (norm, role) audit trail

    def triple(self) -> tuple[int, int, int]:
        return (self.objects, self.attributes, self.relationships)


def extract_counts(sentence: str, lex: Lexicons,
                   stops: StopWordList | None = None) -> QualityCounts:
    """Count objects, attributes, and relationships in one sentence."""
    stops = stops or StopWordList.builtin()
    tokens = tokenize(sentence, stops)  # raises NO_CONTENT_WORDS
    roles = [lex.classify(t.norm) for t in tokens]

    object_norms = {
        t.norm
        for t, role in zip(tokens, roles)
        if t.kind == CONTENT and role == NOUN
    }
    objects = len(object_norms)

    content: list[tuple[Token, str | None]] = [
        (t, role) for t, role in zip(tokens, roles) if t.kind == CONTENT
    ]
    attributes = 0
    for (tok, role), (next_tok, next_role) in zip(content, content[1:]):
        if role != ADJECTIVE or next_role != NOUN:
            continue
        skipped = tokens[tok.position + 1 : next_tok.position]
        if any(s.norm == "of" for s in skipped):
            continue  # "X of Y" re-heads the phrase; not a direct attribute
        attributes += 1

    noun_positions = [
        t.position for t, role in zip(tokens, roles)
        if t.kind == CONTENT and role == NOUN
    ]
    relationships = 0
    if noun_positions:
        first_noun, last_noun = noun_positions[0], noun_positions[-1]
        for t, role in zip(tokens, roles):
            if role == RELATION and first_noun < t.position < last_noun:
                relationships += 1
    # A pairwise relationship needs two distinct object mentions.
    if objects < 2:
        relationships = 0
    else:
        relationships = min(relationships, objects * (objects - 1))

    mentions = tuple(
        (t.norm, role) for t, role in zip(tokens, roles) if role is not None
    )
    return QualityCounts(objects=objects, attributes=attributes,
                         relationships=relationships, mentions=mentions)


# --------------------------------------------------------------------------
# Corpus statistics
# --------------------------------------------------------------------------

def corpus_means(sentences: list[str], lex: Lexicons,
                 stops: StopWordList | None = None) -> tuple[float, float, float]:
    """(mean objects, mean relationships, mean attributes) over a corpus."""
    if not sentences:
        raise GameError("EMPTY_CORPUS", "no sentences to average")
    counts = [extract_counts(s, lex, stops) for s in sentences]
    n = len(counts)
    return (
        sum(c.objects for c in counts) / n,
        sum(c.relationships for c in counts) / n,
        sum(c.attributes for c in counts) / n,
    )


@dataclass(frozen=True)
class SourceComparison:
    """Welch tests per metric between two caption sources, in the
    (objects, relationships, attributes) order of the published table."""

    objects: TTestResult
    relationships: TTestResult
    attributes: TTestResult
    label_a: str
    label_b: str

    def to_dict(self) -> dict:
        return {
            "labelA": self.label_a,
            "labelB": self.label_b,
            "objects": self.objects.to_dict(),
            "relationships": self.relationships.to_dict(),
            "attributes": self.attributes.to_dict(),
        }

    def to_text(self) -> str:
        """Aligned table: one row per source, one metric per column."""
        header = f"{'Source':<18} {'Objects':>9} {'Relationships':>14} {'Attributes':>11}"
        row_a = (
            f"{self.label_a + f' (n={self.objects.n_a})':<18} "
            f"{self.objects.mean_a:>9.2f} {self.relationships.mean_a:>14.2f} "
            f"{self.attributes.mean_a:>11.2f}"
        )
        row_b = (
            f"{self.label_b + f' (n={self.objects.n_b})':<18} "
            f"{self.objects.mean_b:>9.2f} {self.relationships.mean_b:>14.2f} "
            f"{self.attributes.mean_b:>11.2f}"
        )
        row_p = (
            f"{'p-value':<18} {self.objects.p_value:>9.4g} "
            f"{self.relationships.p_value:>14.4g} {self.attributes.p_value:>11.4g}"
        )
        return "\n".join((header, row_a, row_b, row_p))


def compare_sources(corpus_a: list[str], corpus_b: list[str], lex: Lexicons,
                    stops: StopWordList | None = None,
                    label_a: str = "A", label_b: str = "B") -> SourceComparison:
    """Per-metric Welch tests over per-sentence counts of two corpora."""
    if len(corpus_a) < 2 or len(corpus_b) < 2:
        raise GameError("SAMPLE_TOO_SMALL", "need >= 2 sentences per corpus")
    counts_a = [extract_counts(s, lex, stops) for s in corpus_a]
    counts_b = [extract_counts(s, lex, stops) for s in corpus_b]

    def test(metric) -> TTestResult:
        return welch_t_test(
            [float(metric(c)) for c in counts_a],
            [float(metric(c)) for c in counts_b],
        )

    return SourceComparison(
        objects=test(lambda c: c.objects),
        relationships=test(lambda c: c.relationships),
        attributes=test(lambda c: c.attributes),
        label_a=label_a,
        label_b=label_b,
    )


# --------------------------------------------------------------------------
# Hand-annotated fixture
# --------------------------------------------------------------------------

def load_fixture() -> list[dict]:
    """The packaged 25-sentence fixture, annotated by hand before the
    extractor was written. Each entry:
    {"sentence": ..., "objects": k, "attributes": k, "relationships": k}."""
    text = resources.files("capguess").joinpath("data/quality_fixture.jsonl").read_text("utf-8")
    return [json.loads(line) for line in text.splitlines() if line.strip()]
