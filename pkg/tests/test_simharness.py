"""Bot cohort, trend report, Spearman, sweep, and simrace CLI tests."""

from __future__ import annotations

import json
import math
import os

import pytest

from capguess.corpus import CorpusImage, load_corpus
from capguess.engine import GameConfig
from capguess.errors import GameError
from capguess.server.cli import default_corpus_path
from capguess.simharness.bots import (
    GuesserBotModel,
    LeaderBotModel,
    Vocabulary,
)
from capguess.simharness.experiment import (
    LabeledRound,
    _LeakCheck,
    blanks_accuracy_trend,
    run_cohort,
    sweep,
)
from capguess.simharness import cli as simcli
from oracles import brute_spearman

TEST_CORPUS = [
    CorpusImage("img-1", "img-1.png", ("horse", "field", "brown", "ride")),
    CorpusImage("img-2", "img-2.png", ("dog", "ball", "red", "chase")),
    CorpusImage("img-3", "img-3.png", ("cat", "couch", "gray", "sit")),
]

# Words that appear in no TEST_CORPUS tag set, one pool per slot type.
DISJOINT_VOCAB = Vocabulary(
    nouns=("bridge", "market", "window"),
    adjectives=("yellow", "white"),
    relations=("under", "over"),
)


def make_labeled(blanks: int, accurate: bool) -> LabeledRound:
    return LabeledRound(blanks=blanks, accurate=accurate)


# --------------------------------------------------------------------------
# Trend report
# --------------------------------------------------------------------------

def test_trend_separable_labels():
    # Strictly decreasing bucket fractions: ranks perfectly reversed.
    labeled = (
        [make_labeled(0, True)] * 40
        + [make_labeled(1, True)] * 20 + [make_labeled(1, False)] * 20
        + [make_labeled(2, False)] * 40
    )
    report = blanks_accuracy_trend(labeled)
    assert report["spearmanRho"] == -1.0
    assert [b["accurateFraction"] for b in report["buckets"]] == [1.0, 0.5, 0.0]

    # Binary labels (blanks 0 accurate, else not) tie the nonzero buckets,
    # so average ranks put rho at -sqrt(3)/2 rather than -1.
    binary = (
        [make_labeled(0, True)] * 40
        + [make_labeled(1, False)] * 40
        + [make_labeled(2, False)] * 40
    )
    rho = blanks_accuracy_trend(binary)["spearmanRho"]
    assert abs(rho + math.sqrt(3) / 2) < 1e-12
    assert abs(rho - brute_spearman([0, 1, 2], [1.0, 0.0, 0.0])) < 1e-12


def test_trend_insufficient_spread():
    with pytest.raises(GameError) as err:
        blanks_accuracy_trend([make_labeled(i % 3, True) for i in range(99)])
    assert err.value.code == "INSUFFICIENT_SPREAD"

    with pytest.raises(GameError) as err:
        blanks_accuracy_trend([make_labeled(1, True)] * 120)
    assert err.value.code == "INSUFFICIENT_SPREAD"

    with pytest.raises(GameError) as err:
        blanks_accuracy_trend([make_labeled(i % 2, True) for i in range(120)])
    assert err.value.code == "INSUFFICIENT_SPREAD"

    # Identical accuracy in every bucket has no rank ordering to report.
    with pytest.raises(GameError) as err:
        blanks_accuracy_trend([make_labeled(i % 3, True) for i in range(120)])
    assert err.value.code == "CONSTANT_INPUT"


def test_trend_report_shape():
    labeled = ([make_labeled(0, True)] * 50 + [make_labeled(2, False)] * 30
               + [make_labeled(5, True)] * 20)
    report = blanks_accuracy_trend(labeled, config_echo={"rounds": 100},
                                   seed=17)
    assert report["roundsSimulated"] == 100
    assert sum(b["count"] for b in report["buckets"]) == 100
    assert [b["blanks"] for b in report["buckets"]] == [0, 2, 5]
    assert report["config"] == {"rounds": 100}
    assert report["seed"] == 17
    assert -1.0 <= report["spearmanRho"] <= 1.0


# --------------------------------------------------------------------------
# Cohorts
# --------------------------------------------------------------------------

def test_cohort_determinism_byte_identical_reports():
    def one_report() -> str:
        labeled = run_cohort(
            TEST_CORPUS, 120, LeaderBotModel(fidelity=(0.2, 0.6, 1.0)),
            [GuesserBotModel(ability=0.8)] * 2, seed=11)
        report = blanks_accuracy_trend(labeled, seed=11)
        return json.dumps(report, sort_keys=True)

    first, second = one_report(), one_report()
    assert first == second


def test_cohort_matches_golden_run():
    with open(os.path.join(os.path.dirname(__file__), "golden",
                           "cohort_f100_a090.json")) as fh:
        golden = json.load(fh)
    corpus = load_corpus(default_corpus_path())
    labeled = run_cohort(
        corpus, golden["rounds"],
        LeaderBotModel(fidelity=golden["fidelity"]),
        [GuesserBotModel(ability=golden["ability"],
                         guess_interval_ms=golden["guessIntervalMs"])] * 2,
        seed=golden["seed"])
    verified = sum(1 for lr in labeled if lr.record.play_verified)
    assert verified / len(labeled) >= 0.80
    assert verified / len(labeled) == golden["verifiedFraction"]
    hist: dict[str, int] = {}
    for lr in labeled:
        hist[str(lr.blanks)] = hist.get(str(lr.blanks), 0) + 1
    assert hist == golden["blanksHistogram"]
    import hashlib
    sentences = "\n".join(lr.record.raw_sentence for lr in labeled)
    assert hashlib.sha256(sentences.encode()).hexdigest() == \
        golden["sentencesSha256"]


def test_zero_ability_leaves_every_blank():
    config = GameConfig(round_duration_sec=10)
    labeled = run_cohort(
        TEST_CORPUS, 20, LeaderBotModel(fidelity=1.0),
        [GuesserBotModel(ability=0.0, guess_interval_ms=500.0)] * 2,
        config=config, seed=5, vocab=DISJOINT_VOCAB)
    assert len(labeled) == 20
    for lr in labeled:
        assert lr.record.blanks_remaining == lr.record.content_norm_count
        assert lr.record.play_verified is False
        # fidelity 1.0 composes entirely from tags, so the sentence still
        # describes the image even though nobody could verify it
        assert lr.accurate is True


def test_mixed_fidelity_trend_is_strongly_negative():
    corpus = load_corpus(default_corpus_path())
    labeled = run_cohort(
        corpus, 2000, LeaderBotModel(fidelity=(0.2, 0.6, 1.0)),
        [GuesserBotModel(ability=0.8)] * 2, seed=2026)
    report = blanks_accuracy_trend(labeled, seed=2026)
    assert report["roundsSimulated"] == 2000
    assert report["spearmanRho"] <= -0.8


def test_cohort_corpus_guards():
    untagged = [CorpusImage("u-1", "u-1.png"), CorpusImage("u-2", "u-2.png")]
    with pytest.raises(GameError) as err:
        run_cohort(untagged, 5, LeaderBotModel(fidelity=0.5),
                   [GuesserBotModel(ability=0.5)] * 2)
    assert err.value.code == "CORPUS_WITHOUT_TAGS"

    mixed = untagged + TEST_CORPUS
    labeled = run_cohort(mixed, 8, LeaderBotModel(fidelity=0.5),
                         [GuesserBotModel(ability=0.5)] * 2, seed=3)
    tagged_ids = {img.image_id for img in TEST_CORPUS}
    assert {lr.record.image_id for lr in labeled} <= tagged_ids


def test_model_validation():
    with pytest.raises(GameError) as err:
        LeaderBotModel(fidelity=1.2)
    assert err.value.code == "INVALID_MODEL"
    with pytest.raises(GameError):
        LeaderBotModel(fidelity=(0.5, -0.1))
    with pytest.raises(GameError) as err:
        LeaderBotModel(fidelity=0.5, templates=("The {noun}",))
    assert "slots" in str(err.value)
    with pytest.raises(GameError) as err:
        LeaderBotModel(fidelity=0.5, templates=("A {verb} {noun}",))
    assert "unknown slot" in str(err.value)
    with pytest.raises(GameError):
        GuesserBotModel(ability=-0.1)
    with pytest.raises(GameError):
        GuesserBotModel(ability=0.5, guess_interval_ms=0.0)
    with pytest.raises(GameError) as err:
        Vocabulary(nouns=(), adjectives=("x",), relations=("y",))
    assert err.value.code == "INVALID_MODEL"
    with pytest.raises(GameError) as err:
        run_cohort(TEST_CORPUS, 5, LeaderBotModel(fidelity=0.5),
                   [GuesserBotModel(ability=0.5)])
    assert err.value.code == "INVALID_MODEL"


def test_leak_checker_detects_a_planted_leak():
    check = _LeakCheck()
    check.start_round({"horse", "brown"})
    with pytest.raises(AssertionError):
        check.scan("STATE", {"note": "a brown saddle"})
    check.scan("CHAT", {"text": "maybe a horse"})  # player channel: excluded
    with pytest.raises(AssertionError):
        check.scan("CHAT", {"outcome": "horse"})
    check.observe("REVEAL", {"word": "horse"})
    check.scan("SCORE", {"word": "horse"})
    check.observe("ROUND_END", {})
    check.scan("STATE", {"note": "brown"})


# --------------------------------------------------------------------------
# Sweeps
# --------------------------------------------------------------------------

def test_sweep_single_cell_and_guards():
    table = sweep(TEST_CORPUS, {"fidelity": [0.9]}, rounds_per_cell=10,
                  seed=1)
    assert len(table["cells"]) == 1
    row = table["cells"][0]
    assert row["fidelity"] == 0.9
    assert row["ability"] == 0.7  # default fills the unswept axis
    assert row["roundDurationSec"] == 60
    assert row["rounds"] == 10
    assert 0.0 <= row["verifiedFraction"] <= 1.0
    assert row["meanBlanks"] >= 0.0

    with pytest.raises(GameError) as err:
        sweep(TEST_CORPUS, {"bogus": [1]})
    assert err.value.code == "INVALID_CONFIG"
    with pytest.raises(GameError) as err:
        sweep(TEST_CORPUS, {})
    assert err.value.code == "INVALID_CONFIG"


def _mean_verified_over_seeds(grid: dict, base_config: GameConfig | None,
                              seeds=(1, 2, 3)) -> list[float]:
    corpus = load_corpus(default_corpus_path())
    per_cell: list[list[float]] = []
    for seed in seeds:
        table = sweep(corpus, grid, rounds_per_cell=500, seed=seed,
                      base_config=base_config)
        fractions = [c["verifiedFraction"] for c in table["cells"]]
        per_cell.append(fractions)
    n_cells = len(per_cell[0])
    return [sum(run[i] for run in per_cell) / len(per_cell)
            for i in range(n_cells)]


def test_sweep_verified_fraction_monotone_in_ability():
    means = _mean_verified_over_seeds(
        {"ability": [0.1, 0.4, 0.7, 1.0]},
        GameConfig(round_duration_sec=20))
    for lo, hi in zip(means, means[1:]):
        assert hi >= lo - 0.02, means


def test_sweep_verified_fraction_monotone_in_duration():
    means = _mean_verified_over_seeds(
        {"roundDurationSec": [10, 25, 45, 90], "ability": [0.5]}, None)
    for lo, hi in zip(means, means[1:]):
        assert hi >= lo - 0.02, means


# --------------------------------------------------------------------------
# CLI
# --------------------------------------------------------------------------

def test_cli_run_writes_deterministic_report(tmp_path, capsys):
    out_a = tmp_path / "a.json"
    out_b = tmp_path / "b.json"
    argv = ["run", "--rounds", "150", "--fidelity", "0.5",
            "--ability", "0.8", "--seed", "3"]
    assert simcli.main(argv + ["--out", str(out_a)]) == 0
    assert simcli.main(argv + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    report = json.loads(out_a.read_text())
    assert report["roundsSimulated"] == 150
    assert report["config"]["fidelity"] == 0.5
    assert sum(b["count"] for b in report["buckets"]) == 150
    assert -1.0 <= report["spearmanRho"] <= 1.0


def test_cli_sweep_inline_grid(tmp_path):
    out = tmp_path / "table.json"
    code = simcli.main(["sweep", "--grid", '{"fidelity": [0.3, 0.9]}',
                        "--rounds", "30", "--seed", "2", "--out", str(out)])
    assert code == 0
    table = json.loads(out.read_text())
    assert len(table["cells"]) == 2
    assert [c["fidelity"] for c in table["cells"]] == [0.3, 0.9]


def test_cli_reports_insufficient_spread(capsys):
    # Perfect describers and guessers leave zero blanks every round: a
    # single bucket cannot support a trend.
    code = simcli.main(["run", "--rounds", "120", "--fidelity", "1.0",
                        "--ability", "1.0", "--seed", "1"])
    assert code == 2
    assert "INSUFFICIENT_SPREAD" in capsys.readouterr().err
