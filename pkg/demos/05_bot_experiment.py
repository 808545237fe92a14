"""Monte Carlo: do fewer blanks really mean better captions?

Bot cohorts play thousands of rounds against the bundled corpus on a
virtual clock. The leader bot's fidelity (chance a content word actually
describes the image) is resampled per round from three levels, so the run
mixes good and bad describers. Bucketing the finished rounds by how many
blanks were left and correlating bucket blanks with the share of accurate
sentences should come out strongly negative: rounds that end with fewer
blanks carry captions that match the image more often.

Everything is seeded; rerunning prints identical numbers.

Run: python demos/05_bot_experiment.py
"""

import json

from capguess.corpus import load_corpus
from capguess.server.cli import default_corpus_path
from capguess.simharness.bots import GuesserBotModel, LeaderBotModel
from capguess.simharness.experiment import blanks_accuracy_trend, run_cohort


def main():
    corpus = load_corpus(default_corpus_path())
    print(f"corpus: {len(corpus)} tagged images")

    labeled = run_cohort(
        corpus,
        n_rounds=800,
        leader_model=LeaderBotModel(fidelity=(0.2, 0.6, 1.0)),
        guesser_models=[GuesserBotModel(ability=0.8)] * 2,
        seed=2026,
    )
    verified = sum(1 for lr in labeled if lr.record.play_verified)
    print(f"played {len(labeled)} rounds, {verified} ended fully revealed")

    report = blanks_accuracy_trend(labeled, seed=2026,
                                   config_echo={"fidelity": [0.2, 0.6, 1.0],
                                                "ability": 0.8})
    print("\nblanks  rounds  accurate-fraction")
    for row in report["buckets"]:
        print(f"{row['blanks']:>6}  {row['count']:>6}  "
              f"{row['accurateFraction']:.3f}")
    print(f"\nSpearman rho (blanks vs accuracy): "
          f"{report['spearmanRho']:.3f}")

    print("\nfull report as JSON:")
    print(json.dumps(report, indent=2, sort_keys=True)[:400] + " ...")


if __name__ == "__main__":
    main()
