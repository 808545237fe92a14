"""Verification analytics over the bundled reference dataset.

Rounds that end with zero blanks are "play-verified": the game itself
vouches for the sentence. To check how much that self-signal is worth, each
sentence also gets independent yes/no votes from an external panel, and the
report buckets rounds by how many blanks were left when time ran out. The
trend to look for: the fewer blanks, the larger the share of sentences the
panel accepts. A separately collected caption set serves as a comparison row.

The bundled fixture reconstructs a published deployment's bucket sizes, so
the percentages printed here track that deployment's numbers.

Run: python demos/03_verification_report.py
"""

from capguess.verify import agreement_stats, build_blanks_report, reference_fixture


def main():
    records, votes, comparison = reference_fixture()
    print(f"fixture: {len(records)} rounds, "
          f"{len(comparison)} comparison captions\n")

    report = build_blanks_report(records, votes, comparison)
    print(report.to_text())

    stats = agreement_stats(records, votes)
    print("agreement with the external panel:")
    print(f"  panel accepts {stats.pct_majority_given_play_verified}% "
          f"of play-verified sentences")
    print(f"  panel accepts {stats.pct_majority_given_not_play_verified}% "
          f"of unverified sentences")


if __name__ == "__main__":
    main()
