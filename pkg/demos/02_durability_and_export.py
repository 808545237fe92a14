"""Round persistence: fsync-before-ack, crash recovery, and export.

Every finished round is flushed and fsynced to an append-only JSONL file
BEFORE the round-end acknowledgement goes out, so a process crash after the
ack can never lose an acknowledged round. This demo appends a couple of
rounds, simulates a restart by reopening the file cold, and prints the
export stream (one JSON object per line, byte-stable across reads).

Run: python demos/02_durability_and_export.py
"""

import tempfile
from pathlib import Path

from capguess.records import RoundRecord
from capguess.store import RoundStore, export_text


def make_record(i: int, verified: bool) -> RoundRecord:
    return RoundRecord(
        round_id=f"round-{i:06d}",
        image_id=f"img-{i}",
        raw_sentence="A plain example sentence",
        content_norm_count=2,
        blanks_remaining=0 if verified else 1,
        play_verified=verified,
        leader_id="p1",
        per_player_points={"p1": 10, "p2": 10} if verified else {},
        ended_at=100.0 + i,
    )


def main():
    path = Path(tempfile.mkdtemp()) / "rounds.jsonl"

    store = RoundStore(path)
    for i, verified in enumerate([True, False, True], start=1):
        store.append(make_record(i, verified))
    print(f"appended 3 rounds to {path}")

    # A "restart": a brand-new handle reads the same file.
    reopened = RoundStore(path)
    recovered = reopened.read_all()
    print(f"recovered {len(recovered)} rounds after reopen")

    print("\n== full export ==")
    print(export_text(reopened), end="")

    print("\n== verified-only export ==")
    print(export_text(reopened, verified_only=True), end="")

    again = export_text(RoundStore(path), verified_only=True)
    print(f"\nbyte-stable across handles: "
          f"{again == export_text(reopened, verified_only=True)}")


if __name__ == "__main__":
    main()
