"""Append-only round persistence and dataset export.

One finished round is one JSON line. A line is acknowledged only after it
has been flushed and fsynced, so an acknowledged round survives a process
kill. Failed appends go to an in-memory retry queue and are reported to
the operator log instead of being dropped.
"""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Iterator
from pathlib import Path

from .errors import GameError
from .records import RoundRecord

log = logging.getLogger("capguess.store")


class RoundStore:
    """Durable append-only JSONL store of finished rounds."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._fh = None
        self._pending: list[RoundRecord] = []

    # -- writing ----------------------------------------------------------

    def _ensure_open(self):
        if self._fh is None or self._fh.closed:
            self._fh = open(self.path, "a", encoding="utf-8")
        return self._fh

    def append(self, record: RoundRecord) -> None:
        """Write one record; returns only after the bytes are on disk."""
        line = json.dumps(record.to_dict()) + "\n"
        try:
            fh = self._ensure_open()
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())
        except OSError as exc:
            self._drop_handle()
            raise GameError("STORAGE_FAILURE", f"{self.path}: {exc}") from exc

    def append_or_queue(self, record: RoundRecord) -> bool:
        """Append, or queue the record for retry when the store is down.

        Returns True when the record is durable now. The caller is free to
        carry on either way (a failed write must not stall a game), but a
        False return means durability is deferred until retry_pending().
        """
        try:
            self.append(record)
            return True
        except GameError as exc:
            self._pending.append(record)
            log.error("round %s not persisted (%s); %d queued for retry",
                      record.round_id, exc, len(self._pending))
            return False

    def retry_pending(self) -> int:
        """Re-attempt queued appends in order; returns how many landed."""
        flushed = 0
        while self._pending:
            self.append(self._pending[0])  # raises if still failing
            self._pending.pop(0)
            flushed += 1
        return flushed

    @property
    def pending_count(self) -> int:
        return len(self._pending)

    def close(self) -> None:
        self._drop_handle()

    def _drop_handle(self) -> None:
        if self._fh is not None:
            try:
                self._fh.close()
            except OSError:
                pass
            self._fh = None

    # -- reading ----------------------------------------------------------

    def read_all(self) -> list[RoundRecord]:
        """Parse every stored round; missing file reads as empty."""
        if not self.path.exists():
            return []
        records = []
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    records.append(RoundRecord.from_dict(json.loads(line)))
                except (json.JSONDecodeError, KeyError, ValueError) as exc:
                    raise GameError(
                        "PARSE_ERROR", f"{self.path}:{lineno}: {exc}"
                    ) from exc
        return records

    def __iter__(self) -> Iterator[RoundRecord]:
        return iter(self.read_all())

    def __len__(self) -> int:
        return len(self.read_all())


def export_lines(store: RoundStore, verified_only: bool = False) -> Iterator[str]:
    """Dataset view of the store, one JSON line per round.

    Emits {"imageId", "sentence", "blanksRemaining", "srVerified",
    "endedAt"}. Key order and formatting are fixed, so the same store
    always exports byte-identical output.
    """
    for record in store.read_all():
        if verified_only and not record.play_verified:
            continue
        yield json.dumps({
            "imageId": record.image_id,
            "sentence": record.raw_sentence,
            "blanksRemaining": record.blanks_remaining,
            "srVerified": record.play_verified,
            "endedAt": record.ended_at,
        })


def export_text(store: RoundStore, verified_only: bool = False) -> str:
    """The full export as one string; empty store exports as empty."""
    lines = list(export_lines(store, verified_only))
    return "\n".join(lines) + "\n" if lines else ""
