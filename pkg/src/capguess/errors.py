"""Domain errors carrying stable machine-readable codes.

Codes travel across module boundaries — into ERROR wire frames, CLI exit
messages, and test assertions — so they are short SCREAMING_SNAKE strings
and never change once shipped.
"""

from __future__ import annotations


class GameError(Exception):
    """Any rule or contract violation surfaced to a caller.

    `code` is the stable identifier; the message is free-form context for
    humans and may change.
    """

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"GameError({self.code}: {self})"
