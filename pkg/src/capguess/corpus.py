"""Image corpus loading.

A corpus is a JSON array of `{"imageId", "locator", "tags": [..]?}`. Tags
are the image's ground-truth vocabulary; they are optional and only the
bot harness requires them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import GameError
from .lexic import normalize_or_none


@dataclass(frozen=True)
class CorpusImage:
    image_id: str
    locator: str
    tags: tuple[str, ...] | None = None


def load_corpus(path: str) -> list[CorpusImage]:
    """Parse and validate a corpus file.

    Raises PARSE_ERROR (with the line number for malformed JSON) and
    DUPLICATE_IMAGE_ID naming the offending id.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as err:
            raise GameError("PARSE_ERROR", f"{path}: line {err.lineno}: {err.msg}") from err
    if not isinstance(raw, list):
        raise GameError("PARSE_ERROR", f"{path}: expected a JSON array of images")

    images: list[CorpusImage] = []
    seen: set[str] = set()
    for i, entry in enumerate(raw):
        if not isinstance(entry, dict) or "imageId" not in entry or "locator" not in entry:
            raise GameError("PARSE_ERROR", f"{path}: entry {i}: need imageId and locator")
        image_id = str(entry["imageId"])
        locator = str(entry["locator"])
        if not locator:
            raise GameError("PARSE_ERROR", f"{path}: entry {i}: empty locator")
        if image_id in seen:
            raise GameError("DUPLICATE_IMAGE_ID", f"duplicate imageId {image_id!r}")
        seen.add(image_id)
        tags = None
        if entry.get("tags") is not None:
            # Tags are compared against normalized words everywhere, so
            # normalize on the way in; unnormalizable tags are dropped.
            norms = [normalize_or_none(str(t)) for t in entry["tags"]]
            tags = tuple(n for n in norms if n is not None)
        images.append(CorpusImage(image_id=image_id, locator=locator, tags=tags))
    return images
