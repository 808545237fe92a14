"""Server command line.

Example:
    capguess-server --port 8080 --corpus corpus.json --store rounds.jsonl
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from ..corpus import load_corpus
from ..engine import GameConfig
from ..errors import GameError
from ..lexic import StopWordList
from ..store import RoundStore
from .app import create_app
from .rooms import RoomManager


def default_corpus_path() -> str:
    return str(resources.files("capguess").joinpath("data/sample_corpus.json"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capguess-server",
        description="Run the caption game server.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--corpus", default=None,
                        help="image corpus JSON (default: bundled sample)")
    parser.add_argument("--store", default="rounds.jsonl",
                        help="append-only round store path")
    parser.add_argument("--round-seconds", type=float, default=60.0)
    parser.add_argument("--sentence-seconds", type=float, default=45.0)
    parser.add_argument("--points-per-word", type=int, default=10)
    parser.add_argument("--stopwords", default=None,
                        help="stop word list path (default: bundled list)")
    parser.add_argument("--min-players", type=int, default=3)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        corpus_path = args.corpus or default_corpus_path()
        images = load_corpus(corpus_path)
        stops = (StopWordList.from_file(args.stopwords)
                 if args.stopwords else StopWordList.builtin())
        config = GameConfig(
            min_players=args.min_players,
            round_duration_sec=args.round_seconds,
            points_per_word=args.points_per_word,
            sentence_timeout_sec=args.sentence_seconds,
        )
        manager = RoomManager(images, RoundStore(args.store),
                              defaults=config, stops=stops)
        app = create_app(manager, corpus_dir=Path(corpus_path).parent)
    except GameError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2

    import uvicorn

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
