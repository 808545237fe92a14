"""simrace: run bot cohorts and parameter sweeps from the command line."""

from __future__ import annotations

import argparse
import json
import sys

from capguess.corpus import load_corpus
from capguess.errors import GameError
from capguess.server.cli import default_corpus_path
from capguess.simharness.bots import GuesserBotModel, LeaderBotModel
from capguess.simharness.experiment import (
    blanks_accuracy_trend,
    run_cohort,
    sweep,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simrace",
        description="Simulate caption-game cohorts with bot players.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one cohort -> experiment report")
    run.add_argument("--corpus", default=None,
                     help="corpus JSON (default: bundled sample corpus)")
    run.add_argument("--rounds", type=int, default=200)
    run.add_argument("--fidelity", type=float, default=0.8,
                     help="leader tag-word probability in [0,1]")
    run.add_argument("--ability", type=float, default=0.7,
                     help="guesser tag-draw probability in [0,1]")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None,
                     help="write the report here (default: stdout)")

    sw = sub.add_parser("sweep", help="grid of cohorts -> results table")
    sw.add_argument("--grid", required=True,
                    help="JSON object (inline or a file path) with any of "
                         "the axes fidelity, ability, roundDurationSec")
    sw.add_argument("--corpus", default=None)
    sw.add_argument("--rounds", type=int, default=200,
                    help="rounds per grid cell")
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--out", default=None)
    return parser


def _load_grid(arg: str) -> dict:
    text = arg
    if not arg.lstrip().startswith("{"):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    try:
        grid = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError("PARSE_ERROR", f"grid: {exc}") from None
    if not isinstance(grid, dict):
        raise GameError("PARSE_ERROR", "grid must be a JSON object")
    return grid


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        corpus = load_corpus(args.corpus or default_corpus_path())
        if args.command == "run":
            labeled = run_cohort(
                corpus, args.rounds,
                LeaderBotModel(fidelity=args.fidelity),
                [GuesserBotModel(ability=args.ability)] * 2,
                seed=args.seed)
            report = blanks_accuracy_trend(
                labeled,
                config_echo={
                    "rounds": args.rounds,
                    "fidelity": args.fidelity,
                    "ability": args.ability,
                    "players": 3,
                },
                seed=args.seed)
            _emit(report, args.out)
        else:
            table = sweep(corpus, _load_grid(args.grid),
                          rounds_per_cell=args.rounds, seed=args.seed)
            _emit(table, args.out)
    except GameError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
