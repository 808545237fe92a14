"""capguess: a multiplayer caption-guessing game and its analysis toolkit.

One player (the leader) writes a sentence describing an image; the other
players race to uncover its content words hangman-style. A sentence whose
every content word gets guessed is considered verified through play. The
package bundles the game engine, a WebSocket server, verification and
sentence-quality analytics, and a bot harness for running experiments
without humans.

Layering, lowest first:

    lexic       word normalization, stop/content tokenization, matching
    stats       t distribution, Welch's t-test, Spearman rank correlation
    engine      per-room game state machine (pure, clock-injected)
    records     finalized round records
    verify      play-verification vs. external majority votes (report tables)
    quality     rule-based object/attribute/relationship counts per sentence
    corpus      image corpus loading
    store       append-only durable round store + dataset export
    server      FastAPI front door: rooms, wire protocol, persistence
    simharness  bot players, Monte Carlo experiments, `simrace` CLI
"""

__version__ = "0.1.0"
