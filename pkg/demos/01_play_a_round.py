"""A complete round, driven through the room's command surface.

Three players join a room. One becomes the leader and writes a sentence
about the current image; the server turns it into a mask (stop words shown,
content words hidden) and the other two race to uncover the blanks. A hit
pays both the guesser and the leader, so the leader wants to be guessable
and the guessers want to guess. When nothing is hidden any more the round
counts as play-verified: enough independent people matched the sentence to
the image for it to be trusted as a caption.

Run: python demos/01_play_a_round.py
"""

from random import Random

from capguess.corpus import CorpusImage
from capguess.engine import GameConfig
from capguess.server.rooms import Room


class EchoStore:
    """Collects records instead of writing a file (see demo 02 for disk)."""

    def __init__(self):
        self.records = []

    def append_or_queue(self, record):
        self.records.append(record)
        return True


def show(tag, frames):
    for target, frame in frames:
        print(f"  {tag} -> {target}: {frame['type']} {frame['payload']}")


def main():
    images = [CorpusImage("horse-field", "svg/horse-field.svg",
                          ("horse", "field", "brown", "ride"))]
    store = EchoStore()
    room = Room("DEMO01", GameConfig(), images, store, rng=Random(7))

    print("== joining ==")
    players = {}
    for name in ("ada", "bo", "cy"):
        session, frames = room.join(name, now=0.0)
        players[name] = session.player_id
        print(f"{name} joined as {session.player_id}")

    seqs = dict.fromkeys(players.values(), 0)

    def send(name, msg_type, payload, now):
        pid = players[name]
        seqs[pid] += 1
        return room.handle(pid, msg_type, seqs[pid], payload, now)

    print("\n== starting a round ==")
    frames = send("ada", "START", {}, now=1.0)
    leader_id = frames[0][1]["payload"]["leaderId"]
    leader = next(n for n, pid in players.items() if pid == leader_id)
    print(f"leader this round: {leader}")

    print("\n== the leader writes a sentence ==")
    frames = send(leader, "SET_SENTENCE",
                  {"text": "A brown horse in the field"}, now=2.0)
    mask = frames[0][1]["payload"]["mask"]
    rendered = " ".join(
        m["text"] if m["status"] != "hidden" else "_" * m["len"]
        for m in mask)
    print(f"guessers see: {rendered}")

    print("\n== guessing ==")
    guessers = [n for n in players if n != leader]
    script = [(guessers[0], "horse"), (guessers[1], "green"),
              (guessers[1], "brown"), (guessers[0], "field")]
    for name, word in script:
        print(f"{name} guesses {word!r}:")
        show("   ", send(name, "GUESS", {"text": word}, now=3.0))

    record = store.records[0]
    print("\n== round record ==")
    print(f"verified: {record.play_verified}, "
          f"blanks left: {record.blanks_remaining}, "
          f"points: {record.per_player_points}")


if __name__ == "__main__":
    main()
