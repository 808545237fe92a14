import { describe, expect, it } from "vitest";

import { GameSocket, NetStatus, WebSocketLike } from "../src/net";

class FakeSocket implements WebSocketLike {
  sent: string[] = [];
  closed = false;
  private listeners = new Map<string, Array<(ev: { data?: unknown }) => void>>();

  constructor(public url: string) {}

  send(data: string): void {
    this.sent.push(data);
  }

  close(): void {
    this.closed = true;
  }

  addEventListener(type: string, listener: (ev: { data?: unknown }) => void): void {
    const list = this.listeners.get(type) ?? [];
    list.push(listener);
    this.listeners.set(type, list);
  }

  fire(type: string, ev: { data?: unknown } = {}): void {
    for (const fn of this.listeners.get(type) ?? []) fn(ev);
  }

  frames(): Array<{ type: string; seq: number; payload: Record<string, unknown> }> {
    return this.sent.map((s) => JSON.parse(s));
  }
}

interface Rig {
  socket: GameSocket;
  sockets: FakeSocket[];
  statuses: NetStatus[];
  frames: string[];
  timers: Array<() => void>;
}

function rig(): Rig {
  const sockets: FakeSocket[] = [];
  const statuses: NetStatus[] = [];
  const frames: string[] = [];
  const timers: Array<() => void> = [];
  const socket = new GameSocket({
    url: "ws://test/ws",
    factory: (url) => {
      const s = new FakeSocket(url);
      sockets.push(s);
      return s;
    },
    now: () => 42,
    schedule: (fn) => {
      timers.push(fn);
    },
    onFrame: (raw) => {
      frames.push(raw);
    },
    onStatus: (s) => {
      statuses.push(s);
    },
  });
  return { socket, sockets, statuses, frames, timers };
}

describe("handshake", () => {
  it("sends CREATE_ROOM with seq 1 and a protocol version once open", () => {
    const r = rig();
    r.socket.createRoom("ada");
    expect(r.sockets).toHaveLength(1);
    expect(r.sockets[0].sent).toHaveLength(0); // nothing before open
    r.sockets[0].fire("open");
    expect(r.sockets[0].frames()).toEqual([
      {
        type: "CREATE_ROOM",
        seq: 1,
        payload: { displayName: "ada", protocolVersion: 1 },
      },
    ]);
    expect(r.statuses).toEqual(["connecting", "open"]);
  });

  it("sends JOIN with the room id", () => {
    const r = rig();
    r.socket.joinRoom("ROOM42", "bo");
    r.sockets[0].fire("open");
    const [join] = r.sockets[0].frames();
    expect(join.type).toBe("JOIN");
    expect(join.payload).toEqual({
      roomId: "ROOM42",
      displayName: "bo",
      protocolVersion: 1,
    });
  });
});

describe("send queue", () => {
  it("queues frames while down and flushes them after the handshake", () => {
    const r = rig();
    r.socket.createRoom("ada");
    r.socket.send("START", {});
    r.socket.send("GUESS", { text: "fox" });
    expect(r.sockets[0].sent).toHaveLength(0);
    r.sockets[0].fire("open");
    const types = r.sockets[0].frames().map((f) => [f.type, f.seq]);
    expect(types).toEqual([
      ["CREATE_ROOM", 1],
      ["START", 2],
      ["GUESS", 3],
    ]);
  });
});

describe("reconnect", () => {
  it("reattaches with the token and restarts seq at 1", () => {
    const r = rig();
    r.socket.createRoom("ada");
    r.sockets[0].fire("open");
    r.socket.setResume("ROOM42", "tok123");
    r.socket.send("GUESS", { text: "early" });
    expect(r.sockets[0].frames().at(-1)?.seq).toBe(2);

    r.sockets[0].fire("close");
    expect(r.statuses.at(-1)).toBe("reconnecting");
    r.socket.send("GUESS", { text: "while down" }); // queued

    expect(r.timers).toHaveLength(1);
    r.timers[0](); // the scheduled reconnect
    expect(r.sockets).toHaveLength(2);
    r.sockets[1].fire("open");

    const frames = r.sockets[1].frames();
    expect(frames[0]).toEqual({
      type: "JOIN",
      seq: 1,
      payload: { roomId: "ROOM42", token: "tok123", protocolVersion: 1 },
    });
    expect(frames[1]).toEqual({ type: "GUESS", seq: 2, payload: { text: "while down" } });
    expect(r.statuses.at(-1)).toBe("open");
  });

  it("does not reconnect after a user close", () => {
    const r = rig();
    r.socket.createRoom("ada");
    r.sockets[0].fire("open");
    r.socket.close();
    expect(r.sockets[0].closed).toBe(true);
    r.sockets[0].fire("close");
    expect(r.timers).toHaveLength(0);
    expect(r.statuses.at(-1)).toBe("idle");
  });
});

describe("inbound", () => {
  it("hands raw frames to onFrame with the injected clock", () => {
    const r = rig();
    r.socket.createRoom("ada");
    r.sockets[0].fire("open");
    r.sockets[0].fire("message", { data: '{"type":"SCORE","seq":1,"payload":{}}' });
    expect(r.frames).toEqual(['{"type":"SCORE","seq":1,"payload":{}}']);
  });

  it("ignores events from a superseded socket", () => {
    const r = rig();
    r.socket.createRoom("ada");
    r.sockets[0].fire("open");
    const old = r.sockets[0];
    old.fire("close");
    r.timers[0]();
    r.sockets[1].fire("open");
    old.fire("message", { data: "stale" });
    expect(r.frames).toHaveLength(0);
  });
});
