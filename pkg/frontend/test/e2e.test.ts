// @vitest-environment happy-dom
//
// Full-stack playthrough: a real server process, three headless protocol
// clients, and the browser client (reducer + DOM) completing one round.
// The Python test suite must pass without this directory existing; the
// coupling runs strictly one way, over the wire.

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { get } from "node:http";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import WebSocket from "ws";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GameSocket, WebSocketLike } from "../src/net";
import { Frame, encodeClientFrame, parseServerFrame } from "../src/protocol";
import {
  ClientState,
  connectionLost,
  connectionOpened,
  initialState,
  reduce,
  submitAction,
  viewOf,
} from "../src/reducer";
import { mountView } from "../src/view";

// vitest runs with cwd at frontend/, one level below the repository root
const repoRoot = resolve(process.cwd(), "..");

function sleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

async function until(
  cond: () => boolean,
  label: string,
  timeoutMs = 15_000,
): Promise<void> {
  const t0 = Date.now();
  while (!cond()) {
    if (Date.now() - t0 > timeoutMs) {
      throw new Error(`timed out waiting for ${label}`);
    }
    await sleep(25);
  }
}

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const srv = createServer();
    srv.listen(0, "127.0.0.1", () => {
      const addr = srv.address();
      if (addr && typeof addr === "object") {
        const port = addr.port;
        srv.close(() => resolve(port));
      } else {
        reject(new Error("could not allocate a port"));
      }
    });
  });
}

function healthz(port: number): Promise<boolean> {
  return new Promise((resolve) => {
    const req = get(
      { host: "127.0.0.1", port, path: "/healthz", timeout: 1000 },
      (res) => {
        res.resume();
        resolve(res.statusCode === 200);
      },
    );
    req.on("error", () => resolve(false));
    req.on("timeout", () => {
      req.destroy();
      resolve(false);
    });
  });
}

/** A protocol-only player: raw socket, own seq counter, frame log. */
class Headless {
  seq = 0;
  frames: Frame[] = [];

  private constructor(
    private ws: WebSocket,
    public name: string,
  ) {}

  static async connect(url: string, name: string): Promise<Headless> {
    const ws = new WebSocket(url);
    const client = new Headless(ws, name);
    ws.on("message", (data) => {
      client.frames.push(parseServerFrame(String(data)));
    });
    await new Promise<void>((resolve, reject) => {
      ws.once("open", () => resolve());
      ws.once("error", reject);
    });
    return client;
  }

  send(type: string, payload: Record<string, unknown>): void {
    this.seq += 1;
    this.ws.send(encodeClientFrame(type, this.seq, payload));
  }

  join(roomId: string): void {
    this.send("JOIN", { roomId, displayName: this.name, protocolVersion: 1 });
  }

  lastState(): Record<string, unknown> | null {
    for (let i = this.frames.length - 1; i >= 0; i--) {
      if (this.frames[i].type === "STATE") return this.frames[i].payload;
    }
    return null;
  }

  has(type: string, pred: (p: Record<string, unknown>) => boolean = () => true): boolean {
    return this.frames.some((f) => f.type === type && pred(f.payload));
  }

  close(): void {
    this.ws.close();
  }
}

/** The browser client, wired exactly like main.ts but with ws sockets. */
function browserClient(wsEndpoint: string, httpBase: string, root: HTMLElement) {
  let state: ClientState = initialState();
  const ui = mountView(root, (id) => `${httpBase}/images/${id}`);
  const paint = (): void => ui.render(viewOf(state, Date.now()));
  const socket = new GameSocket({
    url: wsEndpoint,
    factory: (u) => new WebSocket(u) as unknown as WebSocketLike,
    onFrame(raw, wallMs) {
      state = reduce(state, raw, wallMs);
      if (state.roomId && state.token) socket.setResume(state.roomId, state.token);
      paint();
    },
    onStatus(status) {
      if (status === "open") state = connectionOpened(state);
      else if (status === "reconnecting") state = connectionLost(state);
      paint();
    },
  });
  ui.onJoin((roomId, name) => {
    if (roomId) socket.joinRoom(roomId, name);
    else socket.createRoom(name);
  });
  ui.onStart(() => socket.send("START", {}));
  ui.onSubmit((box, text) => {
    const action = submitAction(viewOf(state, Date.now()), box, text);
    if (action) socket.send(action.type, action.payload);
  });
  return {
    socket,
    paint,
    get state() {
      return state;
    },
  };
}

let proc: ChildProcess;
let port: number;
let serverLog = "";

beforeAll(async () => {
  port = await freePort();
  const store = join(mkdtempSync(join(tmpdir(), "capguess-e2e-")), "rounds.jsonl");
  proc = spawn(
    "python3",
    [
      "-m",
      "capguess.server.cli",
      "--host",
      "127.0.0.1",
      "--port",
      String(port),
      "--store",
      store,
    ],
    {
      cwd: repoRoot,
      env: { ...process.env, PYTHONPATH: join(repoRoot, "src") },
      stdio: ["ignore", "pipe", "pipe"],
    },
  );
  proc.stdout?.on("data", (d) => (serverLog += d));
  proc.stderr?.on("data", (d) => (serverLog += d));

  const t0 = Date.now();
  while (!(await healthz(port))) {
    if (proc.exitCode !== null || Date.now() - t0 > 20_000) {
      throw new Error(`server did not come up:\n${serverLog}`);
    }
    await sleep(100);
  }
});

afterAll(() => {
  proc?.kill();
});

describe("end to end", () => {
  it("four players (three headless, one browser) complete a round", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const wsEndpoint = `ws://127.0.0.1:${port}/ws`;
    const b = browserClient(wsEndpoint, `http://127.0.0.1:${port}`, root);
    const q = <T extends HTMLElement>(id: string): T =>
      root.querySelector(`[data-id="${id}"]`) as T;

    // Join through the actual form: no room code means create one.
    b.paint();
    q<HTMLInputElement>("name").value = "host";
    q<HTMLButtonElement>("join").click();
    await until(() => b.state.roomId !== null, "room creation ack");
    const roomId = b.state.roomId!;

    const guessers: Headless[] = [];
    for (const name of ["gia", "hal", "ivy"]) {
      const g = await Headless.connect(wsEndpoint, name);
      g.join(roomId);
      guessers.push(g);
    }
    await until(() => b.state.scores.length === 4, "all four on the roster");

    guessers[0].send("START", {});
    await until(() => b.state.phase === "AWAITING_SENTENCE", "round start");
    b.paint();

    // First joiner leads the first round: that is the browser client.
    expect(b.state.leaderId).toBe(b.state.selfId);

    // Leader chat is visibly muted.
    const chatInput = q<HTMLInputElement>("chatinput");
    expect(chatInput.disabled).toBe(true);
    expect(chatInput.placeholder).toMatch(/muted/);

    // The main box is the sentence input, and submitting it starts guessing.
    expect(q<HTMLFormElement>("mainform").dataset.mode).toBe("sentence");
    q<HTMLInputElement>("maininput").value = "The quick fox jumps";
    q<HTMLFormElement>("mainform").dispatchEvent(new Event("submit"));
    await until(() => b.state.phase === "GUESSING", "sentence accepted");
    b.paint();

    // Masked sentence: stop word in place, blanks at per-character length.
    expect(q<HTMLDivElement>("mask").textContent).toBe("The _____ ___ _____");
    await until(
      () => guessers.every((g) => g.lastState()?.phase === "GUESSING"),
      "guessers see the mask",
    );
    for (const g of guessers) {
      const mask = g.lastState()!.mask as Array<{ len: number; status: string }>;
      expect(mask.map((e) => [e.len, e.status])).toEqual([
        [3, "stop"],
        [5, "hidden"],
        [3, "hidden"],
        [5, "hidden"],
      ]);
    }

    // One correct guess updates every client's view.
    guessers[0].send("GUESS", { text: "fox" });
    await until(
      () => b.state.mask.some((e) => e.status === "revealed"),
      "browser sees the reveal",
    );
    b.paint();
    expect(q<HTMLDivElement>("mask").textContent).toBe("The _____ fox _____");
    for (const g of guessers) {
      await until(
        () => g.has("REVEAL", (p) => p.word === "fox"),
        `${g.name} sees the reveal`,
      );
    }
    expect(
      b.state.feed.some(
        (f) => f.kind === "guess" && f.text === "fox" && f.outcome === "hit",
      ),
    ).toBe(true);

    // Uncover the rest; the round must close as fully revealed.
    guessers[1].send("GUESS", { text: "quick" });
    guessers[2].send("GUESS", { text: "jumps" });
    await until(() => b.state.lastRecord !== null, "round end at the browser");
    expect(b.state.lastRecord?.srVerified).toBe(true);
    expect(b.state.lastRecord?.blanksRemaining).toBe(0);
    for (const g of guessers) {
      await until(
        () => g.has("ROUND_END", (p) => p.reason === "ALL_REVEALED"),
        `${g.name} sees the round end`,
      );
    }

    // Scores moved and the board shows it.
    b.paint();
    const cells = Array.from(
      q<HTMLTableElement>("scores").querySelectorAll("td"),
    ).map((td) => td.textContent);
    expect(cells).toContain("host");
    expect(cells.some((c) => c !== null && Number(c) > 0)).toBe(true);

    guessers.forEach((g) => g.close());
    b.socket.close();
  });
});
