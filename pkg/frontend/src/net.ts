// One logical game session across any number of physical sockets.
//
// The socket factory is injectable so tests drive fake sockets; the real
// client passes the browser WebSocket. After the first join ack the caller
// feeds the session token back in via setResume, and every reconnect then
// reattaches with it instead of joining fresh.

import { encodeClientFrame } from "./protocol";

export interface WebSocketLike {
  send(data: string): void;
  close(): void;
  addEventListener(
    type: "open" | "message" | "close" | "error",
    listener: (ev: { data?: unknown }) => void,
  ): void;
}

export type SocketFactory = (url: string) => WebSocketLike;
export type NetStatus = "idle" | "connecting" | "open" | "reconnecting";

interface Hello {
  type: "JOIN" | "CREATE_ROOM";
  payload: Record<string, unknown>;
}

export interface GameSocketOptions {
  url: string;
  onFrame: (raw: string, wallMs: number) => void;
  onStatus?: (status: NetStatus) => void;
  factory?: SocketFactory;
  now?: () => number;
  schedule?: (fn: () => void, ms: number) => void;
  reconnectDelayMs?: number;
}

export class GameSocket {
  private ws: WebSocketLike | null = null;
  private seq = 0;
  private queue: Array<{ type: string; payload: Record<string, unknown> }> = [];
  private hello: Hello | null = null;
  private resume: { roomId: string; token: string } | null = null;
  private status: NetStatus = "idle";
  private closedByUser = false;

  private readonly factory: SocketFactory;
  private readonly now: () => number;
  private readonly schedule: (fn: () => void, ms: number) => void;
  private readonly reconnectDelayMs: number;

  constructor(private readonly opts: GameSocketOptions) {
    this.factory = opts.factory ?? ((url) => new WebSocket(url) as WebSocketLike);
    this.now = opts.now ?? (() => Date.now());
    this.schedule = opts.schedule ?? ((fn, ms) => setTimeout(fn, ms));
    this.reconnectDelayMs = opts.reconnectDelayMs ?? 1000;
  }

  joinRoom(roomId: string, displayName: string): void {
    this.hello = {
      type: "JOIN",
      payload: { roomId, displayName, protocolVersion: 1 },
    };
    this.open();
  }

  createRoom(displayName: string, config?: Record<string, unknown>): void {
    const payload: Record<string, unknown> = { displayName, protocolVersion: 1 };
    if (config) payload.config = config;
    this.hello = { type: "CREATE_ROOM", payload };
    this.open();
  }

  /** Remember the ack's token; reconnects reattach instead of rejoining. */
  setResume(roomId: string, token: string): void {
    this.resume = { roomId, token };
  }

  /** Send a frame, or queue it if the socket is down; the queue flushes
   *  right after the next (re)join handshake. */
  send(type: string, payload: Record<string, unknown>): void {
    if (this.status !== "open" || this.ws === null) {
      this.queue.push({ type, payload });
      return;
    }
    this.raw(type, payload);
  }

  close(): void {
    this.closedByUser = true;
    this.setStatus("idle");
    this.ws?.close();
    this.ws = null;
  }

  private raw(type: string, payload: Record<string, unknown>): void {
    this.seq += 1;
    this.ws!.send(encodeClientFrame(type, this.seq, payload));
  }

  private open(): void {
    if (this.hello === null) return;
    this.setStatus(this.status === "idle" ? "connecting" : this.status);
    const ws = this.factory(this.opts.url);
    this.ws = ws;
    ws.addEventListener("open", () => {
      if (this.ws !== ws) return; // superseded before it opened
      this.seq = 0;
      const hello: Hello = this.resume
        ? {
            type: "JOIN",
            payload: {
              roomId: this.resume.roomId,
              token: this.resume.token,
              protocolVersion: 1,
            },
          }
        : this.hello!;
      this.raw(hello.type, hello.payload);
      this.setStatus("open");
      const pending = this.queue.splice(0);
      for (const msg of pending) this.raw(msg.type, msg.payload);
    });
    ws.addEventListener("message", (ev) => {
      if (this.ws !== ws) return;
      this.opts.onFrame(String(ev.data), this.now());
    });
    ws.addEventListener("close", () => {
      if (this.ws !== ws) return;
      this.ws = null;
      if (this.closedByUser) return;
      this.setStatus("reconnecting");
      this.schedule(() => {
        if (!this.closedByUser && this.ws === null) this.open();
      }, this.reconnectDelayMs);
    });
  }

  private setStatus(status: NetStatus): void {
    if (status === this.status) return;
    this.status = status;
    this.opts.onStatus?.(status);
  }
}
