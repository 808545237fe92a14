// All state transitions happen here, as a pure reducer over inbound
// frames. The DOM layer renders the projected ClientView and never touches
// game state, so every rule in this file is testable without a browser.

import {
  Frame,
  FrameError,
  MaskEntry,
  ScoreRow,
  maskEntries,
  parseServerFrame,
  scoreRows,
} from "./protocol";

export type Phase = "LOBBY" | "AWAITING_SENTENCE" | "GUESSING" | "ENDED";
export type Role = "LEADER" | "GUESSER" | "SPECTATOR";

const PHASES: readonly string[] = ["LOBBY", "AWAITING_SENTENCE", "GUESSING", "ENDED"];
const FEED_LIMIT = 200;

export interface FeedItem {
  kind: "chat" | "guess" | "system";
  displayName: string;
  text: string;
  outcome?: string;
}

export interface ClientState {
  lastSeq: number;
  connected: boolean;
  selfId: string | null;
  token: string | null;
  roomId: string | null;
  /** serverNowMs minus local wall clock, measured once at the join ack. */
  clockOffsetMs: number | null;
  phase: Phase;
  mask: MaskEntry[];
  deadlineMs: number | null;
  scores: ScoreRow[];
  imageId: string | null;
  leaderId: string | null;
  roundId: string | null;
  feed: FeedItem[];
  banner: string | null;
  lastRecord: Record<string, unknown> | null;
}

export function initialState(): ClientState {
  return {
    lastSeq: 0,
    connected: false,
    selfId: null,
    token: null,
    roomId: null,
    clockOffsetMs: null,
    phase: "LOBBY",
    mask: [],
    deadlineMs: null,
    scores: [],
    imageId: null,
    leaderId: null,
    roundId: null,
    feed: [],
    banner: null,
    lastRecord: null,
  };
}

/** The socket (re)opened: both seq directions start over on the server. */
export function connectionOpened(st: ClientState): ClientState {
  return { ...st, lastSeq: 0, connected: true, banner: null };
}

export function connectionLost(st: ClientState): ClientState {
  return { ...st, connected: false };
}

/** Fold one raw inbound frame into the state.
 *
 *  A malformed frame sets the error banner and changes nothing else; a
 *  stale seq returns the state unchanged. `wallMs` is the local receive
 *  time, used only to estimate the server clock offset at the join ack.
 */
export function reduce(st: ClientState, raw: string, wallMs: number): ClientState {
  let frame: Frame;
  try {
    frame = parseServerFrame(raw);
  } catch (err) {
    if (err instanceof FrameError) {
      return { ...st, banner: `bad frame: ${err.message}` };
    }
    throw err;
  }
  if (frame.seq <= st.lastSeq) {
    return st; // duplicate or out of order: the view must not move backwards
  }
  try {
    return apply({ ...st, lastSeq: frame.seq, banner: null }, frame, wallMs);
  } catch (err) {
    if (err instanceof FrameError) {
      return { ...st, lastSeq: frame.seq, banner: `bad frame: ${err.message}` };
    }
    throw err;
  }
}

function apply(next: ClientState, frame: Frame, wallMs: number): ClientState {
  const p = frame.payload;
  switch (frame.type) {
    case "STATE": {
      const phase = p.phase;
      if (typeof phase !== "string" || !PHASES.includes(phase)) {
        throw new FrameError(`unknown phase ${JSON.stringify(phase)}`);
      }
      next.phase = phase as Phase;
      next.mask = maskEntries(p.mask ?? []);
      next.deadlineMs = typeof p.deadlineMs === "number" ? p.deadlineMs : null;
      next.scores = sortScoreboard(scoreRows(p.scores ?? []));
      next.imageId = typeof p.imageId === "string" ? p.imageId : null;
      next.leaderId = typeof p.leaderId === "string" ? p.leaderId : null;
      next.roundId = typeof p.roundId === "string" ? p.roundId : null;
      if (typeof p.selfId === "string") {
        // Join or reattach ack: learn who we are and estimate the server
        // clock offset from this one frame's round trip.
        next.selfId = p.selfId;
        if (typeof p.token === "string") next.token = p.token;
        if (typeof p.roomId === "string") next.roomId = p.roomId;
        if (typeof p.serverNowMs === "number") {
          next.clockOffsetMs = p.serverNowMs - wallMs;
        }
      }
      return next;
    }
    case "REVEAL": {
      const positions = p.positions;
      const word = p.word;
      if (!Array.isArray(positions) || typeof word !== "string") {
        throw new FrameError("REVEAL needs positions and word");
      }
      const mask = next.mask.slice();
      for (const pos of positions) {
        if (typeof pos === "number" && pos >= 0 && pos < mask.length) {
          mask[pos] = { len: mask[pos].len, status: "revealed", text: word };
        }
      }
      next.mask = mask;
      return next;
    }
    case "SCORE": {
      next.scores = sortScoreboard(scoreRows(p.scores ?? []));
      return next;
    }
    case "CHAT": {
      const item: FeedItem = {
        kind: p.kind === "guess" ? "guess" : "chat",
        displayName: typeof p.displayName === "string" ? p.displayName : "?",
        text: typeof p.text === "string" ? p.text : "",
      };
      if (typeof p.outcome === "string") item.outcome = p.outcome;
      next.feed = pushFeed(next.feed, item);
      return next;
    }
    case "ROUND_END": {
      const record = p.record;
      next.lastRecord =
        typeof record === "object" && record !== null && !Array.isArray(record)
          ? (record as Record<string, unknown>)
          : null;
      const reason = typeof p.reason === "string" ? p.reason : "?";
      next.feed = pushFeed(next.feed, {
        kind: "system",
        displayName: "",
        text: p.aborted ? `round aborted (${reason})` : `round over (${reason})`,
      });
      return next;
    }
    case "ERROR": {
      const code = typeof p.code === "string" ? p.code : "ERROR";
      const message = typeof p.message === "string" ? p.message : "";
      next.banner = `${code}: ${message}`;
      return next;
    }
  }
}

function pushFeed(feed: FeedItem[], item: FeedItem): FeedItem[] {
  const out = feed.concat([item]);
  return out.length > FEED_LIMIT ? out.slice(-FEED_LIMIT) : out;
}

function sortScoreboard(rows: ScoreRow[]): ScoreRow[] {
  // Best score first. Array.prototype.sort is stable, and the server emits
  // ties in join order, so join order is what breaks them here too.
  return rows.slice().sort((a, b) => b.score - a.score);
}

// -- projection ---------------------------------------------------------------

export interface ClientView {
  phase: Phase;
  role: Role;
  maskTokens: MaskEntry[];
  maskText: string;
  /** Seconds until the current deadline; never negative; null without one. */
  countdownSec: number | null;
  scoreboard: ScoreRow[];
  feed: FeedItem[];
  banner: string | null;
  connected: boolean;
  selfId: string | null;
  roomId: string | null;
  imageId: string | null;
  leaderId: string | null;
  canStart: boolean;
  canGuess: boolean;
  canSetSentence: boolean;
  chatMuted: boolean;
  lastRecord: Record<string, unknown> | null;
}

export function roleOf(st: ClientState): Role {
  if (st.selfId === null) return "SPECTATOR";
  const roundActive = st.phase === "AWAITING_SENTENCE" || st.phase === "GUESSING";
  if (roundActive && st.selfId === st.leaderId) return "LEADER";
  if (st.scores.some((row) => row.playerId === st.selfId)) return "GUESSER";
  return "SPECTATOR";
}

export function maskText(mask: MaskEntry[]): string {
  return mask
    .map((e) => (e.status === "hidden" ? "_".repeat(e.len) : (e.text ?? "")))
    .join(" ");
}

export function countdownSec(st: ClientState, wallMs: number): number | null {
  if (st.deadlineMs === null || st.clockOffsetMs === null) return null;
  const serverNow = wallMs + st.clockOffsetMs;
  return Math.max(0, (st.deadlineMs - serverNow) / 1000);
}

export function viewOf(st: ClientState, wallMs: number): ClientView {
  const role = roleOf(st);
  const member = role !== "SPECTATOR";
  return {
    phase: st.phase,
    role,
    maskTokens: st.mask,
    maskText: maskText(st.mask),
    countdownSec: countdownSec(st, wallMs),
    scoreboard: st.scores,
    feed: st.feed,
    banner: st.banner,
    connected: st.connected,
    selfId: st.selfId,
    roomId: st.roomId,
    imageId: st.imageId,
    leaderId: st.leaderId,
    canStart: st.connected && member && (st.phase === "LOBBY" || st.phase === "ENDED"),
    canGuess: role === "GUESSER" && st.phase === "GUESSING",
    canSetSentence: role === "LEADER" && st.phase === "AWAITING_SENTENCE",
    chatMuted:
      role === "LEADER" &&
      (st.phase === "AWAITING_SENTENCE" || st.phase === "GUESSING"),
    lastRecord: st.lastRecord,
  };
}

// -- outbound -----------------------------------------------------------------

export interface OutboundAction {
  type: "SET_SENTENCE" | "GUESS" | "CHAT";
  payload: { text: string };
}

/** Map a text submission to a wire action, or null when it must not send.
 *
 *  The main box is the sentence input for the leader awaiting a sentence
 *  and the guess input for a guesser mid-round; anything else is inert.
 *  Chat is blocked locally for a muted leader (the server enforces it
 *  regardless). Blank input never sends.
 */
export function submitAction(
  view: ClientView,
  box: "main" | "chat",
  input: string,
): OutboundAction | null {
  const text = input.trim();
  if (!text) return null;
  if (box === "chat") {
    return view.chatMuted ? null : { type: "CHAT", payload: { text } };
  }
  if (view.canSetSentence) return { type: "SET_SENTENCE", payload: { text } };
  if (view.canGuess) return { type: "GUESS", payload: { text } };
  return null;
}
