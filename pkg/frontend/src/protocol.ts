// Wire protocol mirror. Every frame in both directions is one JSON object
// {"type", "seq", "payload"}; seq is per-connection and strictly increasing
// in each direction, so a reconnect starts both counters over.

export const SERVER_TYPES = [
  "STATE",
  "REVEAL",
  "ROUND_END",
  "SCORE",
  "ERROR",
  "CHAT",
] as const;

export type ServerType = (typeof SERVER_TYPES)[number];

export interface Frame {
  type: ServerType;
  seq: number;
  payload: Record<string, unknown>;
}

export type MaskStatus = "hidden" | "stop" | "revealed";

export interface MaskEntry {
  len: number;
  status: MaskStatus;
  text?: string;
}

export interface ScoreRow {
  playerId: string;
  displayName: string;
  score: number;
  connected: boolean;
}

/** A structurally bad inbound frame. The reducer turns this into an error
 *  banner; the connection itself stays up. */
export class FrameError extends Error {}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

export function parseServerFrame(raw: string): Frame {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch (err) {
    throw new FrameError(`not JSON: ${(err as Error).message}`);
  }
  if (!isRecord(data)) {
    throw new FrameError("frame must be a JSON object");
  }
  const type = data.type;
  if (typeof type !== "string" || !(SERVER_TYPES as readonly string[]).includes(type)) {
    throw new FrameError(`unknown server type ${JSON.stringify(type)}`);
  }
  const seq = data.seq;
  if (typeof seq !== "number" || !Number.isInteger(seq) || seq < 1) {
    throw new FrameError("seq must be a positive integer");
  }
  const payload = data.payload ?? {};
  if (!isRecord(payload)) {
    throw new FrameError("payload must be an object");
  }
  return { type: type as ServerType, seq, payload };
}

export function encodeClientFrame(
  type: string,
  seq: number,
  payload: Record<string, unknown>,
): string {
  return JSON.stringify({ type, seq, payload });
}

const MASK_STATUSES: readonly string[] = ["hidden", "stop", "revealed"];

/** Narrow a STATE payload's mask. Hidden entries never carry text; that is
 *  enforced server-side, so the client simply has nothing to leak. */
export function maskEntries(value: unknown): MaskEntry[] {
  if (!Array.isArray(value)) {
    throw new FrameError("mask must be an array");
  }
  return value.map((entry, i) => {
    if (
      !isRecord(entry) ||
      typeof entry.len !== "number" ||
      typeof entry.status !== "string" ||
      !MASK_STATUSES.includes(entry.status)
    ) {
      throw new FrameError(`mask entry ${i} is malformed`);
    }
    const out: MaskEntry = {
      len: entry.len,
      status: entry.status as MaskStatus,
    };
    if (typeof entry.text === "string") {
      out.text = entry.text;
    }
    return out;
  });
}

export function scoreRows(value: unknown): ScoreRow[] {
  if (!Array.isArray(value)) {
    throw new FrameError("scores must be an array");
  }
  return value.map((row, i) => {
    if (
      !isRecord(row) ||
      typeof row.playerId !== "string" ||
      typeof row.displayName !== "string" ||
      typeof row.score !== "number"
    ) {
      throw new FrameError(`score row ${i} is malformed`);
    }
    return {
      playerId: row.playerId,
      displayName: row.displayName,
      score: row.score,
      connected: row.connected !== false,
    };
  });
}
