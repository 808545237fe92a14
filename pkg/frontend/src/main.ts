// Entry point: read config.json, open the socket, loop frames through the
// reducer, and repaint. The 250ms repaint keeps the countdown moving
// between frames.

import { GameSocket } from "./net";
import {
  connectionLost,
  connectionOpened,
  initialState,
  reduce,
  submitAction,
  viewOf,
} from "./reducer";
import { mountView } from "./view";

interface AppConfig {
  serverUrl: string;
}

export function wsUrl(serverUrl: string): string {
  const u = new URL(serverUrl);
  u.protocol = u.protocol === "https:" ? "wss:" : "ws:";
  u.pathname = "/ws";
  u.search = "";
  return u.toString();
}

export function imageUrl(serverUrl: string, imageId: string): string {
  return new URL(`/images/${encodeURIComponent(imageId)}`, serverUrl).toString();
}

async function boot(): Promise<void> {
  const response = await fetch("config.json");
  const config = (await response.json()) as AppConfig;
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app element");

  let state = initialState();
  const ui = mountView(root, (id) => imageUrl(config.serverUrl, id));
  const paint = (): void => ui.render(viewOf(state, Date.now()));

  const socket = new GameSocket({
    url: wsUrl(config.serverUrl),
    onFrame(raw, wallMs) {
      state = reduce(state, raw, wallMs);
      if (state.roomId && state.token) {
        socket.setResume(state.roomId, state.token);
      }
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

  setInterval(paint, 250);
  paint();
}

boot();
