// DOM layer: renders a ClientView and forwards raw input upward. No game
// rules live here; whether an input is visible, enabled, or muted is
// decided entirely by the view's flags.

import { ClientView } from "./reducer";

export interface ViewHooks {
  render(view: ClientView): void;
  onJoin(fn: (roomId: string, name: string) => void): void;
  onStart(fn: () => void): void;
  onSubmit(fn: (box: "main" | "chat", text: string) => void): void;
}

export function mountView(
  root: HTMLElement,
  imageUrl: (imageId: string) => string,
): ViewHooks {
  root.innerHTML = `
    <div class="join" data-id="joinpanel">
      <input data-id="name" placeholder="your name" maxlength="32">
      <input data-id="room" placeholder="room code (blank = new room)" maxlength="12">
      <button data-id="join">play</button>
    </div>
    <div class="game" data-id="gamepanel" hidden>
      <div class="pane left">
        <div data-id="roomlabel" class="roomlabel"></div>
        <img data-id="image" alt="round image" hidden>
        <div data-id="mask" class="mask"></div>
        <div data-id="countdown" class="countdown"></div>
        <button data-id="start" hidden>start round</button>
      </div>
      <div class="pane right">
        <div data-id="banner" class="banner" hidden></div>
        <ul data-id="feed" class="feed"></ul>
        <form data-id="mainform" hidden>
          <input data-id="maininput" autocomplete="off">
          <button>send</button>
        </form>
        <form data-id="chatform">
          <input data-id="chatinput" autocomplete="off" placeholder="chat">
          <button>chat</button>
        </form>
        <table data-id="scores" class="scores"></table>
      </div>
    </div>
  `;

  const el = <T extends HTMLElement>(id: string): T =>
    root.querySelector(`[data-id="${id}"]`) as T;

  const joinPanel = el<HTMLDivElement>("joinpanel");
  const gamePanel = el<HTMLDivElement>("gamepanel");
  const nameInput = el<HTMLInputElement>("name");
  const roomInput = el<HTMLInputElement>("room");
  const joinButton = el<HTMLButtonElement>("join");
  const roomLabel = el<HTMLDivElement>("roomlabel");
  const image = el<HTMLImageElement>("image");
  const maskBox = el<HTMLDivElement>("mask");
  const countdownBox = el<HTMLDivElement>("countdown");
  const startButton = el<HTMLButtonElement>("start");
  const bannerBox = el<HTMLDivElement>("banner");
  const feedList = el<HTMLUListElement>("feed");
  const mainForm = el<HTMLFormElement>("mainform");
  const mainInput = el<HTMLInputElement>("maininput");
  const chatForm = el<HTMLFormElement>("chatform");
  const chatInput = el<HTMLInputElement>("chatinput");
  const scoresTable = el<HTMLTableElement>("scores");

  let joinFn: (roomId: string, name: string) => void = () => {};
  let startFn: () => void = () => {};
  let submitFn: (box: "main" | "chat", text: string) => void = () => {};

  joinButton.addEventListener("click", () => {
    const name = nameInput.value.trim();
    if (!name) {
      nameInput.focus();
      return;
    }
    joinFn(roomInput.value.trim(), name);
  });
  startButton.addEventListener("click", () => startFn());
  mainForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (mainInput.value.trim()) {
      submitFn("main", mainInput.value);
      mainInput.value = "";
    }
  });
  chatForm.addEventListener("submit", (ev) => {
    ev.preventDefault();
    if (chatInput.value.trim()) {
      submitFn("chat", chatInput.value);
      chatInput.value = "";
    }
  });

  function renderMask(view: ClientView): void {
    maskBox.textContent = "";
    view.maskTokens.forEach((entry, i) => {
      if (i > 0) maskBox.appendChild(document.createTextNode(" "));
      const span = document.createElement("span");
      span.className = entry.status;
      span.textContent =
        entry.status === "hidden" ? "_".repeat(entry.len) : (entry.text ?? "");
      maskBox.appendChild(span);
    });
  }

  function renderScores(view: ClientView): void {
    scoresTable.textContent = "";
    for (const row of view.scoreboard) {
      const tr = document.createElement("tr");
      if (row.playerId === view.leaderId) tr.classList.add("leader");
      if (!row.connected) tr.classList.add("away");
      if (row.playerId === view.selfId) tr.classList.add("self");
      const name = document.createElement("td");
      name.textContent = row.displayName;
      const score = document.createElement("td");
      score.textContent = String(row.score);
      tr.append(name, score);
      scoresTable.appendChild(tr);
    }
  }

  function renderFeed(view: ClientView): void {
    feedList.textContent = "";
    for (const item of view.feed) {
      const li = document.createElement("li");
      li.className = item.kind + (item.outcome ? ` ${item.outcome}` : "");
      li.textContent = item.displayName
        ? `${item.displayName}: ${item.text}`
        : item.text;
      feedList.appendChild(li);
    }
    feedList.scrollTop = feedList.scrollHeight;
  }

  function render(view: ClientView): void {
    const joined = view.selfId !== null;
    joinPanel.hidden = joined;
    gamePanel.hidden = !joined;
    if (!joined) return;

    roomLabel.textContent = view.roomId ? `room ${view.roomId}` : "";

    if (view.imageId) {
      const src = imageUrl(view.imageId);
      if (image.getAttribute("src") !== src) image.setAttribute("src", src);
      image.hidden = false;
    } else {
      image.hidden = true;
    }

    renderMask(view);
    countdownBox.textContent =
      view.countdownSec === null ? "" : `${Math.ceil(view.countdownSec)}s`;
    startButton.hidden = !view.canStart;

    const bannerText =
      view.banner ?? (!view.connected ? "connection lost, retrying..." : null);
    bannerBox.hidden = bannerText === null;
    bannerBox.textContent = bannerText ?? "";

    // One main input serves both roles, but never both at once: the
    // leader only ever sees it as the sentence box, a guesser only as
    // the guess box, and it is gone entirely otherwise.
    if (view.canSetSentence) {
      mainForm.hidden = false;
      mainForm.dataset.mode = "sentence";
      mainInput.placeholder = "describe the image in one sentence";
    } else if (view.canGuess) {
      mainForm.hidden = false;
      mainForm.dataset.mode = "guess";
      mainInput.placeholder = "guess a word";
    } else {
      mainForm.hidden = true;
      delete mainForm.dataset.mode;
    }

    chatInput.disabled = view.chatMuted || !view.connected;
    chatForm.classList.toggle("muted", view.chatMuted);
    chatInput.placeholder = view.chatMuted ? "muted during your round" : "chat";

    renderFeed(view);
    renderScores(view);
  }

  return {
    render,
    onJoin(fn) {
      joinFn = fn;
    },
    onStart(fn) {
      startFn = fn;
    },
    onSubmit(fn) {
      submitFn = fn;
    },
  };
}
