// Entry point: a small lobby to create or join a session, then the live
// game screen driven by view refreshes and the event stream.

import { ArenaApi } from "./api.js";
import { EventStream } from "./events.js";
import { renderActions, renderBoard, renderTranscript } from "./render.js";
import { SessionStore } from "./store.js";

const api = new ArenaApi("");

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderGame(store: SessionStore, root: HTMLElement): void {
  root.textContent = "";
  if (store.banner) {
    const banner = el("div", "banner error", store.banner);
    const retry = el("button", "retry", "retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void store.refresh());
    banner.append(retry);
    root.append(banner);
  }
  if (store.staleNotice) {
    root.append(
      el(
        "div",
        "banner stale",
        "the game moved on before your action arrived; pick again from the fresh list"
      )
    );
  }
  const view = store.view;
  if (!view) {
    root.append(el("div", "loading", "loading…"));
    return;
  }
  const header = el("div", "header");
  header.append(el("h2", undefined, `${view.game} — seat ${view.seat}`));
  header.append(
    el(
      "span",
      "status",
      view.status === "finished"
        ? `finished, score ${view.score}`
        : view.your_turn
          ? "your turn"
          : "waiting"
    )
  );
  root.append(header);
  root.append(renderBoard(view));
  root.append(
    renderActions(view, (index) => void store.submit(index), store.submitting)
  );
  root.append(renderTranscript(view));
}

async function startGame(session: string, seat: number): Promise<void> {
  const root = document.getElementById("app")!;
  const store = new SessionStore(api, session, seat);
  store.subscribe(() => renderGame(store, root));
  await store.refresh();
  const stream = new EventStream(
    session,
    (event) => void store.handleEvent(event),
    () => void store.refresh(),
    store.view?.cursor ?? 0
  );
  stream.connect();
  window.addEventListener("beforeunload", () => stream.close());
}

function lobby(): void {
  const root = document.getElementById("app")!;
  root.textContent = "";
  root.append(el("h2", undefined, "coord-arena: play with an agent"));
  const form = el("form", "lobby") as HTMLFormElement;
  form.innerHTML = `
    <label>game
      <select name="game">
        <option value="hanabi">hanabi</option>
        <option value="kitchen">kitchen</option>
        <option value="capture">capture</option>
        <option value="escape">escape</option>
      </select>
    </label>
    <label>layout / map <input name="layout" placeholder="(default)"></label>
    <label>seed <input name="seed" type="number" value="0"></label>
    <label>partner
      <select name="partner">
        <option value="scripted:rule-hanabi">rule-hanabi</option>
        <option value="scripted:oracle-hanabi">oracle-hanabi</option>
        <option value="scripted:greedy-kitchen">greedy-kitchen</option>
        <option value="scripted:greedy-pursuit">greedy-pursuit</option>
        <option value="scripted:random-legal">random-legal</option>
      </select>
    </label>
    <button type="submit">start game</button>
  `;
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    void (async () => {
      try {
        const session = await api.createSession({
          game: String(data.get("game")),
          layout: String(data.get("layout") || "") || undefined,
          seed: Number(data.get("seed") ?? 0),
          seats: [
            { kind: "human" },
            { kind: "agent", spec: String(data.get("partner")) },
          ],
        });
        const url = new URL(window.location.href);
        url.searchParams.set("session", session);
        url.searchParams.set("seat", "0");
        window.history.replaceState(null, "", url.toString());
        await startGame(session, 0);
      } catch (error) {
        root.prepend(
          el("div", "banner error", `could not create session: ${(error as Error).message}`)
        );
      }
    })();
  });
  root.append(form);
}

const params = new URLSearchParams(window.location.search);
const session = params.get("session");
if (session) {
  void startGame(session, Number(params.get("seat") ?? "0"));
} else {
  lobby();
}
