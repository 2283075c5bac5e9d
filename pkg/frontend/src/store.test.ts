import { describe, expect, it, vi } from "vitest";

import { ArenaApi, StaleActionError } from "./api.js";
import { hanabiView } from "./fixtures.js";
import { SessionStore } from "./store.js";
import type { View } from "./types.js";

function storeWith(api: Partial<ArenaApi>): SessionStore {
  return new SessionStore(api as ArenaApi, "abc123", 0);
}

describe("session store", () => {
  it("refresh pulls the seat view and notifies subscribers", async () => {
    const view = hanabiView();
    const store = storeWith({ getView: vi.fn().mockResolvedValue(view) });
    const seen: (View | null)[] = [];
    store.subscribe((s) => seen.push(s.view));
    await store.refresh();
    expect(store.view).toEqual(view);
    expect(seen.at(-1)).toEqual(view);
    expect(store.banner).toBeNull();
  });

  it("network failure sets the banner instead of throwing", async () => {
    const store = storeWith({
      getView: vi.fn().mockRejectedValue(new Error("connection refused")),
    });
    await store.refresh();
    expect(store.banner).toContain("connection refused");
  });

  it("submit posts the current state_version then refreshes", async () => {
    const before = hanabiView();
    const after = hanabiView({ state_version: 6, your_turn: false });
    const submitAction = vi.fn().mockResolvedValue({
      version: 1,
      ack: "Play my Card 0",
      state_version: 5,
      events: [],
    });
    const getView = vi
      .fn()
      .mockResolvedValueOnce(before)
      .mockResolvedValue(after);
    const store = storeWith({ getView, submitAction });
    await store.refresh();
    await store.submit(1);
    expect(submitAction).toHaveBeenCalledWith("abc123", 0, 1, 4);
    expect(store.view?.state_version).toBe(6);
    expect(store.staleNotice).toBe(false);
    expect(store.submitting).toBe(false);
  });

  it("a stale submit refreshes and raises the pick-again notice, no resubmit", async () => {
    const submitAction = vi
      .fn()
      .mockRejectedValue(new StaleActionError(409, "StaleAction"));
    const getView = vi.fn().mockResolvedValue(hanabiView({ state_version: 9 }));
    const store = storeWith({ getView, submitAction });
    await store.refresh();
    await store.submit(0);
    expect(store.staleNotice).toBe(true);
    expect(store.view?.state_version).toBe(9);
    expect(submitAction).toHaveBeenCalledTimes(1);
  });

  it("other submit failures surface as a retryable banner", async () => {
    const submitAction = vi.fn().mockRejectedValue(new Error("boom"));
    const getView = vi.fn().mockResolvedValue(hanabiView());
    const store = storeWith({ getView, submitAction });
    await store.refresh();
    await store.submit(0);
    expect(store.banner).toContain("boom");
  });

  it("action and finished events trigger a refetch; others do not", async () => {
    const getView = vi.fn().mockResolvedValue(hanabiView());
    const store = storeWith({ getView });
    await store.handleEvent({ seq: 0, version: 1, type: "created" });
    expect(getView).not.toHaveBeenCalled();
    await store.handleEvent({ seq: 1, version: 1, type: "action" });
    await store.handleEvent({ seq: 2, version: 1, type: "finished" });
    expect(getView).toHaveBeenCalledTimes(2);
  });

  it("waitingOnPartner reflects a live view that is not ours to move", async () => {
    const getView = vi
      .fn()
      .mockResolvedValue(hanabiView({ your_turn: false, turn_seat: 1 }));
    const store = storeWith({ getView });
    await store.refresh();
    expect(store.waitingOnPartner).toBe(true);
  });
});
