import { describe, expect, it } from "vitest";

import { hanabiView } from "./fixtures.js";
import {
  chipIsCertain,
  chipText,
  renderActions,
  renderBoard,
  renderHanabi,
  renderKitchen,
  renderPursuit,
} from "./render.js";
import type { KitchenRender, PursuitRender } from "./types.js";

describe("hanabi board", () => {
  it("renders own cards as knowledge chips only, never literal cards", () => {
    const view = hanabiView();
    const board = renderHanabi(view.render as never);
    const own = board.querySelector(".own-hand")!;
    const chips = own.querySelectorAll(".chip");
    expect(chips.length).toBe(2);
    // the certain chip reads like "R2"; the fresh one lists everything
    expect(chips[0].textContent).toBe("R2");
    expect(chips[0].classList.contains("certain")).toBe(true);
    expect(chips[1].textContent).toBe("RYGWB12345");
    expect(chips[1].classList.contains("certain")).toBe(false);
    // no element in the own-hand section carries a literal color+rank card
    expect(own.querySelectorAll(".card").length).toBe(0);
  });

  it("shows the partner's literal cards with their knowledge as tooltip", () => {
    const board = renderHanabi(hanabiView().render as never);
    const cards = board.querySelectorAll(".partner-hand .card");
    expect(cards.length).toBe(2);
    expect(cards[0].textContent).toBe("G1");
    expect((cards[0] as HTMLElement).title).toContain("G12");
  });

  it("chip helpers classify certainty", () => {
    expect(
      chipText({ plausible_colors: ["Red"], plausible_ranks: [2], touched: true })
    ).toBe("R2");
    expect(
      chipIsCertain({ plausible_colors: ["Red"], plausible_ranks: [2], touched: true })
    ).toBe(true);
    expect(
      chipIsCertain({
        plausible_colors: ["Red", "Blue"],
        plausible_ranks: [2],
        touched: true,
      })
    ).toBe(false);
  });
});

describe("action list", () => {
  it("renders one enabled button per legal action on your turn", () => {
    const picks: number[] = [];
    const node = renderActions(hanabiView(), (i) => picks.push(i), false);
    const buttons = node.querySelectorAll<HTMLButtonElement>("button.action");
    expect(buttons.length).toBe(3);
    for (const button of buttons) expect(button.disabled).toBe(false);
    buttons[2].click();
    expect(picks).toEqual([2]);
  });

  it("disables every button and shows the pending note when waiting", () => {
    const view = hanabiView({ your_turn: false, turn_seat: 1, legal_actions: [] });
    const node = renderActions(view, () => {}, false);
    expect(node.querySelector(".pending")?.textContent).toContain("thinking");
    expect(node.querySelectorAll("button.action").length).toBe(0);
  });

  it("disables buttons while a submit is in flight", () => {
    const node = renderActions(hanabiView(), () => {}, true);
    for (const button of node.querySelectorAll<HTMLButtonElement>("button.action")) {
      expect(button.disabled).toBe(true);
    }
  });

  it("shows the final score once finished", () => {
    const view = hanabiView({ status: "finished", your_turn: false, legal_actions: [], score: 17 });
    const node = renderActions(view, () => {}, false);
    expect(node.querySelector(".finished")?.textContent).toContain("17");
  });
});

describe("kitchen and pursuit boards", () => {
  it("renders the kitchen grid with both agents placed", () => {
    const render: KitchenRender = {
      kind: "kitchen",
      grid: ["XXCXX", "O  1O", "X0  X", "XPXDX"],
      positions: [
        [2, 1],
        [1, 3],
      ],
      facings: ["down", "left"],
      inventories: ["onion", null],
      cookers: [{ onions: 2, status: "off", timer: null }],
      counters: { k3: "plate" },
      tick: 12,
      score: 40,
      names: ["Alice", "Bob"],
    };
    const board = renderKitchen(render);
    expect(board.querySelectorAll("tr").length).toBe(4);
    const agents = board.querySelectorAll(".agent");
    expect(agents.length).toBe(2);
    expect(board.querySelector(".agent-0")?.textContent).toContain("A");
    expect(board.querySelector(".agent-1")?.textContent).toContain("B");
    expect(board.textContent).toContain("score 40");
    expect(board.textContent).toContain("k3: plate");
  });

  it("renders rooms with adversary, generators, and gate tags", () => {
    const render: PursuitRender = {
      kind: "escape",
      rooms: [1, 2, 3],
      doors: [
        { a: 1, b: 2, open: true },
        { a: 2, b: 3, open: false },
      ],
      buttons: { "1": ["2-3"] },
      agent_rooms: [1, 2],
      adversary_room: 3,
      generators: { "2": { required: 3, done: 1 } },
      gate_room: 3,
      gate_open: false,
      downed: [false, true],
      escaped: [false, false],
      turn: 5,
      names: ["Alice", "Bob"],
    };
    const board = renderPursuit(render);
    const rooms = board.querySelectorAll(".room");
    expect(rooms.length).toBe(3);
    expect(rooms[1].textContent).toContain("Bob (down)");
    expect(rooms[1].textContent).toContain("gen 1/3");
    expect(rooms[2].textContent).toContain("Killer");
    expect(rooms[2].textContent).toContain("gate closed");
    expect(board.querySelectorAll(".door.closed").length).toBe(1);
  });

  it("renderBoard dispatches on the payload kind", () => {
    const view = hanabiView();
    expect(renderBoard(view).classList.contains("hanabi")).toBe(true);
  });
});
