// Shared test fixtures: realistic seat-0 view payloads.

import type { HanabiRender, View } from "./types.js";

export function hanabiRender(): HanabiRender {
  return {
    kind: "hanabi",
    stacks: { Red: 1, Yellow: 0, Green: 0, White: 0, Blue: 2 },
    own_hand: [
      { plausible_colors: ["Red"], plausible_ranks: [2], touched: true },
      {
        plausible_colors: ["Red", "Yellow", "Green", "White", "Blue"],
        plausible_ranks: [1, 2, 3, 4, 5],
        touched: false,
      },
    ],
    partner_hand: [
      { color: "Green", rank: 1 },
      { color: "White", rank: 4 },
    ],
    partner_knowledge: [
      { plausible_colors: ["Green"], plausible_ranks: [1, 2], touched: true },
      {
        plausible_colors: ["Red", "Yellow", "Green", "White", "Blue"],
        plausible_ranks: [1, 2, 3, 4, 5],
        touched: false,
      },
    ],
    reveal_tokens: 6,
    lives: 3,
    deck_size: 31,
    discard_pile: ["Blue 3"],
    names: ["Alice", "Bob"],
  };
}

export function hanabiView(overrides: Partial<View> = {}): View {
  return {
    version: 1,
    session: "abc123",
    game: "hanabi",
    seat: 0,
    status: "live",
    turn_seat: 0,
    your_turn: true,
    state_version: 4,
    score: 3,
    observation: "It is currently My (Alice) turn.",
    legal_actions: [
      { id: "4:0", index: 0, label: "Reveal Bob's Green color cards" },
      { id: "4:1", index: 1, label: "Play my Card 0" },
      { id: "4:2", index: 2, label: "Discard my Card 1" },
    ],
    render: hanabiRender(),
    transcript: [
      { seat: 1, label: "Reveal Alice's rank 2 cards", turn: 0 },
    ],
    cursor: 3,
    ...overrides,
  };
}
