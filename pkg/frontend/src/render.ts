// DOM renderers. Everything on screen is a projection of the seat view: own
// Hanabi cards appear as knowledge chips only, because that is all the
// payload contains for this seat.

import type {
  HanabiRender,
  KitchenRender,
  KnowledgeChip,
  PursuitRender,
  View,
} from "./types.js";

const COLOR_INITIALS: Record<string, string> = {
  Red: "R",
  Yellow: "Y",
  Green: "G",
  White: "W",
  Blue: "B",
};

function el(
  tag: string,
  className?: string,
  text?: string
): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function chipText(chip: KnowledgeChip): string {
  const colors = chip.plausible_colors.map((c) => COLOR_INITIALS[c] ?? c[0]);
  const ranks = chip.plausible_ranks.map(String);
  return `${colors.join("")}${ranks.join("")}`;
}

export function chipIsCertain(chip: KnowledgeChip): boolean {
  return chip.plausible_colors.length === 1 && chip.plausible_ranks.length === 1;
}

function knowledgeChip(chip: KnowledgeChip): HTMLElement {
  const node = el("span", "chip", chipText(chip));
  if (chipIsCertain(chip)) node.classList.add("certain");
  if (chip.touched) node.classList.add("touched");
  return node;
}

export function renderHanabi(render: HanabiRender): HTMLElement {
  const root = el("div", "board hanabi");
  const stacks = el("div", "stacks");
  for (const [color, top] of Object.entries(render.stacks)) {
    stacks.append(el("span", `stack stack-${color.toLowerCase()}`, `${color} ${top}`));
  }
  root.append(stacks);

  const meters = el("div", "meters");
  meters.append(el("span", "meter", `tokens ${render.reveal_tokens}`));
  meters.append(el("span", "meter", `lives ${render.lives}`));
  meters.append(el("span", "meter", `deck ${render.deck_size}`));
  root.append(meters);

  const own = el("div", "hand own-hand");
  own.append(el("h3", undefined, "your cards (what you know)"));
  for (const chip of render.own_hand) own.append(knowledgeChip(chip));
  root.append(own);

  const partner = el("div", "hand partner-hand");
  partner.append(el("h3", undefined, `${render.names[1] ?? "partner"}'s cards`));
  render.partner_hand.forEach((card, i) => {
    const node = el(
      "span",
      `card card-${card.color.toLowerCase()}`,
      `${COLOR_INITIALS[card.color] ?? "?"}${card.rank}`
    );
    node.title = `knows: ${chipText(render.partner_knowledge[i])}`;
    partner.append(node);
  });
  root.append(partner);

  const discard = el("div", "discard");
  discard.append(
    el("h3", undefined, `discard pile (${render.discard_pile.length})`)
  );
  discard.append(el("div", "discard-cards", render.discard_pile.join(", ") || "empty"));
  root.append(discard);
  return root;
}

const KITCHEN_CELL_CLASS: Record<string, string> = {
  X: "counter",
  O: "onion",
  P: "plates",
  C: "cooker",
  D: "delivery",
  S: "shared",
  " ": "floor",
};

const FACING_ARROW: Record<string, string> = {
  up: "↑",
  down: "↓",
  left: "←",
  right: "→",
};

export function renderKitchen(render: KitchenRender): HTMLElement {
  const root = el("div", "board kitchen");
  const table = el("table", "grid");
  render.grid.forEach((row, r) => {
    const tr = el("tr");
    [...row].forEach((cell, c) => {
      const kind = /\d/.test(cell) ? "floor" : KITCHEN_CELL_CLASS[cell] ?? "floor";
      const td = el("td", `cell ${kind}`);
      const here = render.positions.findIndex(
        (pos) => pos[0] === r && pos[1] === c
      );
      if (here >= 0) {
        td.textContent = `${here === 0 ? "A" : "B"}${FACING_ARROW[render.facings[here]] ?? ""}`;
        td.classList.add("agent", `agent-${here}`);
      } else if (!/\d| /.test(cell)) {
        td.textContent = cell.toLowerCase();
      }
      tr.append(td);
    });
    table.append(tr);
  });
  root.append(table);

  const status = el("div", "kitchen-status");
  status.append(el("span", "meter", `tick ${render.tick}`));
  status.append(el("span", "meter", `score ${render.score}`));
  render.inventories.forEach((item, i) => {
    status.append(
      el("span", "meter", `${render.names[i] ?? i}: ${item ?? "empty hands"}`)
    );
  });
  render.cookers.forEach((cooker, i) => {
    const extra = cooker.status === "cooking" ? ` (${cooker.timer})` : "";
    status.append(
      el("span", "meter", `c${i}: ${cooker.onions}/3 ${cooker.status}${extra}`)
    );
  });
  for (const [label, item] of Object.entries(render.counters)) {
    status.append(el("span", "meter", `${label}: ${item}`));
  }
  root.append(status);
  return root;
}

export function renderPursuit(render: PursuitRender): HTMLElement {
  const root = el("div", "board pursuit");
  const rooms = el("div", "rooms");
  for (const room of render.rooms) {
    const node = el("div", "room", `Room ${room}`);
    const tags = [];
    render.agent_rooms.forEach((r, i) => {
      if (r === room && !render.escaped[i]) {
        tags.push(render.downed[i] ? `${render.names[i]} (down)` : render.names[i]);
      }
    });
    if (render.adversary_room === room) {
      tags.push(render.kind === "capture" ? "Thief" : "Killer");
      node.classList.add("adversary");
    }
    if (render.generators[String(room)]) {
      const gen = render.generators[String(room)];
      tags.push(`gen ${gen.done}/${gen.required}`);
    }
    if (render.gate_room === room) {
      tags.push(render.gate_open ? "gate OPEN" : "gate closed");
    }
    if (render.buttons[String(room)]) {
      tags.push(`button: ${render.buttons[String(room)].join(", ")}`);
    }
    if (tags.length) node.append(el("div", "room-tags", tags.join(" | ")));
    rooms.append(node);
  }
  root.append(rooms);

  const doors = el("div", "doors");
  for (const door of render.doors) {
    doors.append(
      el(
        "span",
        `door ${door.open ? "open" : "closed"}`,
        `${door.a}–${door.b} ${door.open ? "open" : "closed"}`
      )
    );
  }
  root.append(doors);
  return root;
}

export function renderBoard(view: View): HTMLElement {
  switch (view.render.kind) {
    case "hanabi":
      return renderHanabi(view.render);
    case "kitchen":
      return renderKitchen(view.render);
    default:
      return renderPursuit(view.render);
  }
}

export function renderActions(
  view: View,
  onPick: (index: number) => void,
  submitting: boolean
): HTMLElement {
  const root = el("div", "actions");
  root.append(el("h3", undefined, "actions"));
  if (!view.your_turn && view.status === "live") {
    root.append(el("div", "pending", "partner is thinking…"));
  }
  for (const action of view.legal_actions) {
    const button = el("button", "action", action.label) as HTMLButtonElement;
    button.disabled = !view.your_turn || submitting;
    button.dataset.index = String(action.index);
    button.addEventListener("click", () => onPick(action.index));
    root.append(button);
  }
  if (view.status === "finished") {
    root.append(el("div", "finished", `game over, score ${view.score}`));
  }
  return root;
}

export function renderTranscript(view: View): HTMLElement {
  const root = el("div", "transcript");
  root.append(el("h3", undefined, "transcript"));
  const list = el("ol");
  const names = (view.render as { names?: string[] }).names ?? ["A", "B"];
  for (const entry of view.transcript) {
    list.append(el("li", undefined, `${names[entry.seat] ?? entry.seat}: ${entry.label}`));
  }
  root.append(list);
  return root;
}
