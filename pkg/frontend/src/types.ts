// Wire types mirroring the play-service payloads (schema version 1).
// The client renders exclusively from these; it never re-derives game rules.

export interface LegalAction {
  id: string;
  index: number;
  label: string;
}

export interface KnowledgeChip {
  plausible_colors: string[];
  plausible_ranks: number[];
  touched: boolean;
}

export interface HanabiRender {
  kind: "hanabi";
  stacks: Record<string, number>;
  own_hand: KnowledgeChip[];
  partner_hand: { color: string; rank: number }[];
  partner_knowledge: KnowledgeChip[];
  reveal_tokens: number;
  lives: number;
  deck_size: number;
  discard_pile: string[];
  names: string[];
}

export interface CookerView {
  onions: number;
  status: string;
  timer: number | null;
}

export interface KitchenRender {
  kind: "kitchen";
  grid: string[];
  positions: number[][];
  facings: string[];
  inventories: (string | null)[];
  cookers: CookerView[];
  counters: Record<string, string>;
  tick: number;
  score: number;
  names: string[];
}

export interface PursuitRender {
  kind: "capture" | "escape";
  rooms: number[];
  doors: { a: number; b: number; open: boolean }[];
  buttons: Record<string, string[]>;
  agent_rooms: number[];
  adversary_room: number;
  generators: Record<string, { required: number; done: number }>;
  gate_room: number | null;
  gate_open: boolean;
  downed: boolean[];
  escaped: boolean[];
  turn: number;
  names: string[];
}

export type Render = HanabiRender | KitchenRender | PursuitRender;

export interface TranscriptEntry {
  seat: number;
  label: string;
  turn: number;
}

export interface View {
  version: number;
  session: string;
  game: string;
  seat: number;
  status: string;
  turn_seat: number | null;
  your_turn: boolean;
  state_version: number;
  score: number;
  observation: string;
  legal_actions: LegalAction[];
  render: Render;
  transcript: TranscriptEntry[];
  cursor: number;
}

export interface ArenaEvent {
  seq: number;
  version: number;
  type: string;
  seat?: number;
  actor?: string;
  label?: string;
  state_version?: number;
  score?: number;
  fallback?: string;
}

export interface SubmitResult {
  version: number;
  ack: string;
  state_version: number;
  events: ArenaEvent[];
}
