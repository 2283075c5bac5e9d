// Thin typed client over the session service. Conflicts surface as typed
// errors so the UI can distinguish "refresh and retry" from real failures.

import type { SubmitResult, View } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

export class StaleActionError extends ApiError {}
export class NotYourTurnError extends ApiError {}

async function fail(response: Response): Promise<never> {
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  if (detail === "StaleAction") throw new StaleActionError(response.status, detail);
  if (detail === "NotYourTurn") throw new NotYourTurnError(response.status, detail);
  throw new ApiError(response.status, detail);
}

export interface SeatSpec {
  kind: "human" | "agent";
  spec?: string;
}

export class ArenaApi {
  constructor(private base: string = "") {}

  async createSession(body: {
    game: string;
    layout?: string;
    seed: number;
    seats: SeatSpec[];
    horizon?: number;
  }): Promise<string> {
    const response = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) await fail(response);
    const doc = await response.json();
    return doc.id as string;
  }

  async getView(session: string, seat: number): Promise<View> {
    const response = await fetch(
      `${this.base}/sessions/${session}/view?seat=${seat}`
    );
    if (!response.ok) await fail(response);
    return (await response.json()) as View;
  }

  async submitAction(
    session: string,
    seat: number,
    actionIndex: number,
    stateVersion: number
  ): Promise<SubmitResult> {
    const response = await fetch(`${this.base}/sessions/${session}/actions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        seat,
        action_index: actionIndex,
        state_version: stateVersion,
      }),
    });
    if (!response.ok) await fail(response);
    return (await response.json()) as SubmitResult;
  }
}
