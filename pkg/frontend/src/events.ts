// Server-sent-events subscription with cursor tracking. On any drop the
// stream reconnects from the next unseen sequence number, so the consumer
// sees every event exactly once and in order.

import type { ArenaEvent } from "./types.js";

export interface CursorState {
  next: number;
}

/** Pure resume/dedupe rule: accept only the event the cursor expects or later. */
export function acceptEvent(
  cursor: CursorState,
  event: ArenaEvent
): boolean {
  if (event.seq < cursor.next) return false; // duplicate from a replayed window
  cursor.next = event.seq + 1;
  return true;
}

export class EventStream {
  cursor: CursorState;
  private source: EventSource | null = null;
  private closed = false;
  private retryMs = 500;

  constructor(
    private session: string,
    private onEvent: (event: ArenaEvent) => void,
    private onEnd: () => void = () => {},
    startCursor = 0,
    private base: string = "",
    private makeSource: (url: string) => EventSource = (url) =>
      new EventSource(url)
  ) {
    this.cursor = { next: startCursor };
  }

  connect(): void {
    if (this.closed) return;
    const url = `${this.base}/sessions/${this.session}/events?cursor=${this.cursor.next}`;
    const source = this.makeSource(url);
    this.source = source;
    const handler = (raw: MessageEvent) => {
      const event = JSON.parse(raw.data) as ArenaEvent;
      if (acceptEvent(this.cursor, event)) this.onEvent(event);
    };
    for (const type of ["created", "action", "finished", "message"]) {
      source.addEventListener(type, handler as EventListener);
    }
    source.addEventListener("end", () => {
      this.close();
      this.onEnd();
    });
    source.onerror = () => {
      // resume from the cursor after a short pause; never from scratch
      source.close();
      if (this.closed) return;
      setTimeout(() => this.connect(), this.retryMs);
      this.retryMs = Math.min(this.retryMs * 2, 5000);
    };
  }

  close(): void {
    this.closed = true;
    this.source?.close();
  }
}
