// Client-side session state: one authoritative View per seat plus the event
// cursor. Events only tell us *when* to refetch; all game content comes from
// the service view, never from local rule inference.

import { ArenaApi, StaleActionError } from "./api.js";
import type { ArenaEvent, View } from "./types.js";

export type StoreListener = (store: SessionStore) => void;

export class SessionStore {
  view: View | null = null;
  banner: string | null = null;
  staleNotice = false;
  submitting = false;

  private listeners: StoreListener[] = [];

  constructor(
    private api: ArenaApi,
    public session: string,
    public seat: number
  ) {}

  subscribe(listener: StoreListener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this);
  }

  /** True while the session is live but it is not this seat's turn. */
  get waitingOnPartner(): boolean {
    return (
      this.view !== null &&
      this.view.status === "live" &&
      !this.view.your_turn
    );
  }

  async refresh(): Promise<void> {
    try {
      this.view = await this.api.getView(this.session, this.seat);
      this.banner = null;
    } catch (error) {
      this.banner = `could not load view: ${(error as Error).message}`;
    }
    this.emit();
  }

  /** Apply a streamed event: state-changing kinds trigger a view refetch. */
  async handleEvent(event: ArenaEvent): Promise<void> {
    if (event.type === "action" || event.type === "finished") {
      await this.refresh();
    }
  }

  async submit(actionIndex: number): Promise<void> {
    if (!this.view) return;
    this.submitting = true;
    this.staleNotice = false;
    this.emit();
    try {
      await this.api.submitAction(
        this.session,
        this.seat,
        actionIndex,
        this.view.state_version
      );
      await this.refresh();
    } catch (error) {
      if (error instanceof StaleActionError) {
        // the board moved under us: reload, prompt, and never double-submit
        this.staleNotice = true;
        await this.refresh();
      } else {
        this.banner = `submit failed: ${(error as Error).message}`;
        this.emit();
      }
    } finally {
      this.submitting = false;
      this.emit();
    }
  }
}
