/** View state: the latest server snapshot plus in-flight request flags.
 * The UI never derives or mutates business data locally; every change is
 * the verbatim application of a server response. */

import type { Panel, SessionSnapshot } from './types.js';

export interface ViewState {
  session: SessionSnapshot | null;
  panel: Panel;
  pending: boolean;
  error: string | null;
}

export type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState = { session: null, panel: 'Landing', pending: false, error: null };
  private listeners: Listener[] = [];

  get(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  applySession(session: SessionSnapshot): void {
    this.state = { ...this.state, session, error: null };
    this.emit();
  }

  setPanel(panel: Panel): void {
    this.state = { ...this.state, panel };
    this.emit();
  }

  setError(message: string | null): void {
    this.state = { ...this.state, error: message };
    this.emit();
  }

  /** Wraps a mutation: one in-flight request at a time; the fresh snapshot
   * is re-fetched by the caller and applied through applySession. */
  async mutate<T>(fn: () => Promise<T>): Promise<T | undefined> {
    if (this.state.pending) return undefined;
    this.state = { ...this.state, pending: true };
    this.emit();
    try {
      return await fn();
    } catch (err) {
      this.state = { ...this.state, error: String(err instanceof Error ? err.message : err) };
      return undefined;
    } finally {
      this.state = { ...this.state, pending: false };
      this.emit();
    }
  }
}
