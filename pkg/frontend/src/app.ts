// Application state machine: one in-flight request at a time, rendering is
// always a full redraw from the latest server view (turn-based play needs no
// polling beyond re-fetching after our own actions).

import { ApiError, ArenaClient, CreateSessionBody } from "./api.js";
import { Handlers, hideWhatif, renderView, renderWhatif } from "./render.js";
import type { SessionView } from "./types.js";

export class ArenaApp {
  client: ArenaClient;
  root: HTMLElement;
  view: SessionView | null = null;
  sessionId: string | null = null;
  inflight = false;
  error: string | null = null;
  sessionLost = false;
  private createBody: CreateSessionBody | null = null;

  constructor(root: HTMLElement, client: ArenaClient) {
    this.root = root;
    this.client = client;
  }

  handlers(): Handlers {
    return {
      onMove: (to) => void this.submitMove(to),
      onAdvance: () => void this.submitMove(null),
      onUndo: () => void this.undo(),
      onWhatifEnter: (to) => void this.previewWhatif(to),
      onWhatifLeave: () => hideWhatif(this.root),
      onNewSession: () => void this.startSession(),
    };
  }

  render(): void {
    if (this.view === null) return;
    renderView(this.root, this.view, this.handlers(), {
      inflight: this.inflight,
      error: this.error,
      sessionLost: this.sessionLost,
    });
  }

  async createSession(body: CreateSessionBody): Promise<void> {
    this.createBody = body;
    await this.startSession();
  }

  async startSession(): Promise<void> {
    if (this.createBody === null) return;
    this.error = null;
    this.sessionLost = false;
    try {
      const made = await this.client.createSession(this.createBody);
      this.sessionId = made.session_id;
      this.view = made.view;
    } catch (exc) {
      this.error = exc instanceof ApiError ? exc.detailMessage() : String(exc);
    }
    this.render();
  }

  /** POST the environment's (or a paused controller's) move.  Input stays
   * disabled until the response lands; clicks while in flight are dropped. */
  async submitMove(to: string | null): Promise<void> {
    if (this.inflight || this.sessionId === null) return;
    this.inflight = true;
    this.error = null;
    this.render();
    try {
      this.view = await this.client.move(this.sessionId, to);
    } catch (exc) {
      this.noteFailure(exc);
    }
    this.inflight = false;
    this.render();
  }

  async undo(): Promise<void> {
    if (this.inflight || this.sessionId === null) return;
    this.inflight = true;
    this.error = null;
    this.render();
    try {
      this.view = await this.client.undo(this.sessionId);
    } catch (exc) {
      this.noteFailure(exc);
    }
    this.inflight = false;
    this.render();
  }

  /** Hypothetical view on hover; overlays deltas without committing.
   * Failures dismiss silently: previews must never disturb play. */
  async previewWhatif(to: string): Promise<void> {
    if (this.sessionId === null || this.view === null) return;
    try {
      const ghost = await this.client.whatif(this.sessionId, to);
      if (this.view !== null) renderWhatif(this.root, this.view, ghost, to);
    } catch {
      hideWhatif(this.root);
    }
  }

  private noteFailure(exc: unknown): void {
    if (exc instanceof ApiError && exc.status === 404) {
      this.sessionLost = true;
      return;
    }
    this.error = exc instanceof ApiError ? exc.detailMessage() : String(exc);
  }
}
