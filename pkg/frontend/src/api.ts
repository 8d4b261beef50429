// Thin REST client for the arena service.  The fetch implementation is
// injectable so tests can run without a server.

import type { SessionView } from "./types.js";

export interface CreateSessionBody {
  game_text: string;
  strategy_text?: string | null;
  synthesize?: boolean;
  credit?: number[] | null;
  auto_advance?: boolean;
}

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`api error ${status}`);
    this.status = status;
    this.detail = detail;
  }

  detailMessage(): string {
    const d = this.detail as { message?: string } | null;
    if (d && typeof d.message === "string") return d.message;
    return `request failed with status ${this.status}`;
  }
}

export class ArenaClient {
  private fetchImpl: typeof fetch;
  base: string;

  constructor(fetchImpl?: typeof fetch, base = "") {
    this.fetchImpl = fetchImpl ?? fetch.bind(globalThis);
    this.base = base;
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const resp = await this.fetchImpl(this.base + path, init);
    const body = resp.status === 204 ? null : await resp.json();
    if (!resp.ok) {
      const detail = (body as { detail?: unknown } | null)?.detail ?? body;
      throw new ApiError(resp.status, detail);
    }
    return body;
  }

  async config(): Promise<{ default_game_text: string | null; default_strategy_text: string | null }> {
    return (await this.request("/api/config")) as never;
  }

  async builtinLawnmower(): Promise<string> {
    const resp = await this.fetchImpl(this.base + "/api/games/builtin/lawnmower");
    if (!resp.ok) throw new ApiError(resp.status, null);
    return resp.text();
  }

  async createSession(body: CreateSessionBody): Promise<{ session_id: string; view: SessionView }> {
    return (await this.request("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    })) as never;
  }

  async getView(id: string): Promise<SessionView> {
    return (await this.request(`/api/sessions/${id}`)) as SessionView;
  }

  async move(id: string, to: string | null): Promise<SessionView> {
    return (await this.request(`/api/sessions/${id}/move`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ to }),
    })) as SessionView;
  }

  async undo(id: string): Promise<SessionView> {
    return (await this.request(`/api/sessions/${id}/undo`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({}),
    })) as SessionView;
  }

  async whatif(id: string, to: string): Promise<SessionView> {
    return (await this.request(
      `/api/sessions/${id}/whatif?to=${encodeURIComponent(to)}`,
    )) as SessionView;
  }
}
