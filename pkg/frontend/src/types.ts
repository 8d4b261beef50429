// Mirrors of the arena service JSON payloads.  The client renders exactly
// what the server sent; it never recomputes game semantics locally.

export interface Rational {
  num: number;
  den: number;
}

export interface CreditEntry {
  dim: number;
  value: number;
}

export interface RunningMean {
  dim: number;
  mean: Rational | null;
  threshold: Rational;
}

export interface LegalMove {
  to: string;
  label: string | null;
  weights: number[];
}

export interface TraceEntry {
  step: number;
  src: string;
  dst: string;
  label: string | null;
  mover: "env" | "ctl";
  weights: number[];
  credits_after?: number[];
}

export interface GameState {
  id: string;
  owner: number;
  priority: number;
}

export interface GameEdge {
  src: string;
  dst: string;
  weights: number[];
  label: string | null;
}

export interface GamePayload {
  name: string;
  dimensions: number;
  initial: string;
  states: GameState[];
  edges: GameEdge[];
  objectives: {
    energy_dims: number[];
    mean_payoff: { dim: number; threshold: Rational }[];
    buchi_targets: string[];
    parity: boolean;
  };
}

export interface SessionView {
  session_id: string;
  current_state: string;
  owner_to_move: number;
  memory: string;
  credits: CreditEntry[];
  running_means: RunningMean[];
  buchi: { targets: string[]; visits: number };
  legal_moves: LegalMove[];
  last_move: TraceEntry | null;
  trace: TraceEntry[];
  flags: {
    energy_violated: boolean;
    budget_paused: boolean;
    auto_advance: boolean;
  };
  steps: number;
  banner: Record<string, unknown>;
  game: GamePayload;
}

/** Structural check of an incoming view; returns the problems found so the
 * renderer can surface a schema-mismatch banner instead of half-drawing. */
export function viewProblems(x: unknown): string[] {
  const problems: string[] = [];
  const need = (cond: boolean, what: string) => {
    if (!cond) problems.push(what);
  };
  if (typeof x !== "object" || x === null) return ["view is not an object"];
  const v = x as Record<string, unknown>;
  need(typeof v.session_id === "string", "session_id missing");
  need(typeof v.current_state === "string", "current_state missing");
  need(v.owner_to_move === 1 || v.owner_to_move === 2, "owner_to_move invalid");
  need(Array.isArray(v.credits), "credits missing");
  need(Array.isArray(v.running_means), "running_means missing");
  need(Array.isArray(v.legal_moves), "legal_moves missing");
  need(Array.isArray(v.trace), "trace missing");
  need(typeof v.flags === "object" && v.flags !== null, "flags missing");
  need(typeof v.steps === "number", "steps missing");
  const game = v.game as Record<string, unknown> | undefined;
  need(typeof game === "object" && game !== null, "game missing");
  if (game) {
    need(Array.isArray(game.states), "game.states missing");
    need(Array.isArray(game.edges), "game.edges missing");
    need(typeof game.initial === "string", "game.initial missing");
  }
  const buchi = v.buchi as Record<string, unknown> | undefined;
  need(typeof buchi === "object" && buchi !== null, "buchi missing");
  if (buchi) {
    need(Array.isArray(buchi.targets), "buchi.targets missing");
    need(typeof buchi.visits === "number", "buchi.visits missing");
  }
  return problems;
}

export function formatRational(r: Rational | null): string {
  if (r === null) return "n/a";
  if (r.den === 1) return `${r.num}`;
  return `${r.num}/${r.den} (${(r.num / r.den).toFixed(2)})`;
}

export function rationalValue(r: Rational | null): number | null {
  return r === null ? null : r.num / r.den;
}
