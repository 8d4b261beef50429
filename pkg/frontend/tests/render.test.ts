// Schema-driven render tests: the screen is a pure function of the view and
// never consults game rules on its own.

import { beforeEach, describe, expect, it, vi } from "vitest";

import { hideWhatif, renderView, renderWhatif } from "../src/render";
import { viewProblems } from "../src/types";
import { afterCloudyView, lawnmowerView, noHandlers } from "./fixtures";

let root: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = '<main id="app"></main>';
  root = document.getElementById("app")!;
});

describe("renderView", () => {
  it("shows the initial lawnmower view with base highlighted", () => {
    renderView(root, lawnmowerView(), noHandlers());
    const current = root.querySelector(".node-current");
    expect(current?.getAttribute("data-state")).toBe("base");
    const buttons = [...root.querySelectorAll<HTMLButtonElement>(".btn-move")];
    expect(buttons.map((b) => b.getAttribute("data-test"))).toEqual([
      "move-cloudy",
      "move-sunny",
    ]);
    expect(root.querySelector('[data-test="gauge-dim-1"]')?.textContent).toContain("0");
    expect(root.querySelector('[data-test="buchi-visits"]')?.textContent).toBe(
      "target visits: 0",
    );
  });

  it("renders all six states and twelve edges of the graph payload", () => {
    renderView(root, lawnmowerView(), noHandlers());
    expect(root.querySelectorAll(".node").length).toBe(6);
    expect(root.querySelectorAll("path.edge").length).toBe(12);
  });

  it("derives buttons from legal_moves alone, not from the graph", () => {
    const view = lawnmowerView({
      legal_moves: [{ to: "grass_cutting", label: null, weights: [0, 0, 0] }],
    });
    // grass_cutting is not an edge out of base in the game payload; the
    // client must not second-guess the server
    renderView(root, view, noHandlers());
    const buttons = [...root.querySelectorAll<HTMLButtonElement>(".btn-move")];
    expect(buttons.map((b) => b.getAttribute("data-test"))).toEqual([
      "move-grass_cutting",
    ]);
  });

  it("shows the red gauge and violation banner when flagged", () => {
    const view = lawnmowerView();
    view.flags.energy_violated = true;
    renderView(root, view, noHandlers());
    expect(root.querySelector('[data-test="violation-banner"]')).not.toBeNull();
    expect(root.querySelector(".gauge-red")).not.toBeNull();
  });

  it("offers a single controller button when player 1 is to move", () => {
    const view = lawnmowerView({
      owner_to_move: 1,
      current_state: "cloudy",
      legal_moves: [],
    });
    view.flags.auto_advance = false;
    renderView(root, view, noHandlers());
    expect(root.querySelectorAll(".btn-move").length).toBe(0);
    expect(root.querySelector('[data-test="advance"]')).not.toBeNull();
  });

  it("disables all inputs while a request is in flight", () => {
    renderView(root, lawnmowerView({ steps: 2 }), noHandlers(), { inflight: true });
    const buttons = [...root.querySelectorAll<HTMLButtonElement>("button")];
    expect(buttons.length).toBeGreaterThan(0);
    expect(buttons.every((b) => b.disabled)).toBe(true);
  });

  it("renders the mean with its indicator note and the trace", () => {
    renderView(root, afterCloudyView(), noHandlers());
    const mean = root.querySelector('[data-test="mean-dim-3"]');
    expect(mean?.textContent).toContain("10");
    expect(mean?.textContent).toContain("indicator");
    const items = root.querySelectorAll(".trace-item");
    expect(items.length).toBe(2);
    expect(items[1].textContent).toContain("rest");
  });

  it("surfaces a schema mismatch as an error banner", () => {
    const broken = { session_id: "x" } as never;
    renderView(root, broken, noHandlers());
    expect(root.querySelector('[data-test="schema-error"]')).not.toBeNull();
    expect(root.querySelectorAll("button").length).toBe(0);
  });

  it("re-rendering the same view yields identical markup (stateless)", () => {
    renderView(root, afterCloudyView(), noHandlers());
    const first = root.innerHTML;
    renderView(root, lawnmowerView(), noHandlers());
    renderView(root, afterCloudyView(), noHandlers());
    expect(root.innerHTML).toBe(first);
  });

  it("marks the synthesis banner with engine, verdict and credits", () => {
    renderView(root, lawnmowerView(), noHandlers());
    const banner = root.querySelector('[data-test="synthesis-banner"]');
    expect(banner?.textContent).toContain("capped");
    expect(banner?.textContent).toContain("WINNING");
    expect(banner?.textContent).toContain("(0,0)");
  });
});

describe("whatif overlay", () => {
  it("shows server-computed deltas and hides on leave", () => {
    const current = lawnmowerView();
    renderView(root, current, noHandlers());
    const ghost = afterCloudyView();
    renderWhatif(root, current, ghost, "cloudy");
    const overlay = root.querySelector<HTMLElement>('[data-test="whatif-overlay"]')!;
    expect(overlay.hidden).toBe(false);
    expect(overlay.textContent).toContain("if cloudy:");
    expect(overlay.textContent).toContain("dim 3 +20");
    expect(overlay.textContent).toContain("energy 2 +2");
    hideWhatif(root);
    expect(overlay.hidden).toBe(true);
  });
});

describe("viewProblems", () => {
  it("accepts a full view and rejects truncated ones", () => {
    expect(viewProblems(lawnmowerView())).toEqual([]);
    expect(viewProblems({})).not.toEqual([]);
    expect(viewProblems(null)).toEqual(["view is not an object"]);
  });
});
