// Hand-built SessionView fixtures matching the service schema.

import type { SessionView } from "../src/types";

export function lawnmowerView(overrides: Partial<SessionView> = {}): SessionView {
  const base: SessionView = {
    session_id: "abc123",
    current_state: "base",
    owner_to_move: 2,
    memory: "m00",
    credits: [
      { dim: 1, value: 0 },
      { dim: 2, value: 0 },
    ],
    running_means: [
      { dim: 3, mean: null, threshold: { num: 10, den: 1 } },
    ],
    buchi: { targets: ["grass_cutting"], visits: 0 },
    legal_moves: [
      { to: "cloudy", label: "cloudy", weights: [0, 0, 0] },
      { to: "sunny", label: "sunny", weights: [0, 0, 0] },
    ],
    last_move: null,
    trace: [],
    flags: { energy_violated: false, budget_paused: false, auto_advance: true },
    steps: 0,
    banner: { engine: "capped", status: "WINNING", credits: [[0, 0]] },
    game: {
      name: "lawnmower",
      dimensions: 3,
      initial: "base",
      states: [
        { id: "base", owner: 2, priority: 0 },
        { id: "cloudy", owner: 1, priority: 0 },
        { id: "sunny", owner: 1, priority: 0 },
        { id: "cat_attack", owner: 2, priority: 0 },
        { id: "grass_cutting", owner: 1, priority: 0 },
        { id: "use_fuel", owner: 1, priority: 0 },
      ],
      edges: [
        { src: "base", dst: "cloudy", weights: [0, 0, 0], label: "cloudy" },
        { src: "base", dst: "sunny", weights: [0, 0, 0], label: "sunny" },
        { src: "cat_attack", dst: "base", weights: [0, 0, 40], label: "cat" },
        { src: "cat_attack", dst: "grass_cutting", weights: [0, 0, 0], label: "no cat" },
        { src: "cloudy", dst: "base", weights: [0, 2, 20], label: "rest" },
        { src: "cloudy", dst: "grass_cutting", weights: [-1, 0, 5], label: "mow battery" },
        { src: "cloudy", dst: "use_fuel", weights: [0, 0, 0], label: "switch to fuel" },
        { src: "grass_cutting", dst: "base", weights: [0, 0, 0], label: "go back" },
        { src: "sunny", dst: "base", weights: [2, 2, 20], label: "rest" },
        { src: "sunny", dst: "cat_attack", weights: [-1, -1, 2], label: "fast mow" },
        { src: "sunny", dst: "grass_cutting", weights: [0, 0, 10], label: "slow mow" },
        { src: "use_fuel", dst: "grass_cutting", weights: [0, -2, 5], label: "mow fuel" },
      ],
      objectives: {
        energy_dims: [1, 2],
        mean_payoff: [{ dim: 3, threshold: { num: 10, den: 1 } }],
        buchi_targets: ["grass_cutting"],
        parity: false,
      },
    },
  };
  return { ...base, ...overrides };
}

export function afterCloudyView(): SessionView {
  return lawnmowerView({
    current_state: "base",
    memory: "m02",
    credits: [
      { dim: 1, value: 0 },
      { dim: 2, value: 2 },
    ],
    running_means: [
      { dim: 3, mean: { num: 10, den: 1 }, threshold: { num: 10, den: 1 } },
    ],
    last_move: {
      step: 2, src: "cloudy", dst: "base", label: "rest", mover: "ctl",
      weights: [0, 2, 20],
    },
    trace: [
      { step: 1, src: "base", dst: "cloudy", label: "cloudy", mover: "env", weights: [0, 0, 0], credits_after: [0, 0] },
      { step: 2, src: "cloudy", dst: "base", label: "rest", mover: "ctl", weights: [0, 2, 20], credits_after: [0, 2] },
    ],
    steps: 2,
  });
}

export function noHandlers() {
  return {
    onMove: () => undefined,
    onAdvance: () => undefined,
    onUndo: () => undefined,
    onWhatifEnter: () => undefined,
    onWhatifLeave: () => undefined,
    onNewSession: () => undefined,
  };
}
