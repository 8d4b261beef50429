// Fixed layered layout: breadth-first layers from the initial state, rows in
// declaration order.  Computed once per game; no physics, so two renders of
// the same game always place nodes identically.

import type { GamePayload } from "./types.js";

export interface Point {
  x: number;
  y: number;
}

const LAYER_W = 170;
const ROW_H = 110;
const MARGIN = 70;

export function layeredLayout(game: GamePayload): Map<string, Point> {
  const order = new Map(game.states.map((s, i) => [s.id, i]));
  const succ = new Map<string, string[]>();
  for (const s of game.states) succ.set(s.id, []);
  for (const e of game.edges) succ.get(e.src)?.push(e.dst);

  const layer = new Map<string, number>();
  layer.set(game.initial, 0);
  const queue = [game.initial];
  while (queue.length > 0) {
    const v = queue.shift()!;
    const next = (succ.get(v) ?? [])
      .slice()
      .sort((a, b) => (order.get(a) ?? 0) - (order.get(b) ?? 0));
    for (const u of next) {
      if (!layer.has(u)) {
        layer.set(u, (layer.get(v) ?? 0) + 1);
        queue.push(u);
      }
    }
  }
  let deepest = 0;
  for (const d of layer.values()) deepest = Math.max(deepest, d);
  for (const s of game.states) {
    if (!layer.has(s.id)) layer.set(s.id, deepest + 1); // unreachable shelf
  }

  const rows = new Map<number, string[]>();
  for (const s of game.states) {
    const d = layer.get(s.id)!;
    if (!rows.has(d)) rows.set(d, []);
    rows.get(d)!.push(s.id);
  }
  const points = new Map<string, Point>();
  for (const [d, ids] of rows) {
    ids.sort((a, b) => (order.get(a) ?? 0) - (order.get(b) ?? 0));
    ids.forEach((id, row) => {
      points.set(id, { x: MARGIN + d * LAYER_W, y: MARGIN + row * ROW_H });
    });
  }
  return points;
}

export function layoutExtent(points: Map<string, Point>): Point {
  let x = 0;
  let y = 0;
  for (const p of points.values()) {
    x = Math.max(x, p.x);
    y = Math.max(y, p.y);
  }
  return { x: x + MARGIN, y: y + MARGIN };
}
