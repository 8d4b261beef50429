// DOM rendering of a session view.  Stateless: every call rebuilds the
// screen from the view alone, so a re-fetched view always renders the same.
// Enabled moves come exclusively from view.legal_moves; the graph drawing is
// decoration, never an input to what the user may click.

import { layeredLayout, layoutExtent } from "./layout.js";
import {
  SessionView,
  TraceEntry,
  formatRational,
  rationalValue,
  viewProblems,
} from "./types.js";

export interface Handlers {
  onMove: (to: string) => void;
  onAdvance: () => void;
  onUndo: () => void;
  onWhatifEnter: (to: string) => void;
  onWhatifLeave: () => void;
  onNewSession: () => void;
}

const SVG_NS = "http://www.w3.org/2000/svg";

function el(tag: string, cls?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface RenderOptions {
  inflight?: boolean;
  error?: string | null;
  sessionLost?: boolean;
  whatif?: string | null;
}

export function renderView(
  root: HTMLElement,
  view: SessionView,
  handlers: Handlers,
  opts: RenderOptions = {},
): void {
  root.textContent = "";
  const problems = viewProblems(view);
  if (problems.length > 0) {
    const banner = el("div", "banner banner-error", `schema mismatch: ${problems.join("; ")}`);
    banner.setAttribute("data-test", "schema-error");
    root.appendChild(banner);
    return;
  }

  if (opts.error) {
    const banner = el("div", "banner banner-error", opts.error);
    banner.setAttribute("data-test", "error-banner");
    root.appendChild(banner);
  }
  if (opts.sessionLost) {
    const banner = el("div", "banner banner-error");
    banner.setAttribute("data-test", "session-lost");
    banner.appendChild(el("span", "", "session is gone (server restarted?) "));
    const again = el("button", "btn", "new session") as HTMLButtonElement;
    again.setAttribute("data-test", "new-session");
    again.addEventListener("click", () => handlers.onNewSession());
    banner.appendChild(again);
    root.appendChild(banner);
  }
  if (view.flags.energy_violated) {
    const banner = el("div", "banner banner-violation", "energy objective violated");
    banner.setAttribute("data-test", "violation-banner");
    root.appendChild(banner);
  }
  root.appendChild(renderBanner(view));

  const columns = el("div", "columns");
  const left = el("div", "col col-graph");
  left.appendChild(renderGraph(view));
  columns.appendChild(left);

  const right = el("div", "col col-panel");
  right.appendChild(renderStatus(view));
  right.appendChild(renderGauges(view));
  right.appendChild(renderMeans(view));
  right.appendChild(renderControls(view, handlers, opts));
  const overlay = el("div", "whatif-overlay");
  overlay.setAttribute("data-test", "whatif-overlay");
  overlay.hidden = true;
  right.appendChild(overlay);
  right.appendChild(renderTrace(view));
  columns.appendChild(right);
  root.appendChild(columns);
}

function renderBanner(view: SessionView): HTMLElement {
  const banner = view.banner as {
    engine?: string;
    status?: string;
    credits?: number[][];
  };
  const box = el("div", "banner banner-info");
  box.setAttribute("data-test", "synthesis-banner");
  if (banner && banner.status) {
    const credits = banner.credits
      ? " credits " +
        banner.credits.map((c) => "(" + c.join(",") + ")").join(" ")
      : "";
    box.textContent = `controller: ${banner.engine ?? "?"} ${banner.status}${credits}`;
  } else {
    box.textContent = "controller: user-provided strategy";
  }
  return box;
}

function renderGraph(view: SessionView): HTMLElement {
  const wrap = el("div", "graph");
  const points = layeredLayout(view.game);
  const extent = layoutExtent(points);
  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${extent.x} ${extent.y}`);
  svg.setAttribute("data-test", "graph");

  const defs = document.createElementNS(SVG_NS, "defs");
  const marker = document.createElementNS(SVG_NS, "marker");
  marker.setAttribute("id", "arrow");
  marker.setAttribute("viewBox", "0 0 10 10");
  marker.setAttribute("refX", "9");
  marker.setAttribute("refY", "5");
  marker.setAttribute("markerWidth", "7");
  marker.setAttribute("markerHeight", "7");
  marker.setAttribute("orient", "auto-start-reverse");
  const tip = document.createElementNS(SVG_NS, "path");
  tip.setAttribute("d", "M 0 0 L 10 5 L 0 10 z");
  tip.setAttribute("class", "edge-arrow");
  marker.appendChild(tip);
  defs.appendChild(marker);
  svg.appendChild(defs);

  const R = 26;
  for (const e of view.game.edges) {
    const a = points.get(e.src)!;
    const b = points.get(e.dst)!;
    const path = document.createElementNS(SVG_NS, "path");
    let d: string;
    let lx: number;
    let ly: number;
    if (e.src === e.dst) {
      d = `M ${a.x - R} ${a.y} a ${R} ${R * 0.9} 0 1 1 ${R * 2} 0`;
      lx = a.x;
      ly = a.y - R * 2.4;
    } else {
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const len = Math.hypot(dx, dy) || 1;
      const sx = a.x + (dx / len) * R;
      const sy = a.y + (dy / len) * R;
      const ex = b.x - (dx / len) * (R + 4);
      const ey = b.y - (dy / len) * (R + 4);
      const bend = 18;
      const mx = (sx + ex) / 2 - (dy / len) * bend;
      const my = (sy + ey) / 2 + (dx / len) * bend;
      d = `M ${sx} ${sy} Q ${mx} ${my} ${ex} ${ey}`;
      lx = mx;
      ly = my - 4;
    }
    path.setAttribute("d", d);
    path.setAttribute("class", "edge");
    path.setAttribute("marker-end", "url(#arrow)");
    svg.appendChild(path);
    if (e.label) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", `${lx}`);
      text.setAttribute("y", `${ly}`);
      text.setAttribute("class", "edge-label");
      text.textContent = e.label;
      svg.appendChild(text);
    }
  }

  for (const s of view.game.states) {
    const p = points.get(s.id)!;
    const group = document.createElementNS(SVG_NS, "g");
    const classes = ["node"];
    if (s.id === view.current_state) classes.push("node-current");
    if (view.buchi.targets.includes(s.id)) classes.push("node-accepting");
    group.setAttribute("class", classes.join(" "));
    group.setAttribute("data-state", s.id);
    if (s.owner === 1) {
      const c = document.createElementNS(SVG_NS, "circle");
      c.setAttribute("cx", `${p.x}`);
      c.setAttribute("cy", `${p.y}`);
      c.setAttribute("r", `${R}`);
      group.appendChild(c);
      if (view.buchi.targets.includes(s.id)) {
        const ring = document.createElementNS(SVG_NS, "circle");
        ring.setAttribute("cx", `${p.x}`);
        ring.setAttribute("cy", `${p.y}`);
        ring.setAttribute("r", `${R - 5}`);
        ring.setAttribute("class", "ring");
        group.appendChild(ring);
      }
    } else {
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", `${p.x - R}`);
      rect.setAttribute("y", `${p.y - R}`);
      rect.setAttribute("width", `${R * 2}`);
      rect.setAttribute("height", `${R * 2}`);
      group.appendChild(rect);
    }
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", `${p.x}`);
    label.setAttribute("y", `${p.y + 4}`);
    label.setAttribute("class", "node-label");
    label.textContent = s.id.replace(/_/g, " ");
    group.appendChild(label);
    svg.appendChild(group);
  }
  wrap.appendChild(svg);
  return wrap;
}

function renderStatus(view: SessionView): HTMLElement {
  const box = el("div", "status");
  box.appendChild(el("div", "status-state", `at ${view.current_state}`));
  const turn =
    view.owner_to_move === 2 ? "environment to move" : "controller to move";
  box.appendChild(el("div", "status-turn", turn));
  box.appendChild(el("div", "status-steps", `steps: ${view.steps}`));
  const buchi = el("div", "status-buchi");
  buchi.setAttribute("data-test", "buchi-visits");
  buchi.textContent = `target visits: ${view.buchi.visits}`;
  box.appendChild(buchi);
  return box;
}

function renderGauges(view: SessionView): HTMLElement {
  const box = el("div", "gauges");
  for (const credit of view.credits) {
    const gauge = el("div", "gauge" + (view.flags.energy_violated ? " gauge-red" : ""));
    gauge.setAttribute("data-test", `gauge-dim-${credit.dim}`);
    gauge.appendChild(el("span", "gauge-name", `energy dim ${credit.dim}`));
    const value = el("span", "gauge-value", `${credit.value}`);
    gauge.appendChild(value);
    const bar = el("div", "gauge-bar");
    const fill = el("div", "gauge-fill");
    fill.style.width = `${Math.max(0, Math.min(100, credit.value * 10))}%`;
    bar.appendChild(fill);
    gauge.appendChild(bar);
    box.appendChild(gauge);
  }
  return box;
}

function renderMeans(view: SessionView): HTMLElement {
  const box = el("div", "means");
  for (const m of view.running_means) {
    const row = el("div", "mean");
    row.setAttribute("data-test", `mean-dim-${m.dim}`);
    const value = rationalValue(m.mean);
    const limit = rationalValue(m.threshold)!;
    const over = value !== null && value > limit;
    row.appendChild(
      el(
        "span",
        "mean-text" + (over ? " mean-over" : ""),
        `dim ${m.dim} running mean ${formatRational(m.mean)} / limit ${formatRational(m.threshold)}`,
      ),
    );
    row.appendChild(
      el("span", "mean-note", "finite-prefix indicator, not the limit"),
    );
    box.appendChild(row);
  }
  return box;
}

function renderControls(
  view: SessionView,
  handlers: Handlers,
  opts: RenderOptions,
): HTMLElement {
  const box = el("div", "controls");
  const disabled = Boolean(opts.inflight);
  if (view.owner_to_move === 2) {
    for (const move of view.legal_moves) {
      const btn = el("button", "btn btn-move") as HTMLButtonElement;
      btn.setAttribute("data-test", `move-${move.to}`);
      btn.textContent = move.label ? `${move.to} (${move.label})` : move.to;
      btn.disabled = disabled;
      btn.addEventListener("click", () => handlers.onMove(move.to));
      btn.addEventListener("mouseenter", () => handlers.onWhatifEnter(move.to));
      btn.addEventListener("focus", () => handlers.onWhatifEnter(move.to));
      btn.addEventListener("mouseleave", () => handlers.onWhatifLeave());
      btn.addEventListener("blur", () => handlers.onWhatifLeave());
      box.appendChild(btn);
    }
  } else {
    const btn = el("button", "btn btn-advance", "let controller move") as HTMLButtonElement;
    btn.setAttribute("data-test", "advance");
    btn.disabled = disabled;
    btn.addEventListener("click", () => handlers.onAdvance());
    box.appendChild(btn);
  }
  const undo = el("button", "btn btn-undo", "undo") as HTMLButtonElement;
  undo.setAttribute("data-test", "undo");
  undo.disabled = disabled || view.steps === 0;
  undo.addEventListener("click", () => handlers.onUndo());
  box.appendChild(undo);
  return box;
}

function traceLine(t: TraceEntry): string {
  const who = t.mover === "env" ? "env" : "ctl";
  const label = t.label ? ` ${t.label}` : "";
  const credits = t.credits_after ? ` credits=(${t.credits_after.join(",")})` : "";
  return `${t.step}. [${who}]${label} ${t.src} -> ${t.dst} (${t.weights.join(",")})${credits}`;
}

function renderTrace(view: SessionView): HTMLElement {
  const box = el("div", "trace");
  box.setAttribute("data-test", "trace");
  box.appendChild(el("div", "trace-title", "trace"));
  const list = el("ol", "trace-list");
  for (const t of view.trace.slice(-30)) {
    list.appendChild(el("li", "trace-item", traceLine(t)));
  }
  box.appendChild(list);
  return box;
}

/** Fill the what-if overlay with the delta between the current view and a
 * hypothetical one; both come from the server, nothing is computed from
 * game rules here. */
export function renderWhatif(
  root: HTMLElement,
  current: SessionView,
  ghost: SessionView,
  to: string,
): void {
  const overlay = root.querySelector(
    '[data-test="whatif-overlay"]',
  ) as HTMLElement | null;
  if (!overlay) return;
  const parts: string[] = [`if ${to}:`];
  const newEntries = ghost.trace.filter((t) => t.step > current.steps);
  for (const m of current.running_means) {
    const delta = newEntries.reduce((acc, t) => acc + t.weights[m.dim - 1], 0);
    parts.push(`dim ${m.dim} +${delta}`);
  }
  ghost.credits.forEach((c, i) => {
    const before = current.credits[i]?.value ?? 0;
    if (c.value !== before) {
      const sign = c.value - before > 0 ? "+" : "";
      parts.push(`energy ${c.dim} ${sign}${c.value - before}`);
    }
  });
  const visits = ghost.buchi.visits - current.buchi.visits;
  if (visits > 0) parts.push(`target visit +${visits}`);
  parts.push(`ends at ${ghost.current_state}`);
  overlay.textContent = parts.join("  ");
  overlay.hidden = false;
}

export function hideWhatif(root: HTMLElement): void {
  const overlay = root.querySelector(
    '[data-test="whatif-overlay"]',
  ) as HTMLElement | null;
  if (overlay) overlay.hidden = true;
}
