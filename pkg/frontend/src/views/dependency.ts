import { divergingHighLow, visitGradient } from "../colors.js";
import type { SelectionState, Slot } from "../state.js";
import { previousPorts } from "../state.js";
import { catmullRom } from "../spline.js";
import type { Dependency, DepRect } from "../types.js";

// Past forty context rows the per-row text stops being readable, so the
// column degrades to bare memory-gain swatches.
export const COLLAPSE_THRESHOLD = 40;

const COL_W = 150;
const ROW_H = 44;
const RECT_W = 120;
const RECT_H = 32;
const PAD = 40;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function historyColumns(dep: Dependency): number {
  let n = 0;
  for (const c of dep.left) n = Math.max(n, c.column + 1);
  for (const r of dep.middle) n = Math.max(n, r.order - 1);
  return n;
}

/** Curve control points use x=0 for the context column and negative x for
    history, so screen x is a plain affine map of those units. */
function xOf(col: number, nCols: number): number {
  return PAD + (col + nCols) * COL_W;
}

function yOf(slot: number): number {
  return PAD + slot * ROW_H;
}

function rectClass(r: DepRect, state: SelectionState): string {
  const cls = ["ctx"];
  if (state.selectedHonNodes.includes(r.label)) cls.push("selected");
  if (
    state.selectedPreviousPort !== null &&
    !previousPorts(r.label).includes(state.selectedPreviousPort)
  ) {
    cls.push("dimmed");
  }
  return cls.join(" ");
}

function renderCurve(
  nodeId: string, controls: readonly (readonly [number, number])[], nCols: number,
): string {
  if (controls.length < 2) return "";
  const pts = controls.map(
    ([cx, cy]) => [xOf(cx, nCols), yOf(cy)] as readonly [number, number]);
  const line = catmullRom(pts, 12);
  const segs: string[] = [];
  for (let i = 0; i + 1 < line.length; i++) {
    const a = line[i] as readonly [number, number];
    const b = line[i + 1] as readonly [number, number];
    const t = line.length > 2 ? i / (line.length - 2) : 1;
    segs.push(
      `<line class="voyage-seg" x1="${a[0].toFixed(2)}" y1="${a[1].toFixed(2)}"` +
      ` x2="${b[0].toFixed(2)}" y2="${b[1].toFixed(2)}"` +
      ` stroke="${visitGradient(t)}"/>`,
    );
  }
  return `<g class="voyage" data-node="${esc(nodeId)}">${segs.join("")}</g>`;
}

export function renderDependency(slot: Slot<Dependency>, state: SelectionState): string {
  if (slot.error) {
    return `<div class="error-chip" data-view="dependency">${esc(slot.error)}</div>`;
  }
  if (!slot.data) return `<div class="placeholder">select a port</div>`;
  const dep = slot.data;
  const nCols = historyColumns(dep);
  const collapsed = dep.middle.length > COLLAPSE_THRESHOLD;
  const slots = Math.max(
    dep.middle.length,
    ...dep.left.map((c) => c.y + 1),
    ...dep.right.map((c) => c.y + 1),
  );
  const width = xOf(1, nCols) + PAD + RECT_W;
  const height = PAD * 2 + Math.max(1, slots) * ROW_H;
  const parts: string[] = [];
  parts.push(`<svg class="dep" viewBox="0 0 ${width} ${height}">`);

  if (!collapsed) {
    for (const [nodeId, controls] of Object.entries(dep.curves)) {
      parts.push(renderCurve(nodeId, controls, nCols));
    }
  }

  for (const c of dep.left) {
    const x = xOf(c.column - nCols, nCols) + COL_W; // circle sits at its column line
    const y = yOf(c.y);
    const selected = state.selectedPreviousPort === c.port_id;
    parts.push(
      `<circle class="prev-port${selected ? " selected" : ""}"` +
      ` data-port="${esc(c.port_id)}" cx="${x}" cy="${y}" r="10"/>` +
      `<text class="prev-label" x="${x}" y="${y - 14}">${esc(c.port_id)}</text>`,
    );
  }

  const x0 = xOf(0, nCols);
  for (const r of dep.middle) {
    const y = yOf(r.y_slot);
    if (collapsed) {
      // memory-gain swatch only: color carries the KLD, no bars, no text
      parts.push(
        `<rect class="${rectClass(r, state)} kld-box" data-label="${esc(r.label)}"` +
        ` x="${x0 - 8}" y="${y - 5}" width="16" height="10"` +
        ` fill="${divergingHighLow(r.kld_norm)}"/>`,
      );
      continue;
    }
    parts.push(
      `<g class="${rectClass(r, state)}" data-label="${esc(r.label)}" data-order="${r.order}">` +
      `<rect class="ctx-body" x="${x0 - RECT_W / 2}" y="${y - RECT_H / 2}"` +
      ` width="${RECT_W}" height="${RECT_H}"/>` +
      `<rect class="bar entropy" x="${x0 - RECT_W / 2}" y="${y + RECT_H / 2 - 10}"` +
      ` width="${(RECT_W / 2 - 2) * Math.max(0, r.entropy_norm)}" height="4"/>` +
      `<rect class="bar kld" x="${x0}" y="${y + RECT_H / 2 - 10}"` +
      ` width="${(RECT_W / 2 - 2) * Math.max(0, r.kld_norm)}" height="4"` +
      ` fill="${divergingHighLow(r.kld_norm)}"/>` +
      `<text class="ctx-label" x="${x0}" y="${y - 2}">${esc(r.label)}</text>` +
      `</g>`,
    );
  }

  const byNode = new Map(dep.middle.map((r) => [r.node_id, r] as const));
  const xr = xOf(1, nCols);
  for (const e of dep.edges) {
    const src = byNode.get(e.node_id);
    const dst = dep.right.find((c) => c.port_id === e.next_port);
    if (!src || !dst) continue;
    parts.push(
      `<line class="dep-edge" data-node="${e.node_id}" data-next="${esc(e.next_port)}"` +
      ` x1="${x0 + RECT_W / 2}" y1="${yOf(src.y_slot)}" x2="${xr}" y2="${yOf(dst.y)}"` +
      ` stroke-width="${(1 + 5 * e.probability).toFixed(2)}"/>`,
    );
  }

  for (const c of dep.right) {
    const y = yOf(c.y);
    const selected = state.selectedNextPorts.includes(c.port_id);
    parts.push(
      `<circle class="next-port${selected ? " selected" : ""}"` +
      ` data-port="${esc(c.port_id)}" cx="${xr}" cy="${y}" r="10"/>` +
      `<text class="next-label" x="${xr + 14}" y="${y + 4}">${esc(c.port_id)}</text>`,
    );
  }

  parts.push("</svg>");
  return parts.join("");
}
