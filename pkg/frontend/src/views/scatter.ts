import {
  communityColor, HIGHLIGHT_CONTRIBUTOR, HIGHLIGHT_FRESH,
} from "../colors.js";
import type { ScatterData, SessionOverlay, Slot } from "../state.js";
import type { Contributor } from "../types.js";

export const SCATTER_W = 560;
export const SCATTER_H = 420;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

interface Extent {
  x0: number; x1: number; y0: number; y1: number;
}

function extent(coords: Record<string, [number, number]>): Extent {
  let x0 = Infinity, x1 = -Infinity, y0 = Infinity, y1 = -Infinity;
  for (const [x, y] of Object.values(coords)) {
    x0 = Math.min(x0, x); x1 = Math.max(x1, x);
    y0 = Math.min(y0, y); y1 = Math.max(y1, y);
  }
  if (!isFinite(x0)) return { x0: 0, x1: 1, y0: 0, y1: 1 };
  if (x1 - x0 < 1e-9) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) y1 = y0 + 1;
  return { x0, x1, y0, y1 };
}

function placer(e: Extent): (xy: [number, number]) => [number, number] {
  const m = 24;
  return ([x, y]) => [
    m + ((x - e.x0) / (e.x1 - e.x0)) * (SCATTER_W - 2 * m),
    m + ((y - e.y0) / (e.y1 - e.y0)) * (SCATTER_H - 2 * m),
  ];
}

export interface TraceButton {
  disabled: boolean;
  tooltip: string | null;
}

export function traceButtonState(overlay: SessionOverlay | null): TraceButton {
  if (!overlay) return { disabled: true, tooltip: "create a session first" };
  if (overlay.exhausted) {
    return { disabled: true, tooltip: "all probability mass has left the network" };
  }
  return { disabled: false, tooltip: null };
}

export function renderScatter(
  slot: Slot<ScatterData>,
  overlay: SessionOverlay | null,
  nodeIdFor: (label: string) => number | undefined,
): string {
  if (slot.error) {
    return `<div class="error-chip" data-view="scatter">${esc(slot.error)}</div>`;
  }
  if (!slot.data) return `<svg class="scatter" viewBox="0 0 ${SCATTER_W} ${SCATTER_H}"></svg>`;
  const { layout, communities } = slot.data;
  const place = placer(extent(layout.coords));

  const reachByNode = new Map<number, number>();
  const freshNodes = new Set<number>();
  let contributorNode: number | undefined;
  if (overlay) {
    for (const [label, r] of Object.entries(overlay.reach)) {
      const id = nodeIdFor(label);
      if (id !== undefined) reachByNode.set(id, r);
    }
    if (overlay.highlightedContributor !== null) {
      contributorNode = nodeIdFor(overlay.highlightedContributor);
      for (const [label, step] of Object.entries(overlay.firstReach)) {
        if (step === overlay.stepCount) {
          const id = nodeIdFor(label);
          if (id !== undefined) freshNodes.add(id);
        }
      }
    }
  }

  const parts: string[] = [];
  parts.push(`<svg class="scatter" viewBox="0 0 ${SCATTER_W} ${SCATTER_H}">`);
  for (const [nodeId, xy] of Object.entries(layout.coords)) {
    const [x, y] = place(xy);
    const community = communities.assignment[nodeId] ?? -1;
    const n = Number(nodeId);
    const cls = ["node"];
    let stroke = "none";
    if (contributorNode !== undefined && n === contributorNode) {
      cls.push("contributor-hl");
      stroke = HIGHLIGHT_CONTRIBUTOR;
    } else if (freshNodes.has(n)) {
      cls.push("fresh-hl");
      stroke = HIGHLIGHT_FRESH;
    }
    parts.push(
      `<circle class="${cls.join(" ")}" data-node="${esc(nodeId)}"` +
      ` cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="6"` +
      ` fill="${communityColor(community)}" stroke="${stroke}" stroke-width="3"/>`,
    );
    const reach = reachByNode.get(n);
    if (reach !== undefined) {
      parts.push(
        `<circle class="reach-overlay" data-node="${esc(nodeId)}"` +
        ` cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="11"` +
        ` opacity="${reach.toFixed(6)}"/>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

export const CONTRIB_LIMIT = 20;

/** Stacked bars, one per contributor, segments colored by the communities
    its mass flowed through. Clicking a bar highlights the scatter. */
export function renderContributors(overlay: SessionOverlay | null): string {
  if (!overlay || overlay.contributors.length === 0) {
    return `<div class="placeholder">no flow yet</div>`;
  }
  const top: Contributor[] = overlay.contributors.slice(0, CONTRIB_LIMIT);
  const maxTotal = Math.max(...top.map((c) => c.total));
  const barW = 22;
  const gap = 6;
  const h = 160;
  const width = top.length * (barW + gap) + gap;
  const parts: string[] = [];
  parts.push(`<svg class="contributors" viewBox="0 0 ${width} ${h + 30}">`);
  top.forEach((c, i) => {
    const x = gap + i * (barW + gap);
    const scale = maxTotal > 0 ? h / maxTotal : 0;
    const highlighted = overlay.highlightedContributor === c.label;
    let y = h;
    const segs: string[] = [];
    for (const [community, weight] of Object.entries(c.by_community).sort()) {
      const segH = weight * scale;
      y -= segH;
      segs.push(
        `<rect class="seg" x="${x}" y="${y.toFixed(2)}" width="${barW}"` +
        ` height="${segH.toFixed(2)}" fill="${communityColor(Number(community))}"/>`,
      );
    }
    parts.push(
      `<g class="contrib-bar${highlighted ? " highlighted" : ""}"` +
      ` data-label="${esc(c.label)}">` +
      segs.join("") +
      `<title>${esc(c.label)}: ${c.total.toFixed(4)}</title>` +
      `</g>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
