import { categoryColor, deltaColor, divergingHighLow, NEUTRAL } from "../colors.js";
import type { SelectionState, SessionOverlay, Slot } from "../state.js";
import { currentPort } from "../state.js";
import type { PortList, PortRow } from "../types.js";

export const MAP_W = 720;
export const MAP_H = 360;

/** Plate carree: one degree of longitude = one degree of latitude on screen. */
export function project(lon: number, lat: number): [number, number] {
  return [((lon + 180) / 360) * MAP_W, ((90 - lat) / 180) * MAP_H];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

export function portColor(row: PortRow, state: SelectionState, all: PortRow[]): string {
  switch (state.metric) {
    case "hon_count": {
      const max = Math.max(...all.map((p) => p.hon_count));
      return max > 0 ? divergingHighLow(row.hon_count / max) : NEUTRAL;
    }
    case "pagerank_delta": {
      const maxAbs = Math.max(...all.map((p) => Math.abs(p.pagerank_delta ?? 0)));
      return deltaColor(row.pagerank_delta ?? 0, maxAbs);
    }
    case "eco_realm":
      return row.eco_realm === null
        ? NEUTRAL
        : categoryColor(row.eco_realm, all.map((p) => p.eco_realm ?? ""));
  }
}

function radius(row: PortRow, all: PortRow[]): number {
  const max = Math.max(...all.map((p) => p.hon_pagerank ?? 0));
  return max > 0 ? 3 + 9 * ((row.hon_pagerank ?? 0) / max) : 3;
}

export function renderGeographic(
  slot: Slot<PortList>,
  state: SelectionState,
  overlay: SessionOverlay | null,
): string {
  if (slot.error) {
    return `<div class="error-chip" data-view="geographic">${esc(slot.error)}</div>`;
  }
  if (!slot.data) return `<svg class="geo" viewBox="0 0 ${MAP_W} ${MAP_H}"></svg>`;
  const rows = slot.data.ports;
  const reach = new Map<string, number>();
  if (overlay) {
    for (const [label, r] of Object.entries(overlay.reach)) {
      const port = currentPort(label);
      reach.set(port, Math.max(reach.get(port) ?? 0, r));
    }
  }
  const parts: string[] = [];
  parts.push(`<svg class="geo" viewBox="0 0 ${MAP_W} ${MAP_H}">`);
  parts.push(`<rect class="basemap" x="0" y="0" width="${MAP_W}" height="${MAP_H}"/>`);
  for (let lon = -180; lon <= 180; lon += 30) {
    const [x] = project(lon, 0);
    parts.push(`<line class="graticule" x1="${x}" y1="0" x2="${x}" y2="${MAP_H}"/>`);
  }
  for (let lat = -90; lat <= 90; lat += 30) {
    const [, y] = project(0, lat);
    parts.push(`<line class="graticule" x1="0" y1="${y}" x2="${MAP_W}" y2="${y}"/>`);
  }
  for (const row of rows) {
    if (row.lat === null || row.lon === null) continue; // nothing to place
    const [x, y] = project(row.lon, row.lat);
    const selected = row.port_id === state.selectedPort;
    const cls = selected ? "port selected" : "port";
    parts.push(
      `<circle class="${cls}" data-port="${esc(row.port_id)}" cx="${x}" cy="${y}"` +
      ` r="${radius(row, rows)}" fill="${portColor(row, state, rows)}">` +
      `<title>${esc(row.name ?? row.port_id)}</title></circle>`,
    );
    const r = reach.get(row.port_id);
    if (r !== undefined) {
      // probability of having been visited doubles as the halo's opacity
      parts.push(
        `<circle class="reach-overlay" data-port="${esc(row.port_id)}" cx="${x}"` +
        ` cy="${y}" r="${radius(row, rows) + 4}" opacity="${r.toFixed(6)}"/>`,
      );
    }
  }
  parts.push("</svg>");
  return parts.join("");
}
