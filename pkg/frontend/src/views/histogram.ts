import { CATEGORICAL, NEUTRAL } from "../colors.js";
import type { Slot } from "../state.js";
import type { Histogram } from "../types.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

const MONTHS = ["J", "F", "M", "A", "M", "J", "J", "A", "S", "O", "N", "D"];

function monthBars(h: Histogram): string {
  const max = Math.max(1, ...Object.values(h.months));
  const parts: string[] = [];
  for (let m = 1; m <= 12; m++) {
    const v = h.months[String(m)] ?? 0;
    const bh = (v / max) * 40;
    parts.push(
      `<rect class="month" data-month="${m}" x="${(m - 1) * 14}"` +
      ` y="${(44 - bh).toFixed(2)}" width="12" height="${bh.toFixed(2)}"` +
      ` fill="${NEUTRAL}"/>`,
    );
    parts.push(
      `<text class="month-tick" x="${(m - 1) * 14 + 6}" y="54">${MONTHS[m - 1]}</text>`,
    );
  }
  return parts.join("");
}

function typeBars(h: Histogram): string {
  const entries = Object.entries(h.ship_types).sort();
  const max = Math.max(1, ...entries.map(([, v]) => v));
  return entries.map(([name, v], i) => {
    const bw = (v / max) * 120;
    return (
      `<rect class="ship-type" data-type="${esc(name)}" x="70" y="${i * 16}"` +
      ` width="${bw.toFixed(2)}" height="12"` +
      ` fill="${CATEGORICAL[i % CATEGORICAL.length]}"/>` +
      `<text class="type-label" x="66" y="${i * 16 + 10}">${esc(name)}</text>`
    );
  }).join("");
}

export function renderHistograms(slot: Slot<Histogram[]>): string {
  if (slot.error) {
    return `<div class="error-chip" data-view="histogram">${esc(slot.error)}</div>`;
  }
  if (!slot.data || slot.data.length === 0) {
    return `<div class="placeholder">pick a context and a next port</div>`;
  }
  return slot.data.map((h) => {
    const types = Object.keys(h.ship_types).length;
    return (
      `<figure class="transition-hist" data-src="${esc(h.src)}" data-dst="${esc(h.dst)}">` +
      `<figcaption>${esc(h.src)} to ${esc(h.dst)} (${h.total} trips)</figcaption>` +
      `<svg viewBox="0 0 170 60" class="months">${monthBars(h)}</svg>` +
      `<svg viewBox="0 0 200 ${Math.max(16, types * 16)}" class="types">${typeBars(h)}</svg>` +
      `</figure>`
    );
  }).join("");
}
