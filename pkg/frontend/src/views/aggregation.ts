import { categoryColor } from "../colors.js";
import type { SelectionState, Slot } from "../state.js";
import type { Aggregation } from "../types.js";

export const AGG_SIZE = 420;
const CX = AGG_SIZE / 2;
const CY = AGG_SIZE / 2;
const R_INNER = 150;
const R_OUTER = 172;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

function polar(angle: number, r: number): [number, number] {
  return [CX + r * Math.cos(angle), CY + r * Math.sin(angle)];
}

function fmt(v: number): string {
  return v.toFixed(3);
}

function sectorPath(start: number, end: number): string {
  const [ax, ay] = polar(start, R_OUTER);
  const [bx, by] = polar(end, R_OUTER);
  const [cx, cy] = polar(end, R_INNER);
  const [dx, dy] = polar(start, R_INNER);
  const large = end - start > Math.PI ? 1 : 0;
  return (
    `M ${fmt(ax)} ${fmt(ay)} A ${R_OUTER} ${R_OUTER} 0 ${large} 1 ${fmt(bx)} ${fmt(by)}` +
    ` L ${fmt(cx)} ${fmt(cy)} A ${R_INNER} ${R_INNER} 0 ${large} 0 ${fmt(dx)} ${fmt(dy)} Z`
  );
}

function chordPath(src: number, dst: number): string {
  const [ax, ay] = polar(src, R_INNER);
  const [bx, by] = polar(dst, R_INNER);
  // pull every chord through the hub so short and long hops read alike
  return `M ${fmt(ax)} ${fmt(ay)} Q ${CX} ${CY} ${fmt(bx)} ${fmt(by)}`;
}

export function renderAggregation(
  slot: Slot<Aggregation>, state: SelectionState,
): string {
  if (state.aggregation.hidden) {
    return `<div class="agg-hidden" data-view="aggregation"></div>`;
  }
  if (slot.error) {
    return `<div class="error-chip" data-view="aggregation">${esc(slot.error)}</div>`;
  }
  if (!slot.data) return `<svg class="agg" viewBox="0 0 ${AGG_SIZE} ${AGG_SIZE}"></svg>`;
  const agg = slot.data;
  const labels = agg.sectors.map((s) => s.label);
  const maxW = Math.max(1e-12, ...agg.chords.map((c) => c.weight));
  const parts: string[] = [];
  parts.push(`<svg class="agg" viewBox="0 0 ${AGG_SIZE} ${AGG_SIZE}">`);
  for (const chord of agg.chords) {
    parts.push(
      `<path class="chord ${chord.intra ? "intra" : "inter"}"` +
      ` data-src="${esc(chord.src_label)}" data-dst="${esc(chord.dst_label)}"` +
      ` d="${chordPath(chord.src_angle, chord.dst_angle)}"` +
      ` stroke-width="${(0.5 + 4 * chord.weight / maxW).toFixed(2)}"/>`,
    );
  }
  for (const sector of agg.sectors) {
    parts.push(
      `<path class="sector" data-label="${esc(sector.label)}"` +
      ` d="${sectorPath(sector.start_angle, sector.end_angle)}"` +
      ` fill="${categoryColor(sector.label, labels)}">` +
      `<title>${esc(sector.label)}</title></path>`,
    );
    const mid = (sector.start_angle + sector.end_angle) / 2;
    const [tx, ty] = polar(mid, R_OUTER + 14);
    parts.push(
      `<text class="sector-label" x="${fmt(tx)}" y="${fmt(ty)}">` +
      `${esc(sector.label)}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("");
}
